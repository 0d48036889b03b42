"""Picard iteration for quadratic wave equations, scattering data and scaling"""
from collections import namedtuple
import logging
import math

import numpy as np
from scipy.integrate import trapezoid

from constants import (
    BESOV_NORM,
    DIVERGENCE_FLOOR,
    FOURIER,
    GRADIENT,
    GS_NORM,
    MD_SCHEMATIC,
    PHYSICAL,
    SCALAR_MODEL,
    SPACETIME_FOURIER,
    SPATIAL_FOURIER,
    SPECTRAL_ZERO_TOLERANCE,
    TWO_THIRDS,
    VALID_DEALIAS,
    VALID_ITERATION_NORMS,
    WM_MODEL,
    YM_SCHEMATIC,
)
from exception import (
    ConfigurationException,
    NotConvergedException,
    RangeException,
)
from grid_spectral import (
    GridSpec,
    convert,
    l2_norm,
    lattice_geometry,
    make_field,
    make_spatial_field,
    spacing,
    spatial_convert,
    spatial_mesh,
    times,
    xi_modulus,
)
from lib import is_integer_power_of_two, is_power_of_two, parse_text_matching_options
from spaces import (
    besov_data_norm,
    gs_norm,
    sobolev_norm,
    sobolev_profile,
    solution_profile,
)
from wave_ops import box, duhamel, propagate, propagate_velocity


log = logging.getLogger(__name__)


IterationConfig = namedtuple(
    "IterationConfig",
    [
        "schematic",
        "epsilon0",
        "max_iter",
        "contraction_tol",
        "dealias",
        "derivative_choice",
        "nonlinear",
        "norm",
    ],
)
IterationTrace = namedtuple(
    "IterationTrace",
    [
        "config",
        "data_norm",
        "iterate_norms",
        "difference_norms",
        "residuals",
        "energy_profiles",
        "converged",
        "diverged",
        "steps",
        "solution",
        "velocity",
        "source",
        "scattering",
    ],
)
ScatteringData = namedtuple(
    "ScatteringData",
    [
        "f_plus",
        "g_plus",
        "f_minus",
        "g_minus",
        "discrepancy",
        "bound",
        "energy_discrepancy",
        "energy_bound",
    ],
)
UniquenessReport = namedtuple(
    "UniquenessReport", ["scales", "data_difference", "solution_difference", "constant"]
)
ContractionStudy = namedtuple(
    "ContractionStudy", ["epsilons", "rhos", "slope", "continuity", "persistence"]
)
Derivatives = namedtuple("Derivatives", ["value", "time", "space"])


def make_iteration_config(
    *,
    schematic,
    epsilon0,
    max_iter,
    contraction_tol,
    dealias=TWO_THIRDS,
    derivative_choice=0,
    nonlinear=True,
    norm=GS_NORM,
):
    """
    Validate and build an IterationConfig

    Args:
        schematic (SchematicParams): The system and its exponents
        epsilon0 (float): Data smallness threshold
        max_iter (int): Step limit, at least 2
        contraction_tol (float): Stop once successive differences fall below this
        dealias (str): two-thirds or none
        derivative_choice (int or str): Spatial axis for ∇ in φ∇φ, or "gradient"
        nonlinear (bool): When false the iteration returns the free wave
        norm (str): Norm of successive differences, "gs" or "besov"

    Returns:
        IterationConfig: The config
    """
    if not epsilon0 > 0:
        raise ConfigurationException(f"epsilon0 must be positive, got {epsilon0}")
    if not isinstance(max_iter, int) or max_iter < 2:
        raise ConfigurationException(f"max_iter must be an integer at least 2, got {max_iter}")
    if contraction_tol < 0:
        raise ConfigurationException(
            f"contraction_tol must not be negative, got {contraction_tol}"
        )
    parse_text_matching_options(VALID_DEALIAS)(dealias)
    parse_text_matching_options(VALID_ITERATION_NORMS)(norm)
    if derivative_choice != GRADIENT and (
        not isinstance(derivative_choice, int) or derivative_choice < 0
    ):
        raise ConfigurationException(
            f"derivative_choice must be a spatial axis or '{GRADIENT}', got {derivative_choice}"
        )
    return IterationConfig(
        schematic=schematic,
        epsilon0=float(epsilon0),
        max_iter=max_iter,
        contraction_tol=float(contraction_tol),
        dealias=dealias,
        derivative_choice=derivative_choice,
        nonlinear=nonlinear,
        norm=norm,
    )


def _components(value):
    return tuple(value) if isinstance(value, (list, tuple)) else (value,)


def _unwrap(values):
    values = tuple(values)
    return values[0] if len(values) == 1 else values


def _check_components(schematic, values, name):
    expected = len(schematic.sigma)
    if len(values) != expected:
        raise ConfigurationException(
            f"{schematic.system} has {expected} components but {name} has {len(values)}"
        )


def _dealias_mask(grid):
    """|k_i| ≤ N_x/3 on every spatial axis"""
    mask = np.ones((grid.nx,) * grid.n, dtype=bool)
    for component in spatial_mesh(grid):
        mask = mask & (np.abs(np.rint(component * grid.length)) <= grid.nx / 3)
    return mask[np.newaxis, ...]


def _to_physical(grid, coeffs):
    return convert(make_field(grid, coeffs, SPATIAL_FOURIER), PHYSICAL).coeffs


def _time_derivative(u):
    """Spectral ∂_t, which assumes time periodicity"""
    coeffs = convert(u, SPACETIME_FOURIER).coeffs
    derivative = coeffs * 2j * math.pi * lattice_geometry(u.grid).tau
    return convert(make_field(u.grid, derivative, SPACETIME_FOURIER), PHYSICAL).coeffs


def _derivatives(u, velocity, mask):
    grid = u.grid
    hat = convert(u, SPATIAL_FOURIER).coeffs * mask
    space = [
        _to_physical(grid, hat * 2j * math.pi * component[np.newaxis, ...])
        for component in spatial_mesh(grid)
    ]
    if velocity is None:
        time = _time_derivative(make_field(grid, hat, SPATIAL_FOURIER))
    else:
        time = _to_physical(grid, convert(velocity, SPATIAL_FOURIER).coeffs * mask)
    return Derivatives(value=_to_physical(grid, hat), time=time, space=space)


def _directional(derivatives, derivative_choice):
    if derivative_choice == GRADIENT:
        return sum(derivatives.space)
    if derivative_choice >= len(derivatives.space):
        raise ConfigurationException(
            f"derivative_choice {derivative_choice} exceeds the spatial dimension "
            f"{len(derivatives.space)}"
        )
    return derivatives.space[derivative_choice]


def _gradient_square(derivatives):
    return derivatives.time**2 + sum(component**2 for component in derivatives.space)


def nonlinearity(
    phi, schematic, *, velocity=None, dealias=TWO_THIRDS, derivative_choice=0
):
    """
    N(φ, Dφ) for one of the schematic systems, products taken in physical space

    Args:
        phi (SpaceTimeField or tuple): The field, a (u, A) pair for the MD schematic
        schematic (SchematicParams): The system
        velocity (SpaceTimeField or tuple or None): ∂_tφ, spectral differentiation when absent
        dealias (str): two-thirds masks inputs and output
        derivative_choice (int or str): Spatial axis for the scalar model, or "gradient"

    Returns:
        SpaceTimeField or tuple: N(φ, Dφ) in physical representation
    """
    fields = _components(phi)
    _check_components(schematic, fields, "phi")
    velocities = (None,) * len(fields) if velocity is None else _components(velocity)
    _check_components(schematic, velocities, "velocity")
    grid = fields[0].grid
    mask = (
        _dealias_mask(grid)
        if parse_text_matching_options(VALID_DEALIAS)(dealias) == TWO_THIRDS
        else np.ones((1,) + (grid.nx,) * grid.n, dtype=bool)
    )
    parts = [
        _derivatives(field, rate, mask) for field, rate in zip(fields, velocities)
    ]

    system = schematic.system
    if system == SCALAR_MODEL:
        outputs = [parts[0].value * _directional(parts[0], derivative_choice)]
    elif system == WM_MODEL:
        outputs = [_gradient_square(parts[0])]
    elif system == YM_SCHEMATIC:
        value = parts[0].value
        outputs = [value * _directional(parts[0], derivative_choice) + value**3]
    elif system == MD_SCHEMATIC:
        spinor, potential = parts
        outputs = [
            potential.value * _directional(spinor, derivative_choice),
            _gradient_square(spinor),
        ]
    else:
        raise ConfigurationException(f"Unknown system {system}")

    results = []
    for output in outputs:
        hat = convert(make_field(grid, output, PHYSICAL), SPATIAL_FOURIER).coeffs * mask
        results.append(make_field(grid, _to_physical(grid, hat), PHYSICAL))
    return _unwrap(results)


def equation_residual(phi, schematic, *, dealias=TWO_THIRDS, derivative_choice=0):
    """□φ − N(φ, Dφ) with spectral □, in physical representation"""
    fields = _components(phi)
    sources = _components(
        nonlinearity(phi, schematic, dealias=dealias, derivative_choice=derivative_choice)
    )
    return _unwrap(
        make_field(
            field.grid,
            convert(box(field), PHYSICAL).coeffs - source.coeffs,
            PHYSICAL,
        )
        for field, source in zip(fields, sources)
    )


def _data_norm(fs, gs, schematic):
    return sum(
        besov_data_norm(f, g, s_c) for f, g, s_c in zip(fs, gs, schematic.s_c)
    )


def _difference_norm(config, news, olds, new_rates, old_rates):
    total = 0.0
    for index, s_c in enumerate(config.schematic.s_c):
        difference = make_field(
            news[index].grid,
            convert(news[index], SPATIAL_FOURIER).coeffs
            - convert(olds[index], SPATIAL_FOURIER).coeffs,
            SPATIAL_FOURIER,
        )
        if config.norm == BESOV_NORM:
            rate = make_field(
                news[index].grid,
                new_rates[index].coeffs - old_rates[index].coeffs,
                SPATIAL_FOURIER,
            )
            total += float(solution_profile(difference, rate, s_c).max())
        else:
            total += gs_norm(difference, s_c)
    return total


def _iterate_norm(config, fields, rates):
    if config.norm == BESOV_NORM:
        return sum(
            float(solution_profile(field, rate, s_c).max())
            for field, rate, s_c in zip(fields, rates, config.schematic.s_c)
        )
    return sum(gs_norm(field, s_c) for field, s_c in zip(fields, config.schematic.s_c))


def _source_distance(first, second):
    return math.sqrt(
        sum(
            l2_norm(make_field(a.grid, a.coeffs - b.coeffs, PHYSICAL)) ** 2
            for a, b in zip(first, second)
        )
    )


def _profile(fields, rates, schematic):
    return sum(
        solution_profile(field, rate, s_c)
        for field, rate, s_c in zip(fields, rates, schematic.s_c)
    )


def _apply_nonlinearity(config, fields, rates):
    return _components(
        nonlinearity(
            _unwrap(fields),
            config.schematic,
            velocity=_unwrap(rates),
            dealias=config.dealias,
            derivative_choice=config.derivative_choice,
        )
    )


def _is_diverging(differences, norm):
    if len(differences) < 3:
        return False
    growing = differences[-1] > differences[-2] > differences[-3]
    return growing and differences[-1] > DIVERGENCE_FLOOR * max(norm, 1.0)


def picard_solve(f, g, config):
    """
    Iterate φ_{k+1} = W(f, g) + □^{-1}N(φ_k, Dφ_k) starting from the free wave

    Args:
        f (SpatialField or tuple): Position data, one per component
        g (SpatialField or tuple): Velocity data, one per component
        config (IterationConfig): Iteration settings

    Returns:
        IterationTrace: Per-step norms, the final iterate and scattering data when converged
    """
    fs, gs = _components(f), _components(g)
    _check_components(config.schematic, fs, "f")
    _check_components(config.schematic, gs, "g")
    free = tuple(propagate(f_i, g_i) for f_i, g_i in zip(fs, gs))
    free_rates = tuple(propagate_velocity(f_i, g_i) for f_i, g_i in zip(fs, gs))
    data_norm = _data_norm(fs, gs, config.schematic)
    if data_norm > config.epsilon0:
        log.warning(
            "Data norm %s exceeds epsilon0 %s, the iteration may not contract",
            data_norm,
            config.epsilon0,
        )

    fields, rates = free, free_rates
    iterate_norms, differences, residuals, profiles = [], [], [], []
    converged = diverged = False
    zero = tuple(
        make_field(field.grid, np.zeros_like(field.coeffs), PHYSICAL) for field in free
    )
    source = zero
    next_source = (
        _apply_nonlinearity(config, fields, rates) if config.nonlinear else zero
    )
    steps = 0
    for step in range(1, config.max_iter + 1):
        steps = step
        source = next_source
        solutions = tuple(duhamel(part) for part in source)
        new_fields = tuple(
            make_field(
                base.grid,
                base.coeffs + convert(solution.field, SPATIAL_FOURIER).coeffs,
                SPATIAL_FOURIER,
            )
            for base, solution in zip(free, solutions)
        )
        new_rates = tuple(
            make_field(
                base.grid,
                base.coeffs + solution.velocity.coeffs,
                SPATIAL_FOURIER,
            )
            for base, solution in zip(free_rates, solutions)
        )
        next_source = (
            _apply_nonlinearity(config, new_fields, new_rates)
            if config.nonlinear
            else zero
        )
        differences.append(_difference_norm(config, new_fields, fields, new_rates, rates))
        iterate_norms.append(_iterate_norm(config, new_fields, new_rates))
        residuals.append(_source_distance(source, next_source))
        profiles.append(_profile(new_fields, new_rates, config.schematic))
        fields, rates = new_fields, new_rates
        log.info(
            "Picard step %s: difference %s, residual %s",
            step,
            differences[-1],
            residuals[-1],
        )
        if differences[-1] <= config.contraction_tol:
            converged = True
            break
        if _is_diverging(differences, iterate_norms[-1]):
            log.warning("Picard iteration diverged at step %s", step)
            diverged = True
            break

    scattering = None
    if converged:
        scattering = tuple(
            scattering_from_source(f_i, g_i, part, solution=field, velocity=rate)
            for f_i, g_i, part, field, rate in zip(fs, gs, source, fields, rates)
        )
    return IterationTrace(
        config=config,
        data_norm=data_norm,
        iterate_norms=tuple(iterate_norms),
        difference_norms=tuple(differences),
        residuals=tuple(residuals),
        energy_profiles=tuple(profiles),
        converged=converged,
        diverged=diverged,
        steps=steps,
        solution=_unwrap(fields),
        velocity=_unwrap(rates),
        source=_unwrap(source),
        scattering=None if scattering is None else _unwrap(scattering),
    )


def _tail_integral(values, dt):
    """∫_{t_i}^{T⁺} by the trapezoid rule for every grid time t_i"""
    total = trapezoid(values, dx=dt)
    head = np.concatenate([[0.0], np.cumsum((values[1:] + values[:-1]) * dt / 2)])
    return total - head


def scattering_from_source(f, g, source, *, solution=None, velocity=None):
    """
    Asymptotic free data of φ = W(f, g) + □^{-1}F together with the discrepancy curves

    Args:
        f (SpatialField): Position data
        g (SpatialField): Velocity data
        source (SpaceTimeField): The source F generating the solution
        solution (SpaceTimeField or None): φ, rebuilt from the source when absent
        velocity (SpaceTimeField or None): ∂_tφ, rebuilt from the source when absent

    Returns:
        ScatteringData: (f⁺, g⁺), (f⁻, g⁻) = (f, g), δ(t) in Ḣ¹ with its tail bound, and the
            energy discrepancy with its bound
    """
    grid = f.grid
    dt, dx = spacing(grid)
    coeffs = convert(source, SPATIAL_FOURIER).coeffs
    xi_abs = xi_modulus(spatial_mesh(grid))[np.newaxis, ...]
    a = 2 * math.pi * xi_abs
    t = times(grid).reshape([grid.nt] + [1] * grid.n)
    positive = a > 0
    safe = np.where(positive, a, 1.0)
    sine_weight = np.where(positive, np.sin(a * t) / safe, t)
    shift_f = trapezoid(sine_weight * coeffs, dx=dt, axis=0)
    shift_g = -trapezoid(np.cos(a * t) * coeffs, dx=dt, axis=0)
    f_hat = spatial_convert(f, FOURIER).coeffs
    g_hat = spatial_convert(g, FOURIER).coeffs
    f_plus = make_spatial_field(grid, f_hat + shift_f, FOURIER)
    g_plus = make_spatial_field(grid, g_hat + shift_g, FOURIER)

    if solution is None or velocity is None:
        generated = duhamel(source)
        solution = make_field(
            grid,
            propagate(f, g).coeffs + generated.field.coeffs,
            SPATIAL_FOURIER,
        )
        velocity = make_field(
            grid,
            propagate_velocity(f, g).coeffs + generated.velocity.coeffs,
            SPATIAL_FOURIER,
        )
    gap = convert(solution, SPATIAL_FOURIER).coeffs - propagate(f_plus, g_plus).coeffs
    rate_gap = (
        convert(velocity, SPATIAL_FOURIER).coeffs
        - propagate_velocity(f_plus, g_plus).coeffs
    )
    measure = math.sqrt(dx**grid.n)
    discrepancy = measure * np.linalg.norm((xi_abs * gap).reshape(grid.nt, -1), axis=1)
    energy_discrepancy = measure * np.sqrt(
        (np.abs(a * gap) ** 2 + np.abs(rate_gap) ** 2).reshape(grid.nt, -1).sum(axis=1)
    )
    source_norms = measure * np.linalg.norm(coeffs.reshape(grid.nt, -1), axis=1)
    tail = _tail_integral(source_norms, dt)
    return ScatteringData(
        f_plus=f_plus,
        g_plus=g_plus,
        f_minus=spatial_convert(f, FOURIER),
        g_minus=spatial_convert(g, FOURIER),
        discrepancy=discrepancy,
        bound=tail / (2 * math.pi),
        energy_discrepancy=energy_discrepancy,
        energy_bound=tail,
    )


def scattering_data(trace):
    """
    Scattering data of a converged trace

    Raises:
        NotConvergedException: When the iteration stopped without converging
    """
    if not trace.converged:
        raise NotConvergedException(
            f"Trace stopped after {trace.steps} steps without converging"
        )
    return trace.scattering


def finite_difference_residual(phi, source):
    """
    ‖−∂_t²φ + Δφ − F‖_{L²L²} over interior times, fourth-order differences in time

    Args:
        phi (SpaceTimeField): The solution
        source (SpaceTimeField): The right-hand side F

    Returns:
        float: The discrete residual, independent of the Duhamel quadrature
    """
    grid = phi.grid
    dt, dx = spacing(grid)
    values = convert(phi, SPATIAL_FOURIER).coeffs
    second = (
        -values[4:] + 16 * values[3:-1] - 30 * values[2:-2] + 16 * values[1:-3] - values[:-4]
    ) / (12 * dt**2)
    laplacian = -((2 * math.pi * xi_modulus(spatial_mesh(grid))) ** 2)[np.newaxis, ...]
    residual = (
        -second
        + laplacian * values[2:-2]
        - convert(source, SPATIAL_FOURIER).coeffs[2:-2]
    )
    return float(math.sqrt(dt * dx**grid.n) * np.linalg.norm(residual.ravel()))


def mollify(f, scale):
    """Multiply f̂ by exp(−(|ξ|/scale)²)"""
    if not scale > 0:
        raise ConfigurationException(f"Mollifier scale must be positive, got {scale}")
    grid = f.grid
    weights = np.exp(-((xi_modulus(spatial_mesh(grid)) / scale) ** 2))
    return make_spatial_field(grid, spatial_convert(f, FOURIER).coeffs * weights, FOURIER)


def _spatial_difference(first, second):
    return make_spatial_field(
        first.grid,
        spatial_convert(first, FOURIER).coeffs - spatial_convert(second, FOURIER).coeffs,
        FOURIER,
    )


def _field_difference(first, second):
    return make_field(
        first.grid,
        convert(first, SPATIAL_FOURIER).coeffs - convert(second, SPATIAL_FOURIER).coeffs,
        SPATIAL_FOURIER,
    )


def uniqueness_experiment(f, g, config, scales):
    """
    Solve from data mollified at two scales and compare the solutions against the data

    Args:
        f (SpatialField or tuple): Position data
        g (SpatialField or tuple): Velocity data
        config (IterationConfig): Iteration settings
        scales (tuple of float): Two mollifier scales

    Returns:
        UniquenessReport: sup-t Besov difference of the solutions over the data difference
    """
    if len(scales) != 2:
        raise ConfigurationException(f"Expected two mollifier scales, got {scales}")
    data = []
    traces = []
    for scale in scales:
        fs = tuple(mollify(f_i, scale) for f_i in _components(f))
        gs = tuple(mollify(g_i, scale) for g_i in _components(g))
        data.append((fs, gs))
        traces.append(picard_solve(_unwrap(fs), _unwrap(gs), config))
    (f_first, g_first), (f_second, g_second) = data
    data_difference = sum(
        besov_data_norm(_spatial_difference(a, b), _spatial_difference(c, d), s_c)
        for a, b, c, d, s_c in zip(f_first, f_second, g_first, g_second, config.schematic.s_c)
    )
    first, second = traces
    solution_difference = sum(
        float(
            solution_profile(
                _field_difference(a, b), _field_difference(c, d), s_c
            ).max()
        )
        for a, b, c, d, s_c in zip(
            _components(first.solution),
            _components(second.solution),
            _components(first.velocity),
            _components(second.velocity),
            config.schematic.s_c,
        )
    )
    constant = solution_difference / data_difference if data_difference > 0 else math.nan
    return UniquenessReport(
        scales=tuple(scales),
        data_difference=data_difference,
        solution_difference=solution_difference,
        constant=constant,
    )


def _scaled_data(values, factor):
    return tuple(
        make_spatial_field(value.grid, spatial_convert(value, FOURIER).coeffs * factor, FOURIER)
        for value in values
    )


def _contraction_ratio(differences):
    ratios = [
        later / earlier
        for earlier, later in zip(differences, differences[1:])
        if earlier > 0
    ]
    return max(ratios) if ratios else math.nan


def contraction_study(f, g, config, epsilons, *, steps=3):
    """
    Rescale the data to each ε₀ and measure contraction, continuity and persistence constants

    Args:
        f (SpatialField or tuple): Position data, any nonzero size
        g (SpatialField or tuple): Velocity data
        config (IterationConfig): Iteration settings, epsilon0 is replaced per run
        epsilons (list of float): Data sizes
        steps (int): Picard steps per run

    Returns:
        ContractionStudy: ρ per ε₀, the fitted log-log slope and the measured constants
    """
    fs, gs = _components(f), _components(g)
    base = _data_norm(fs, gs, config.schematic)
    if base == 0:
        raise ConfigurationException("Contraction study needs nonzero data")
    rhos, continuity, persistence = [], [], []
    for epsilon in epsilons:
        factor = epsilon / base
        scaled_f, scaled_g = _scaled_data(fs, factor), _scaled_data(gs, factor)
        run_config = config._replace(
            epsilon0=float(epsilon), max_iter=steps, contraction_tol=0.0
        )
        trace = picard_solve(_unwrap(scaled_f), _unwrap(scaled_g), run_config)
        rhos.append(_contraction_ratio(trace.difference_norms))
        continuity.append(float(np.max(trace.energy_profiles[-1])) / epsilon)
        persistence.append(
            _persistence_constant(
                scaled_f,
                scaled_g,
                _components(trace.solution),
                _components(trace.velocity),
                config.schematic,
            )
        )
    valid = [
        (eps, rho) for eps, rho in zip(epsilons, rhos) if rho > 0 and math.isfinite(rho)
    ]
    slope = (
        float(np.polyfit(np.log([e for e, _ in valid]), np.log([r for _, r in valid]), 1)[0])
        if len(valid) >= 2
        else math.nan
    )
    log.info("Contraction slope %s over epsilons %s", slope, list(epsilons))
    return ContractionStudy(
        epsilons=tuple(epsilons),
        rhos=tuple(rhos),
        slope=slope,
        continuity=tuple(continuity),
        persistence=tuple(persistence),
    )


def _persistence_constant(fs, gs, fields, rates, schematic):
    """sup_t Ḣ^s profile over the Ḣ^s × Ḣ^{s−1} data norm at s = s_c + 1"""
    solution = 0.0
    data = 0.0
    for f, g, field, rate, s_c in zip(fs, gs, fields, rates, schematic.s_c):
        s = float(s_c) + 1
        solution += float(sobolev_profile(field, rate, s).max())
        data += sobolev_norm(f, s) + sobolev_norm(g, s - 1)
    return solution / data if data > 0 else math.nan


def _check_scale(lam):
    if not lam > 0 or not is_power_of_two(lam):
        raise RangeException(f"Scale factor must be a power of two, got {lam}")


def _scaled_grid(grid, lam):
    return GridSpec(
        n=grid.n,
        nx=grid.nx,
        length=grid.length / lam,
        nt=grid.nt,
        period=grid.period / lam,
    )


def _regroup(coeffs, lam, axes):
    """Move the coefficient at signed index k to λk along the given axes"""
    if not is_integer_power_of_two(lam):
        raise RangeException(f"Regrouping on the same grid needs an integer λ, got {lam}")
    lam = int(lam)
    scale = np.abs(coeffs).max() if coeffs.size else 0.0
    support = np.argwhere(np.abs(coeffs) > SPECTRAL_ZERO_TOLERANCE * scale) if scale > 0 else []
    result = np.zeros_like(coeffs)
    sizes = coeffs.shape
    for index in support:
        target = list(index)
        for axis in axes:
            size = sizes[axis]
            signed = index[axis] if index[axis] < size // 2 else index[axis] - size
            moved = signed * lam
            if not -size // 2 <= moved < size // 2:
                raise RangeException(
                    f"Rescaled frequency index {moved} on axis {axis} is beyond the Nyquist range"
                )
            target[axis] = moved % size
        result[tuple(target)] = coeffs[tuple(index)]
    return result


def scale_transform(phi, lam, sigma, *, same_grid=False):
    """
    φ ↦ λ^σ φ(λ·)

    Args:
        phi (SpaceTimeField): The field
        lam (float): A power of two
        sigma (float): Scaling exponent
        same_grid (bool): Regroup frequencies k ↦ λk on the same torus instead of shrinking it

    Returns:
        SpaceTimeField: The rescaled field, same representation on the default path and
            spacetime-Fourier when regrouped
    """
    _check_scale(lam)
    factor = lam ** float(sigma)
    if not same_grid:
        return make_field(_scaled_grid(phi.grid, lam), phi.coeffs * factor, phi.rep)
    coeffs = convert(phi, SPACETIME_FOURIER).coeffs
    regrouped = _regroup(coeffs, lam, range(coeffs.ndim))
    return make_field(phi.grid, regrouped * factor, SPACETIME_FOURIER)


def _scale_spatial(f, lam, exponent, same_grid):
    factor = lam ** float(exponent)
    if not same_grid:
        return make_spatial_field(_scaled_grid(f.grid, lam), f.coeffs * factor, f.rep)
    coeffs = spatial_convert(f, FOURIER).coeffs
    regrouped = _regroup(coeffs, lam, range(coeffs.ndim))
    return make_spatial_field(f.grid, regrouped * factor, FOURIER)


def data_scale(f, g, lam, sigma, *, same_grid=False):
    """
    (f, g) ↦ (λ^σ f(λ·), λ^{σ+1} g(λ·)), the Cauchy data of scale_transform

    Returns:
        tuple: The rescaled (f, g)
    """
    _check_scale(lam)
    return (
        _scale_spatial(f, lam, sigma, same_grid),
        _scale_spatial(g, lam, float(sigma) + 1, same_grid),
    )
