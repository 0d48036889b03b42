"""Free propagation, Duhamel integration, division by the wave symbol and shell decompositions"""
from collections import namedtuple
import logging
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from constants import (
    FOURIER,
    PHYSICAL,
    SHELL,
    SHELL_CONE,
    SPACETIME_FOURIER,
    SPATIAL_FOURIER,
    SPECTRAL_ZERO_TOLERANCE,
    VALID_ROUTES,
    X_ROUTE,
)
from exception import (
    ConfigurationException,
    ContractViolationException,
    LightConeException,
)
from grid_spectral import (
    convert,
    frequency_of,
    frequency_shells,
    l2_norm,
    lattice_geometry,
    make_field,
    make_spatial_field,
    spacing,
    spatial_convert,
    spatial_mesh,
    time_slice,
    times,
    wave_symbol,
    xi_modulus,
)
from lib import matches_dyadic, parse_text_matching_options
from multipliers import SHARP_PROFILE, SymbolSpec, cached_symbol
from spaces import f_lambda_components, relevant_modulations


log = logging.getLogger(__name__)


DuhamelSolution = namedtuple("DuhamelSolution", ["field", "velocity"])
FDecomposition = namedtuple(
    "FDecomposition", ["free", "xpart", "ypart", "ypart_velocity", "source", "routes"]
)
TraceFamily = namedtuple("TraceFamily", ["sign", "lam", "grid", "spacing", "samples"])


def _angular_frequency(grid):
    """2π|ξ| on the spatial lattice, with a leading time axis"""
    return 2 * math.pi * xi_modulus(spatial_mesh(grid))[np.newaxis, ...]


def _spatial_coefficients(f):
    return spatial_convert(f, FOURIER).coeffs[np.newaxis, ...]


def _time_column(grid, values=None):
    values = times(grid) if values is None else np.asarray(values, dtype=float)
    return values.reshape([len(values)] + [1] * grid.n)


def _free_wave(f_hat, g_hat, a, t):
    """cos(at)f̂ + sin(at)/a ĝ and its time derivative, with the a → 0 limits"""
    positive = a > 0
    safe = np.where(positive, a, 1.0)
    cosine = np.cos(a * t)
    sine = np.sin(a * t)
    field = cosine * f_hat + np.where(positive, sine / safe, t) * g_hat
    velocity = -a * sine * f_hat + cosine * g_hat
    return field, velocity


def propagate(f, g, at_times=None):
    """
    W(f, g): the free wave with data (f, g) at t = 0

    Args:
        f (SpatialField): Position data
        g (SpatialField): Velocity data
        at_times (list of float or None): Sample times, the grid's own by default

    Returns:
        SpaceTimeField or np.ndarray: The spatial-Fourier field on the grid's times, or the
            spatial Fourier coefficients at the requested times
    """
    if f.grid != g.grid:
        raise ContractViolationException("Position and velocity data live on different grids")
    grid = f.grid
    t = _time_column(grid, at_times)
    field, _ = _free_wave(
        _spatial_coefficients(f), _spatial_coefficients(g), _angular_frequency(grid), t
    )
    if at_times is not None:
        return field
    return make_field(grid, field, SPATIAL_FOURIER)


def propagate_velocity(f, g):
    """∂_t W(f, g) on the grid's times, exact differentiation of the closed form"""
    grid = f.grid
    _, velocity = _free_wave(
        _spatial_coefficients(f),
        _spatial_coefficients(g),
        _angular_frequency(grid),
        _time_column(grid),
    )
    return make_field(grid, velocity, SPATIAL_FOURIER)


def half_wave(f, sign=1):
    """e^{±2πit|D|}f on the grid's times"""
    grid = f.grid
    phase = np.exp(sign * 1j * _angular_frequency(grid) * _time_column(grid))
    return make_field(grid, phase * _spatial_coefficients(f), SPATIAL_FOURIER)


def energy(u, velocity):
    """
    ‖∂_tu(t)‖² + ‖2π|D|u(t)‖² at every grid time

    Args:
        u (SpaceTimeField): The field
        velocity (SpaceTimeField): Its time derivative

    Returns:
        np.ndarray: One value per time sample
    """
    grid = u.grid
    _, dx = spacing(grid)
    field = convert(u, SPATIAL_FOURIER).coeffs * _angular_frequency(grid)
    rate = convert(velocity, SPATIAL_FOURIER).coeffs
    return dx**grid.n * (
        (np.abs(field) ** 2).reshape(grid.nt, -1).sum(axis=1)
        + (np.abs(rate) ** 2).reshape(grid.nt, -1).sum(axis=1)
    )


def duhamel(F):
    """
    □^{-1}F with zero Cauchy data, together with its exact time derivative

    The integral −∫₀^t sin(a(t−s))/a F̂(s) ds is split with the angle-difference formula into
    cumulative trapezoid integrals of cos(as)F̂ and sin(as)F̂.

    Args:
        F (SpaceTimeField): The source, any representation

    Returns:
        DuhamelSolution: The field and its velocity, both spatial-Fourier
    """
    grid = F.grid
    source = convert(F, SPATIAL_FOURIER).coeffs
    dt, _ = spacing(grid)
    a = _angular_frequency(grid)
    t = _time_column(grid)
    cosine = np.cos(a * t)
    sine = np.sin(a * t)
    integral_cos = cumulative_trapezoid(cosine * source, dx=dt, axis=0, initial=0)
    integral_sin = cumulative_trapezoid(sine * source, dx=dt, axis=0, initial=0)
    integral = cumulative_trapezoid(source, dx=dt, axis=0, initial=0)
    integral_t = cumulative_trapezoid(t * source, dx=dt, axis=0, initial=0)
    positive = a > 0
    safe = np.where(positive, a, 1.0)
    field = np.where(
        positive,
        -(sine * integral_cos - cosine * integral_sin) / safe,
        -(t * integral - integral_t),
    )
    velocity = np.where(
        positive, -(cosine * integral_cos + sine * integral_sin), -integral
    )
    return DuhamelSolution(
        field=make_field(grid, field, SPATIAL_FOURIER),
        velocity=make_field(grid, velocity, SPATIAL_FOURIER),
    )


def duhamel_inverse(F):
    """□^{-1}F with zero Cauchy data, spatial-Fourier representation"""
    return duhamel(F).field


def duhamel_velocity(F):
    """The exact time derivative of duhamel_inverse(F)"""
    return duhamel(F).velocity


def box(u):
    """□u applied spectrally, returned in the caller's representation"""
    transformed = convert(u, SPACETIME_FOURIER)
    result = make_field(
        u.grid, transformed.coeffs * wave_symbol(u.grid), SPACETIME_FOURIER
    )
    return convert(result, u.rep)


def xi_inverse(F, guard):
    """
    Ξ^{-1}F: division by 4π²(τ² − |ξ|²)

    Args:
        F (SpaceTimeField): The source, whose spectrum must avoid ||τ|−|ξ|| < guard
        guard (float): Width of the forbidden band around the cone

    Returns:
        SpaceTimeField: The quotient, in the caller's representation
    """
    if not guard > 0:
        raise ConfigurationException(f"The cone guard must be positive, got {guard}")
    grid = F.grid
    coeffs = convert(F, SPACETIME_FOURIER).coeffs
    scale = np.abs(coeffs).max() if coeffs.size else 0.0
    geometry = lattice_geometry(grid)
    inside = geometry.modulation < guard
    offending = inside & (np.abs(coeffs) > SPECTRAL_ZERO_TOLERANCE * scale) & (scale > 0)
    if np.any(offending):
        index = tuple(int(i) for i in np.argwhere(offending)[0])
        raise LightConeException(
            f"support touches light cone at {frequency_of(grid, index)} within guard {guard}"
        )
    symbol = wave_symbol(grid)
    safe = np.where(inside, 1.0, symbol)
    quotient = np.where(inside, 0.0, coeffs / safe)
    return convert(make_field(grid, quotient, SPACETIME_FOURIER), F.rep)


def _shell_weights(grid, lam):
    return cached_symbol(grid, SymbolSpec(kind=SHELL, lam=lam, profile=SHARP_PROFILE)).weights(
        grid
    )


def _shell_cone_weights(grid, lam, d):
    spec = SymbolSpec(kind=SHELL_CONE, lam=lam, d=d, profile=SHARP_PROFILE)
    return cached_symbol(grid, spec).weights(grid)


def f_decompose(u, lam, *, force_route=None):
    """
    Split S_λu into a free part, an X^{1/2}_{λ,1} part and a Y_λ part with zero Cauchy data

    Args:
        u (SpaceTimeField): The field, any representation
        lam (float): The shell
        force_route (str or None): Send every cone shell to "x" or "y" instead of the cheaper route

    Returns:
        FDecomposition: Parts in spatial-Fourier representation which sum to S_λu
    """
    if force_route is not None:
        parse_text_matching_options(VALID_ROUTES)(force_route)
    grid = u.grid
    coeffs = convert(u, SPACETIME_FOURIER).coeffs
    geometry = lattice_geometry(grid)
    shell = _shell_weights(grid, lam)
    free = coeffs * shell * geometry.residue
    xpart = np.zeros_like(coeffs)
    ypart = np.zeros_like(coeffs)
    components = f_lambda_components(u, lam)
    routes = {}
    for d in relevant_modulations(grid, lam):
        routes[d] = force_route or components.routes[d]
        piece = coeffs * _shell_cone_weights(grid, lam, d)
        if routes[d] == X_ROUTE:
            xpart = xpart + piece
        else:
            ypart = ypart + piece

    free_field = convert(make_field(grid, free, SPACETIME_FOURIER), SPATIAL_FOURIER)
    xpart_field = convert(make_field(grid, xpart, SPACETIME_FOURIER), SPATIAL_FOURIER)
    raw_ypart = convert(make_field(grid, ypart, SPACETIME_FOURIER), SPATIAL_FOURIER)
    source = box(raw_ypart)
    zeroed = duhamel(source)
    # the periodic Y piece minus its Cauchy-zeroed version solves the free equation
    correction = raw_ypart.coeffs - zeroed.field.coeffs
    free_field = make_field(grid, free_field.coeffs + correction, SPATIAL_FOURIER)
    log.info(
        "Decomposed shell %s: %s",
        lam,
        ", ".join(f"d={d}:{route}" for d, route in sorted(routes.items())),
    )
    return FDecomposition(
        free=free_field,
        xpart=xpart_field,
        ypart=zeroed.field,
        ypart_velocity=zeroed.velocity,
        source=source,
        routes=routes,
    )


def _trace_bins(grid, sign):
    """Signed τ index j and k(ξ) = rint(|ξ|T) on the space-time lattice"""
    geometry = lattice_geometry(grid)
    j = np.rint(geometry.tau * grid.period).astype(int)
    k = np.rint(geometry.xi_modulus * grid.period).astype(int)
    return j, j - sign * k


def trace_decompose(u, lam, sign):
    """
    Regroup S^±_λu by the rounded value of τ ∓ |ξ|

    Args:
        u (SpaceTimeField): A field supported in the shell λ and the half-space ±τ > 0
        lam (float): The shell
        sign (int): +1 or −1

    Returns:
        TraceFamily: Samples u^±_{λ,s} as spatial Fourier fields, keyed by s
    """
    if sign not in (1, -1):
        raise ConfigurationException(f"Sign must be +1 or -1, got {sign}")
    grid = u.grid
    coeffs = convert(u, SPACETIME_FOURIER).coeffs
    j, bins = _trace_bins(grid, sign)
    support = (_shell_weights(grid, lam) > 0) & (sign * j > 0)
    scale = np.abs(coeffs).max() if coeffs.size else 0.0
    outside = (~support) & (np.abs(coeffs) > SPECTRAL_ZERO_TOLERANCE * scale) & (scale > 0)
    if np.any(outside):
        index = tuple(int(i) for i in np.argwhere(outside)[0])
        raise ContractViolationException(
            f"Field has mass at {frequency_of(grid, index)} outside the shell {lam} "
            f"and half-space {'+' if sign > 0 else '-'}"
        )
    delta_s = 1 / grid.period
    factor = grid.period / math.sqrt(grid.nt)
    samples = {}
    for value in np.unique(bins[support]):
        mask = support & (bins == value)
        sample = (coeffs * mask).sum(axis=0) * factor
        samples[float(value) * delta_s] = make_spatial_field(grid, sample, FOURIER)
    return TraceFamily(
        sign=sign, lam=lam, grid=grid, spacing=delta_s, samples=samples
    )


def trace_reconstruct(family):
    """
    Inverse of trace_decompose

    Returns:
        SpaceTimeField: The field in spacetime-Fourier representation
    """
    grid = family.grid
    j, bins = _trace_bins(grid, family.sign)
    support = (_shell_weights(grid, family.lam) > 0) & (family.sign * j > 0)
    factor = math.sqrt(grid.nt) / grid.period
    coeffs = np.zeros(support.shape, dtype=complex)
    for s, sample in family.samples.items():
        value = int(round(s / family.spacing))
        mask = support & (bins == value)
        spread = np.broadcast_to(sample.coeffs[np.newaxis, ...], coeffs.shape)
        coeffs = coeffs + np.where(mask, spread * factor, 0.0)
    return make_field(grid, coeffs, SPACETIME_FOURIER)


def trace_mass(family):
    """Σ_s Δs‖u^±_{λ,s}‖_{L²}"""
    _, dx = spacing(family.grid)
    return float(
        family.spacing
        * sum(
            math.sqrt(dx**family.grid.n) * np.linalg.norm(sample.coeffs.ravel())
            for sample in family.samples.values()
        )
    )


def _check_lam(grid, lam):
    if matches_dyadic(lam, frequency_shells(grid)) is None:
        raise ConfigurationException(f"λ={lam} is not one of {frequency_shells(grid)}")


def division_identity_defect(G, lam, *, guard):
    """
    Relative defect of □^{-1}S_λG = Ξ^{-1}S_λG − W(Ξ^{-1}S_λG(0), ∂_tΞ^{-1}S_λG(0))

    Args:
        G (SpaceTimeField): A source whose S_λ part avoids the cone by guard
        lam (float): The shell
        guard (float): Cone guard for Ξ^{-1}

    Returns:
        float: ‖lhs − rhs‖_{L²L²} / ‖rhs‖_{L²L²}, of quadrature order
    """
    _check_lam(G.grid, lam)
    grid = G.grid
    localized = make_field(
        grid,
        convert(G, SPACETIME_FOURIER).coeffs * _shell_weights(grid, lam),
        SPACETIME_FOURIER,
    )
    periodic = xi_inverse(localized, guard)
    periodic_coeffs = periodic.coeffs
    rate = make_field(
        grid,
        periodic_coeffs * 2j * math.pi * lattice_geometry(grid).tau,
        SPACETIME_FOURIER,
    )
    position = convert(periodic, SPATIAL_FOURIER)
    velocity = convert(rate, SPATIAL_FOURIER)
    free = propagate(
        time_slice(position, 0), time_slice(velocity, 0)
    )
    rhs = position.coeffs - free.coeffs
    lhs = duhamel(localized).field.coeffs
    difference = make_field(grid, lhs - rhs, SPATIAL_FOURIER)
    reference = make_field(grid, rhs, SPATIAL_FOURIER)
    if l2_norm(reference) == 0:
        return 0.0
    return l2_norm(difference) / l2_norm(reference)


def _spatial_cover(grid, lam):
    """Spatial indicator of |ξ| < 2λ, which holds the ξ-support of S_λ"""
    if matches_dyadic(lam, frequency_shells(grid)) == len(frequency_shells(grid)) - 1:
        return np.ones(lattice_geometry(grid).xi_modulus.shape)
    return (lattice_geometry(grid).xi_modulus < 2 * lam).astype(float)


def commutator_identity_defect(G, lam):
    """
    Relative size of S_λ[S_λ, □^{-1}]G − S_λ[S_λ, □^{-1}]PG where P covers the ξ-support of S_λ

    Args:
        G (SpaceTimeField): The source
        lam (float): The shell

    Returns:
        float: Relative L²L² defect, zero up to rounding
    """
    _check_lam(G.grid, lam)
    grid = G.grid
    shell = _shell_weights(grid, lam)
    cover = _spatial_cover(grid, lam)

    def localize(coeffs, weights):
        return make_field(grid, coeffs * weights, SPACETIME_FOURIER)

    def commutator(coeffs):
        outer = convert(duhamel(make_field(grid, coeffs, SPACETIME_FOURIER)).field, SPACETIME_FOURIER)
        inner = convert(duhamel(localize(coeffs, shell)).field, SPACETIME_FOURIER)
        return (outer.coeffs * shell - inner.coeffs) * shell

    coeffs = convert(G, SPACETIME_FOURIER).coeffs
    full = commutator(coeffs)
    covered = commutator(coeffs * cover)
    reference = np.linalg.norm(full.ravel())
    if reference == 0:
        return 0.0
    return float(np.linalg.norm((full - covered).ravel()) / reference)


def physical_slice(u, index):
    """A time slice of any field as a physical SpatialField"""
    return spatial_convert(time_slice(convert(u, SPATIAL_FOURIER), index), PHYSICAL)
