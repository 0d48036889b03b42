"""Estimate harness: measured constants of the linear, inclusion and bilinear estimates"""
from collections import namedtuple
from functools import partial
import itertools
import logging
import math

import numpy as np
from scipy.optimize import minimize

from constants import (
    ANGULAR_RECONSTRUCTION,
    C_I,
    C_II,
    C_III,
    DEFAULT_CONE_CONSTANT,
    ENERGY,
    FAIL,
    FOURIER,
    GAUSSIAN_COMPLEX,
    HH,
    HL_A,
    HL_B,
    INCONCLUSIVE,
    LOCAL_STRICHARTZ,
    MIN_ENSEMBLE_COUNT,
    PASS,
    PHYSICAL,
    PROXY_FIDELITY,
    REJECTED,
    SHELL,
    SHELL_CONE,
    SHELL_CONE_ABOVE,
    SHELL_CONE_BELOW,
    SHELL_CONE_STRICTLY_BELOW,
    SPACETIME_FOURIER,
    SPATIAL,
    SPATIAL_BELOW,
    SPATIAL_FOURIER,
    SPECTRAL_ZERO_TOLERANCE,
    STRICHARTZ,
    UNIMODULAR_PHASE,
    VALID_AMPLITUDE_LAWS,
    VALID_INCLUSION_ITEMS,
    VALID_PRODUCT_KINDS,
    Y_L2,
    Y_OUTERBLOCK,
)
from exception import (
    ConfigurationException,
    HypothesisException,
    InadmissibleExponentsException,
    UnsupportedDimensionException,
)
from executor import gather_in_threads, run_in_thread
from grid_spectral import (
    convert,
    l2_norm,
    lattice_geometry,
    make_field,
    make_spatial_field,
    mixed_norm,
    space_time_shape,
    spatial_convert,
    spatial_l2_norm,
    spatial_shape,
    wave_symbol,
)
from lib import parse_text_matching_options
from multipliers import SHARP_PROFILE, SymbolSpec, cached_symbol
from spaces import (
    f_lambda_norm,
    fs_norm,
    g_lambda_norm,
    relevant_modulations,
    sector_ids,
    sector_pieces,
    shell_energy_profile,
    z_norm,
)
from support_geometry import bilinear_support_check
from wave_ops import half_wave, xi_inverse


log = logging.getLogger(__name__)


EnsembleSpec = namedtuple("EnsembleSpec", ["count", "localization", "law", "seed"])
EstimateReport = namedtuple(
    "EstimateReport",
    [
        "estimate_id",
        "params",
        "ratios",
        "max_ratio",
        "median_ratio",
        "ceiling",
        "verdict",
    ],
)

# estimates stated for 5 < n
HIGH_DIMENSION = 5
GRID_SEARCH_LIMIT = 4096
PROXY_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def make_ensemble_spec(*, count, localization, law=GAUSSIAN_COMPLEX, seed=0):
    """
    Validate and build an EnsembleSpec

    Args:
        count (int): Number of members, at least 8
        localization (SymbolSpec): The cell to populate
        law (str): gaussian-complex or unimodular-random-phase
        seed (int): Seed of the member stream

    Returns:
        EnsembleSpec: The spec
    """
    if not isinstance(count, int) or count < MIN_ENSEMBLE_COUNT:
        raise ConfigurationException(
            f"Ensembles need at least {MIN_ENSEMBLE_COUNT} members, got {count}"
        )
    parse_text_matching_options(VALID_AMPLITUDE_LAWS)(law)
    return EnsembleSpec(count=count, localization=localization, law=law, seed=seed)


def _amplitudes(rng, law, shape):
    if law == UNIMODULAR_PHASE:
        return np.exp(2j * math.pi * rng.uniform(size=shape))
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def make_ensemble(grid, spec):
    """
    Seeded random fields localized by a composite symbol

    Spatial localizations (P_λ, P_{•≤λ}) give SpatialFields, every other kind gives space-time
    fields in spacetime-Fourier representation.

    Args:
        grid (GridSpec): The grid
        spec (EnsembleSpec): The ensemble

    Returns:
        list: The members
    """
    rng = np.random.default_rng(spec.seed)
    symbol = cached_symbol(grid, spec.localization)
    members = []
    if spec.localization.kind in (SPATIAL, SPATIAL_BELOW):
        weights = symbol.spatial_weights(grid)
        for _ in range(spec.count):
            coeffs = _amplitudes(rng, spec.law, spatial_shape(grid)) * weights
            members.append(make_spatial_field(grid, coeffs, FOURIER))
    else:
        weights = symbol.weights(grid)
        for _ in range(spec.count):
            coeffs = _amplitudes(rng, spec.law, space_time_shape(grid)) * weights
            members.append(make_field(grid, coeffs, SPACETIME_FOURIER))
    return members


def _verdict(ratios, ceiling, n, *, high_dimension):
    if not ratios:
        return INCONCLUSIVE
    if high_dimension and n <= HIGH_DIMENSION:
        return None
    return PASS if max(ratios) <= ceiling else FAIL


def _report(estimate_id, params, values, ceiling, n, *, high_dimension=False):
    ratios = tuple(float(value) for value in values if value is not None)
    skipped = len(values) - len(ratios)
    if skipped:
        log.info("%s: skipped %s samples with a zero denominator", estimate_id, skipped)
    verdict = _verdict(ratios, ceiling, n, high_dimension=high_dimension)
    if verdict is None:
        log.warning(
            "%s measured in n=%s, outside the dimension range of the estimate, no verdict",
            estimate_id,
            n,
        )
    return EstimateReport(
        estimate_id=estimate_id,
        params=params,
        ratios=ratios,
        max_ratio=max(ratios) if ratios else None,
        median_ratio=float(np.median(ratios)) if ratios else None,
        ceiling=ceiling,
        verdict=verdict,
    )


def rejected_report(estimate_id, params, ceiling):
    """An EstimateReport for an estimate whose hypotheses do not hold"""
    return EstimateReport(
        estimate_id=estimate_id,
        params=params,
        ratios=(),
        max_ratio=None,
        median_ratio=None,
        ceiling=ceiling,
        verdict=REJECTED,
    )


def _ratio(numerator, denominator):
    if denominator == 0:
        return None
    return numerator / denominator


def _weights(grid, spec):
    return cached_symbol(grid, spec).weights(grid)


def _coefficients(u):
    return convert(u, SPACETIME_FOURIER).coeffs


def _physical(grid, coeffs):
    return convert(make_field(grid, coeffs, SPACETIME_FOURIER), PHYSICAL)


def _norm(grid, coeffs, q, r):
    return mixed_norm(_physical(grid, coeffs), q, r)


def check_admissible(q, r, n):
    """
    Raise unless (q, r) is wave admissible in dimension n

    Returns:
        float: γ = n/2 − n/r − 1/q
    """
    if not (2 <= q <= math.inf and 2 <= r <= math.inf):
        raise InadmissibleExponentsException(
            f"Exponents must lie in [2, ∞], got q={q}, r={r}"
        )
    sigma = (n - 1) / 2
    if 1 / q + sigma / r > sigma / 2 + 1e-12:
        raise InadmissibleExponentsException(
            f"1/q + σ/r ≤ σ/2 fails: 1/{q} + {sigma}/{r} > {sigma}/2"
        )
    if n == 3 and q == 2 and math.isinf(r):
        raise InadmissibleExponentsException("The endpoint (2, ∞) is excluded in n = 3")
    return n / 2 - n / r - 1 / q


def _strichartz_member(q, r, lam, gamma, f):
    grid = f.grid
    weights = cached_symbol(
        grid, SymbolSpec(kind=SPATIAL_BELOW, lam=lam)
    ).spatial_weights(grid)
    localized = make_spatial_field(grid, spatial_convert(f, FOURIER).coeffs * weights, FOURIER)
    evolved = convert(half_wave(localized, 1), PHYSICAL)
    return _ratio(mixed_norm(evolved, q, r), lam**gamma * spatial_l2_norm(localized))


async def strichartz_ratio(q, r, lam, ensemble, *, ceiling=math.inf, threads=1):
    """
    ‖e^{2πit|D|}P_{•≤λ}f‖_{L^qL^r} / (λ^γ‖P_{•≤λ}f‖_{L²}) over an ensemble of spatial data

    Args:
        q (float): Time exponent
        r (float): Space exponent
        lam (float): A spatial shell
        ensemble (list of SpatialField): The data
        ceiling (float): Largest accepted ratio
        threads (int): Pool size

    Returns:
        EstimateReport: One ratio per member
    """
    n = ensemble[0].grid.n
    gamma = check_admissible(q, r, n)
    values = await gather_in_threads(
        partial(_strichartz_member, q, r, lam, gamma), ensemble, threads=threads
    )
    params = {"q": q, "r": r, "lam": lam, "n": n, "gamma": gamma}
    return _report(STRICHARTZ, params, values, ceiling, n)


def _local_strichartz_member(lam, d, f):
    grid = f.grid
    ids, annulus, _ = sector_ids(grid, lam, d)
    coeffs = spatial_convert(f, FOURIER).coeffs
    evolved = convert(half_wave(make_spatial_field(grid, coeffs, FOURIER), 1), SPATIAL_FOURIER)
    scale = lam ** ((grid.n + 1) / 4) * d ** ((grid.n - 3) / 4)
    present = annulus & (np.abs(coeffs) > SPECTRAL_ZERO_TOLERANCE * np.abs(coeffs).max())
    largest = None
    squares = 0.0
    for omega in np.unique(ids[present]):
        mask = (ids == omega) & annulus
        block = make_spatial_field(grid, coeffs * mask, FOURIER)
        lhs = mixed_norm(
            convert(make_field(grid, evolved.coeffs * mask, SPATIAL_FOURIER), PHYSICAL),
            2,
            math.inf,
        )
        squares += lhs**2
        ratio = _ratio(lhs, scale * spatial_l2_norm(block))
        if ratio is not None:
            largest = ratio if largest is None else max(largest, ratio)
    total = spatial_l2_norm(make_spatial_field(grid, coeffs * annulus, FOURIER))
    return largest, _ratio(math.sqrt(squares), scale * total)


async def local_strichartz_ratio(lam, d, ensemble, *, ceiling=math.inf, threads=1):
    """
    ‖e^{2πit|D|}B^ωf‖_{L²L^∞} / (λ^{(n+1)/4}d^{(n−3)/4}‖B^ωf‖_{L²}), sectors of size (λd)^{1/2}

    The square-summed variant over all sectors is reported in params.

    Args:
        lam (float): The frequency scale
        d (float): The modulation scale, at most λ
        ensemble (list of SpatialField): The data, n ≥ 2
        ceiling (float): Largest accepted ratio
        threads (int): Pool size

    Returns:
        EstimateReport: The largest sector ratio per member
    """
    n = ensemble[0].grid.n
    if n == 1:
        raise UnsupportedDimensionException("Local Strichartz estimates need n ≥ 2")
    values = await gather_in_threads(
        partial(_local_strichartz_member, lam, d), ensemble, threads=threads
    )
    summed = [value[1] for value in values if value[1] is not None]
    params = {
        "lam": lam,
        "d": d,
        "n": n,
        "square_summed_max": max(summed) if summed else None,
    }
    return _report(
        LOCAL_STRICHARTZ, params, [value[0] for value in values], ceiling, n, high_dimension=True
    )


def angular_reconstruction_ratio(u, lam, d):
    """
    max of (Σ_ω‖S^ω_{λ,d}u‖²)^{1/2}/‖S_{λ,d}u‖ in L²L² and the same for □ in L¹L²

    Returns:
        float or None: The ratio, None when S_{λ,d}u vanishes
    """
    grid = u.grid
    coeffs = _coefficients(u)
    cell = coeffs * _weights(grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d))
    box = wave_symbol(grid)
    x_squares = 0.0
    y_squares = 0.0
    for _, piece in sector_pieces(u, lam, d, coeffs=coeffs):
        x_squares += l2_norm(make_field(grid, piece, SPACETIME_FOURIER)) ** 2
        y_squares += _norm(grid, piece * box, 1, 2) ** 2
    x_ratio = _ratio(math.sqrt(x_squares), l2_norm(make_field(grid, cell, SPACETIME_FOURIER)))
    y_ratio = _ratio(math.sqrt(y_squares), _norm(grid, cell * box, 1, 2))
    ratios = [value for value in (x_ratio, y_ratio) if value is not None]
    return max(ratios) if ratios else None


def y_l2_ratio(u, lam, d):
    """d^{1/2}‖S_{λ,d}u‖_{L²L²} / ‖u‖_{Y_λ}"""
    grid = u.grid
    coeffs = _coefficients(u)
    cell = coeffs * _weights(grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d))
    shell = coeffs * _weights(grid, SymbolSpec(kind=SHELL, lam=lam))
    y_value = _norm(grid, shell * wave_symbol(grid), 1, 2) / lam
    return _ratio(math.sqrt(d) * l2_norm(make_field(grid, cell, SPACETIME_FOURIER)), y_value)


def y_outerblock_ratio(u, lam, d):
    """
    ‖Ξ^{-1}F‖_{Z_λ} / (λ^{(n−4)/2}(d/λ)^{(n−5)/4}‖F‖_{L¹L²}) with F = □S_{λ,d}u

    Raises:
        HypothesisException: In n ≤ 4
    """
    grid = u.grid
    if grid.n <= 4:
        raise HypothesisException(f"{Y_OUTERBLOCK}: needs n ≥ 5, got n={grid.n}")
    cell = _coefficients(u) * _weights(grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d))
    source = make_field(grid, _off_cone(grid, cell * wave_symbol(grid), d), SPACETIME_FOURIER)
    divided = xi_inverse(source, d)
    scale = lam ** ((grid.n - 4) / 2) * (d / lam) ** ((grid.n - 5) / 4)
    return _ratio(z_norm(divided, lam), scale * _norm(grid, source.coeffs, 1, 2))


def _off_cone(grid, coeffs, guard):
    """
    Drop the coefficients with ||τ|−|ξ|| < guard

    The lowest cone shell reaches down to the cone itself, where Ξ^{-1} is undefined.
    """
    return coeffs * (lattice_geometry(grid).modulation >= guard)


def energy_ratio(u, s=0.0):
    """
    sup_t (Σ_λ λ^{2s}‖P_λu(t)‖²)^{1/2} / ‖u‖_{F^s}

    The numerator uses spatial shells on each time slice while F^s is built from space-time
    shells, so free waves give one and fields mixing temporal frequencies can exceed it.
    """
    return _ratio(float(shell_energy_profile(u, s).max()), fs_norm(u, s))


INCLUSION_FUNCTIONS = {
    ANGULAR_RECONSTRUCTION: lambda u, lam, d, s: angular_reconstruction_ratio(u, lam, d),
    Y_L2: lambda u, lam, d, s: y_l2_ratio(u, lam, d),
    Y_OUTERBLOCK: lambda u, lam, d, s: y_outerblock_ratio(u, lam, d),
    ENERGY: lambda u, lam, d, s: energy_ratio(u, s),
}


async def inclusion_checks(
    ensemble, lam, d, *, items=None, s=0.0, ceiling=math.inf, threads=1
):
    """
    Run the inclusion estimates on an ensemble of space-time fields

    Items whose hypotheses fail are reported with verdict "rejected".

    Args:
        ensemble (list of SpaceTimeField): The fields
        lam (float): The shell
        d (float): The cone shell
        items (list of str or None): Which estimates, all by default
        s (float): Regularity of the energy estimate
        ceiling (float): Largest accepted ratio
        threads (int): Pool size

    Returns:
        dict: Estimate id to EstimateReport
    """
    items = list(VALID_INCLUSION_ITEMS if items is None else items)
    for item in items:
        parse_text_matching_options(VALID_INCLUSION_ITEMS)(item)
    n = ensemble[0].grid.n
    params = {"lam": lam, "d": d, "n": n, "s": float(s)}
    reports = {}
    for item in items:
        func = INCLUSION_FUNCTIONS[item]
        try:
            if item == ANGULAR_RECONSTRUCTION and n == 1:
                raise UnsupportedDimensionException(
                    f"{item}: angular sectors need n ≥ 2"
                )
            values = await gather_in_threads(
                partial(_call_inclusion, func, lam, d, s), ensemble, threads=threads
            )
        except (HypothesisException, UnsupportedDimensionException) as ex:
            log.warning("Rejected %s: %s", item, ex)
            reports[item] = rejected_report(item, params, ceiling)
            continue
        reports[item] = _report(
            item, params, values, ceiling, n, high_dimension=item == Y_OUTERBLOCK
        )
    return reports


def _call_inclusion(func, lam, d, s, u):
    return func(u, lam, d, s)


def _derivative(grid, coeffs, axis=0):
    """Spectral ∂_{x_axis} of space-time coefficients"""
    return coeffs * 2j * math.pi * lattice_geometry(grid).xi[axis]


def _product(grid, first, second):
    """Space-time coefficients of first · ∂_1 second"""
    values = _physical(grid, first).coeffs * _physical(grid, _derivative(grid, second)).coeffs
    return _coefficients(make_field(grid, values, PHYSICAL))


def _check_product_hypotheses(kind, lam, mu):
    if kind == HH:
        if max(lam, mu) > 2 * min(lam, mu):
            raise HypothesisException(f"{kind}: needs λ ∼ μ, got λ={lam}, μ={mu}")
    elif lam / mu < 8:
        raise HypothesisException(f"{kind}: needs λ/μ ≥ 8, got λ={lam}, μ={mu}")


def _sector_square_sum(u, mu, d):
    grid = u.grid
    return math.sqrt(
        sum(
            _norm(grid, piece, 1, math.inf) ** 2
            for _, piece in sector_pieces(u, mu, d)
        )
    )


def _product_member(kind, lam, mu, c, pair):
    """Largest LHS/RHS over the per-d variants of one (u, v) pair"""
    u, v = pair
    grid = u.grid
    n = grid.n
    uc, vc = _coefficients(u), _coefficients(v)
    threshold = c * mu

    def localized(coeffs, **spec):
        return coeffs * _weights(grid, SymbolSpec(**spec))

    if kind == HH:
        product = _product(grid, localized(uc, kind=SHELL, lam=mu), localized(vc, kind=SHELL, lam=mu))
        lhs = _norm(grid, localized(product, kind=SHELL, lam=lam), 1, 2) / lam
        rhs = mu ** (n / 2) / lam * f_lambda_norm(u, mu) * f_lambda_norm(v, mu)
        return _ratio(lhs, rhs)
    if kind == HL_A:
        product = _product(
            grid,
            localized(uc, kind=SHELL, lam=mu),
            localized(vc, kind=SHELL_CONE_ABOVE, lam=lam, d=threshold),
        )
        lhs = _norm(grid, localized(product, kind=SHELL, lam=lam), 1, 2) / lam
        rhs = mu ** ((n - 2) / 2) * f_lambda_norm(u, mu) * f_lambda_norm(v, lam)
        return _ratio(lhs, rhs)

    ratios = []
    if kind == HL_B:
        product = _product(
            grid,
            localized(uc, kind=SHELL, lam=mu),
            localized(vc, kind=SHELL_CONE_STRICTLY_BELOW, lam=lam, d=threshold),
        )
        norms = g_lambda_norm(u, mu) * f_lambda_norm(v, lam)
        for d in relevant_modulations(grid, lam):
            if d < threshold:
                continue
            piece = make_field(
                grid,
                _off_cone(grid, localized(product, kind=SHELL_CONE, lam=lam, d=d), d),
                SPACETIME_FOURIER,
            )
            lhs = l2_norm(xi_inverse(piece, d))
            ratios.append(_ratio(lhs, mu ** ((n - 1) / 2) / d * norms))
    elif kind in (C_I, C_II):
        norms = f_lambda_norm(u, mu) * f_lambda_norm(v, lam)
        for d in relevant_modulations(grid, mu):
            if d >= threshold:
                continue
            low = localized(uc, kind=SHELL_CONE_BELOW, lam=mu, d=d)
            decay = mu ** ((n - 2) / 2) * (d / mu) ** ((n - 5) / 4)
            if kind == C_I:
                product = _product(grid, low, localized(vc, kind=SHELL_CONE_BELOW, lam=lam, d=d))
                piece = make_field(
                    grid,
                    _off_cone(grid, localized(product, kind=SHELL_CONE, lam=lam, d=d), d),
                    SPACETIME_FOURIER,
                )
                lhs = l2_norm(xi_inverse(piece, d))
                ratios.append(_ratio(lhs, d ** -0.5 * decay * norms))
            else:
                product = _product(grid, low, localized(vc, kind=SHELL_CONE, lam=lam, d=d))
                lhs = _norm(
                    grid, localized(product, kind=SHELL_CONE_STRICTLY_BELOW, lam=lam, d=d), 1, 2
                )
                ratios.append(_ratio(lhs, lam * decay * norms))
    else:
        if n == 1:
            raise UnsupportedDimensionException(f"{kind}: angular sectors need n ≥ 2")
        v_norm = f_lambda_norm(v, lam)
        for d in relevant_modulations(grid, mu):
            if d > mu:
                continue
            cut = min(threshold, d)
            middle = localized(uc, kind=SHELL_CONE, lam=mu, d=d)
            product = _product(
                grid, middle, localized(vc, kind=SHELL_CONE_STRICTLY_BELOW, lam=lam, d=cut)
            )
            lhs = _norm(
                grid, localized(product, kind=SHELL_CONE_STRICTLY_BELOW, lam=lam, d=cut), 1, 2
            )
            rhs = lam * _sector_square_sum(u, mu, d) * v_norm
            ratios.append(_ratio(lhs, rhs))
    ratios = [value for value in ratios if value is not None]
    return max(ratios) if ratios else None


async def product_estimate_check(
    kind, lam, mu, pairs, *, c=DEFAULT_CONE_CONSTANT, ceiling=math.inf, threads=1
):
    """
    LHS/RHS of one case of the bilinear estimates over pairs of space-time fields

    Args:
        kind (str): HH, HL-A, HL-B, C_I, C_II or C_III
        lam (float): The output frequency
        mu (float): The low frequency
        pairs (list of tuple): (u, v) fields
        c (float): The small cone constant
        ceiling (float): Largest accepted ratio
        threads (int): Pool size

    Returns:
        EstimateReport: The largest per-d ratio per pair

    Raises:
        HypothesisException: When the frequencies do not match the case
    """
    parse_text_matching_options(VALID_PRODUCT_KINDS)(kind)
    _check_product_hypotheses(kind, lam, mu)
    n = pairs[0][0].grid.n
    values = await gather_in_threads(
        partial(_product_member, kind, lam, mu, c), pairs, threads=threads
    )
    params = {"kind": kind, "lam": lam, "mu": mu, "c": c, "n": n}
    return _report(kind, params, values, ceiling, n, high_dimension=True)


async def support_check(lemma, lam, mu, d, **kwargs):
    """bilinear_support_check on a worker thread"""
    return await run_in_thread(partial(bilinear_support_check, lemma, lam, mu, d, **kwargs))


def stability_ratio(reports):
    """
    max/min of the max ratios of comparable reports, the operational form of ≲ under scaling

    Returns:
        float: At least one, nan when fewer than two reports have a positive max ratio
    """
    values = [
        report.max_ratio
        for report in reports
        if report.max_ratio is not None and report.max_ratio > 0
    ]
    if len(values) < 2:
        return math.nan
    return max(values) / min(values)


def _proxy_terms(u, lam):
    """X_d, Y_d and the physical □S_{λ,d}u for the cone shells carrying mass"""
    grid = u.grid
    coeffs = _coefficients(u)
    box = wave_symbol(grid)
    x_terms, y_terms, boxed = [], [], []
    for d in relevant_modulations(grid, lam):
        piece = coeffs * _weights(grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d))
        if not np.any(piece):
            continue
        physical = _physical(grid, piece * box).coeffs
        x_terms.append(math.sqrt(d) * l2_norm(make_field(grid, piece, SPACETIME_FOURIER)))
        y_terms.append(mixed_norm(make_field(grid, physical, PHYSICAL), 1, 2) / lam)
        boxed.append(physical)
    return np.array(x_terms), np.array(y_terms), boxed


def _split_cost(theta, x_terms, boxed, grid, lam):
    """X share θ_d·X_d plus the Y norm of the remaining pieces taken together"""
    theta = np.clip(theta, 0.0, 1.0)
    remainder = sum((1 - weight) * piece for weight, piece in zip(theta, boxed))
    y_value = mixed_norm(make_field(grid, remainder, PHYSICAL), 1, 2) / lam
    return float(np.dot(theta, x_terms) + y_value)


def _proxy_member(lam, u):
    grid = u.grid
    x_terms, y_terms, boxed = _proxy_terms(u, lam)
    if not boxed:
        return None
    proxy = float(np.minimum(x_terms, y_terms).sum())
    cost = partial(_split_cost, x_terms=x_terms, boxed=boxed, grid=grid, lam=lam)
    size = len(boxed)
    if len(PROXY_LEVELS) ** size <= GRID_SEARCH_LIMIT:
        start = min(
            (np.array(point) for point in itertools.product(PROXY_LEVELS, repeat=size)),
            key=cost,
        )
    else:
        start = (x_terms <= y_terms).astype(float)
    result = minimize(cost, start, method="Powell", bounds=[(0.0, 1.0)] * size)
    oracle = min(float(result.fun), cost(start))
    return _ratio(proxy, oracle)


async def proxy_fidelity(grid, lam, count, seed, *, threads=1):
    """
    Σ_d min(X_d, Y_d) against the infimum over convex X/Y splittings of each cone shell

    Args:
        grid (GridSpec): The grid
        lam (float): The shell
        count (int): Ensemble size
        seed (int): Ensemble seed
        threads (int): Pool size

    Returns:
        EstimateReport: proxy/oracle per member, at least one
    """
    spec = make_ensemble_spec(
        count=count, localization=SymbolSpec(kind=SHELL, lam=lam, profile=SHARP_PROFILE), seed=seed
    )
    ensemble = make_ensemble(grid, spec)
    values = await gather_in_threads(partial(_proxy_member, lam), ensemble, threads=threads)
    params = {"lam": lam, "count": count, "seed": seed, "n": grid.n}
    return _report(PROXY_FIDELITY, params, values, math.inf, grid.n)

