"""Dyadic X, Y, Z, F and G norms, their superstructures and the Besov data norm"""
from collections import namedtuple
from fractions import Fraction
from functools import lru_cache
import logging
import math

import numpy as np

from constants import (
    MODULATION_GUARD,
    PHYSICAL,
    SHELL,
    SHELL_CONE,
    SPACETIME_FOURIER,
    SPATIAL,
    SPATIAL_FOURIER,
    SYSTEM_SIGMAS,
    VALID_SYSTEMS,
    X_ROUTE,
    Y_ROUTE,
    FOURIER,
)
from exception import ConfigurationException, UnsupportedDimensionException
from grid_spectral import (
    cone_shells,
    convert,
    frequency_shells,
    from_spacetime_fourier,
    make_field,
    mixed_norm,
    spacing,
    spatial_convert,
    spatial_mesh,
    spatial_shells,
    wave_symbol,
    xi_modulus,
)
from lib import parse_rational, parse_text_matching_options
from multipliers import (
    SHARP_PROFILE,
    SymbolSpec,
    angular_partition,
    assign_directions,
    cached_symbol,
    sector_count,
    sector_scale,
)


log = logging.getLogger(__name__)


SchematicParams = namedtuple("SchematicParams", ["system", "sigma", "s_c"])
NormRow = namedtuple("NormRow", ["norm", "lam", "d", "value"])
DyadicNormTable = namedtuple("DyadicNormTable", ["rows", "grid", "profile", "s"])
FComponents = namedtuple("FComponents", ["energy", "x_terms", "y_terms", "routes"])


def schematic_params(system, n, *, s_c=None):
    """
    Scaling data for a nonlinear system

    Args:
        system (str): One of the schematic systems
        n (int): Spatial dimension
        s_c (list or None): Override for the critical exponents

    Returns:
        SchematicParams: σ per component and s_c = n/2 − σ
    """
    parse_text_matching_options(VALID_SYSTEMS)(system)
    sigma = tuple(Fraction(value) for value in SYSTEM_SIGMAS[system])
    derived = tuple(Fraction(n, 2) - value for value in sigma)
    if s_c is None:
        return SchematicParams(system=system, sigma=sigma, s_c=derived)
    if not isinstance(s_c, (list, tuple)):
        s_c = [s_c]
    override = tuple(parse_rational(value) for value in s_c)
    if len(override) != len(sigma):
        raise ConfigurationException(
            f"{system} has {len(sigma)} components but s_c has {len(override)} entries"
        )
    if override != derived:
        log.warning(
            "s_c override %s differs from n/2 - sigma = %s for %s",
            [str(value) for value in override],
            [str(value) for value in derived],
            system,
        )
    return SchematicParams(system=system, sigma=sigma, s_c=override)


def _coefficients(u):
    return convert(u, SPACETIME_FOURIER).coeffs


def _coefficient_l2(grid, coeffs):
    dt, dx = spacing(grid)
    return float(math.sqrt(dt * dx**grid.n) * np.linalg.norm(coeffs.ravel()))


def _physical_norm(grid, coeffs, q, r):
    field = make_field(grid, coeffs, SPACETIME_FOURIER)
    return mixed_norm(from_spacetime_fourier(field, PHYSICAL), q, r)


def relevant_modulations(grid, lam):
    """Cone shells d which can meet the shell λ"""
    return [d for d in cone_shells(grid) if d <= MODULATION_GUARD * lam]


def _shell_weights(grid, lam, profile):
    return cached_symbol(grid, SymbolSpec(kind=SHELL, lam=lam, profile=profile)).weights(
        grid
    )


def _shell_cone_weights(grid, lam, d, profile):
    spec = SymbolSpec(kind=SHELL_CONE, lam=lam, d=d, profile=profile)
    return cached_symbol(grid, spec).weights(grid)


def x_half_terms(u, lam, *, profile=SHARP_PROFILE):
    """
    d^{1/2}‖S_{λ,d}u‖_{L²L²} per cone shell

    Returns:
        dict: d to the weighted term
    """
    coeffs = _coefficients(u)
    return {
        d: math.sqrt(d)
        * _coefficient_l2(u.grid, coeffs * _shell_cone_weights(u.grid, lam, d, profile))
        for d in relevant_modulations(u.grid, lam)
    }


def x_half_norm(u, lam, p=1, *, profile=SHARP_PROFILE):
    """
    X^{1/2}_{λ,p}: (Σ_d d^{p/2}‖S_{λ,d}u‖^p_{L²L²})^{1/p}

    Args:
        u (SpaceTimeField): The field, any representation
        lam (float): The shell
        p (float): 1, 2 or ∞
        profile (CutoffProfile): The cutoff profile

    Returns:
        float: The norm, which ignores the cone residue
    """
    terms = np.array(list(x_half_terms(u, lam, profile=profile).values()))
    if terms.size == 0:
        return 0.0
    if math.isinf(p):
        return float(terms.max())
    return float((terms**p).sum() ** (1 / p))


def y_norm(u, lam, *, profile=SHARP_PROFILE):
    """Y_λ: λ^{-1}‖□S_λu‖_{L¹L²}"""
    coeffs = _coefficients(u) * _shell_weights(u.grid, lam, profile)
    return _physical_norm(u.grid, coeffs * wave_symbol(u.grid), 1, 2) / lam


def f_lambda_components(u, lam, *, profile=SHARP_PROFILE):
    """
    The pieces of F_λ: ‖S_λu‖_{L^∞L²} and the two routes per cone shell

    Returns:
        FComponents: energy term, X and Y terms per d, and the cheaper route per d
    """
    grid = u.grid
    coeffs = _coefficients(u)
    localized = coeffs * _shell_weights(grid, lam, profile)
    energy = _physical_norm(grid, localized, math.inf, 2)
    box = wave_symbol(grid)
    x_terms, y_terms, routes = {}, {}, {}
    for d in relevant_modulations(grid, lam):
        piece = coeffs * _shell_cone_weights(grid, lam, d, profile)
        x_terms[d] = math.sqrt(d) * _coefficient_l2(grid, piece)
        y_terms[d] = _physical_norm(grid, piece * box, 1, 2) / lam
        routes[d] = X_ROUTE if x_terms[d] <= y_terms[d] else Y_ROUTE
    return FComponents(energy=energy, x_terms=x_terms, y_terms=y_terms, routes=routes)


def _route_sum(components):
    return sum(
        min(components.x_terms[d], components.y_terms[d]) for d in components.x_terms
    )


def f_lambda_norm(u, lam, *, profile=SHARP_PROFILE):
    """
    F_λ: max(‖S_λu‖_{L^∞L²}, Σ_d min(X_d, Y_d))

    The per-shell minimum assigns each cone shell wholly to one summand of X + Y, so it bounds
    the sum-space norm from above.
    """
    components = f_lambda_components(u, lam, profile=profile)
    return max(components.energy, _route_sum(components))


@lru_cache(maxsize=64)
def sector_ids(grid, lam, d):
    """Sector id and annulus membership per spatial lattice point"""
    sectors = angular_partition(lam, sector_scale(lam, d), n=grid.n)
    xi = spatial_mesh(grid)
    shape = np.broadcast(*xi).shape
    vectors = np.stack([np.broadcast_to(component, shape) for component in xi], axis=-1)
    ids = assign_directions(sectors, vectors.reshape(-1, grid.n)).reshape(shape)
    xi_abs = xi_modulus(xi)
    annulus = (xi_abs >= lam / 2) & (xi_abs < 4 * lam)
    return ids, np.broadcast_to(annulus, shape), sector_count(sectors)


def sector_pieces(u, lam, d, *, profile=SHARP_PROFILE, coeffs=None):
    """
    Yield (ω, coefficients of S^ω_{λ,d}u) for the sectors carrying mass

    Args:
        u (SpaceTimeField): The field
        lam (float): The shell
        d (float): The cone shell
        profile (CutoffProfile): The cutoff profile
        coeffs (np.ndarray or None): Precomputed space-time coefficients to localize instead of u
    """
    grid = u.grid
    if grid.n == 1:
        raise UnsupportedDimensionException(
            "Angular sectors need at least two spatial dimensions"
        )
    if coeffs is None:
        coeffs = _coefficients(u)
    piece = coeffs * _shell_cone_weights(grid, lam, d, profile)
    ids, annulus, _ = sector_ids(grid, lam, d)
    present = np.any(piece != 0, axis=0) & annulus
    for omega in np.unique(ids[present]):
        mask = (ids == omega) & annulus
        yield int(omega), piece * mask[np.newaxis, ...]


def z_norm(u, lam, *, profile=SHARP_PROFILE):
    """
    Z_λ: λ^{(2−n)/2} Σ_d (Σ_ω ‖S^ω_{λ,d}u‖²_{L¹L^∞})^{1/2}

    Args:
        u (SpaceTimeField): The field, any representation
        lam (float): The shell
        profile (CutoffProfile): The cutoff profile

    Returns:
        float: The outer block norm
    """
    grid = u.grid
    if grid.n == 1:
        raise UnsupportedDimensionException("Z_λ has no angular structure in n = 1")
    coeffs = _coefficients(u)
    total = 0.0
    for d in relevant_modulations(grid, lam):
        squares = sum(
            _physical_norm(grid, piece, 1, math.inf) ** 2
            for _, piece in sector_pieces(u, lam, d, profile=profile, coeffs=coeffs)
        )
        total += math.sqrt(squares)
    return lam ** ((2 - grid.n) / 2) * total


def g_lambda_norm(u, lam, *, profile=SHARP_PROFILE):
    """G_λ: max(F_λ, Z_λ); in one dimension Z_λ is not defined and G_λ = F_λ"""
    f_value = f_lambda_norm(u, lam, profile=profile)
    if u.grid.n == 1:
        return f_value
    return max(f_value, z_norm(u, lam, profile=profile))


def sum_form_norm(u, lam, *, profile=SHARP_PROFILE):
    """
    Sum-form intersections, reported next to the max forms

    Returns:
        tuple: (F_λ as energy + routes, G_λ as that plus Z_λ)
    """
    components = f_lambda_components(u, lam, profile=profile)
    f_sum = components.energy + _route_sum(components)
    if u.grid.n == 1:
        return f_sum, f_sum
    return f_sum, f_sum + z_norm(u, lam, profile=profile)


def fs_norm(u, s, *, profile=SHARP_PROFILE):
    """F^s: (Σ_λ λ^{2s}‖u‖²_{F_λ})^{1/2}"""
    s = float(s)
    return math.sqrt(
        sum(
            lam ** (2 * s) * f_lambda_norm(u, lam, profile=profile) ** 2
            for lam in frequency_shells(u.grid)
        )
    )


def gs_norm(u, s, *, profile=SHARP_PROFILE):
    """G^s: Σ_λ λ^s‖u‖_{G_λ}"""
    s = float(s)
    return sum(
        lam**s * g_lambda_norm(u, lam, profile=profile)
        for lam in frequency_shells(u.grid)
    )


def _spatial_shell_norms(grid, coeffs, lam, profile):
    """‖P_λ·‖_{L²} of spatial Fourier coefficients, over any leading axes"""
    spec = SymbolSpec(kind=SPATIAL, lam=lam, profile=profile)
    weights = cached_symbol(grid, spec).spatial_weights(grid)
    _, dx = spacing(grid)
    localized = (coeffs * weights).reshape(coeffs.shape[: coeffs.ndim - grid.n] + (-1,))
    return math.sqrt(dx**grid.n) * np.linalg.norm(localized, axis=-1)


def _besov_sum(grid, f_coeffs, g_coeffs, s, profile):
    s = float(s)
    total = 0.0
    for lam in spatial_shells(grid):
        total = total + lam**s * _spatial_shell_norms(grid, f_coeffs, lam, profile)
        total = total + lam ** (s - 1) * _spatial_shell_norms(grid, g_coeffs, lam, profile)
    return total


def besov_data_norm(f, g, s, *, profile=SHARP_PROFILE):
    """
    Ḃ^{s,1} × Ḃ^{s−1,1}: Σ_λ λ^s‖P_λf‖_{L²} + Σ_λ λ^{s−1}‖P_λg‖_{L²}

    Args:
        f (SpatialField): Position data
        g (SpatialField): Velocity data
        s (float): Regularity

    Returns:
        float: The data norm
    """
    f_coeffs = spatial_convert(f, FOURIER).coeffs
    g_coeffs = spatial_convert(g, FOURIER).coeffs
    return float(_besov_sum(f.grid, f_coeffs, g_coeffs, s, profile))


def _homogeneous_weights(grid, s):
    xi_abs = np.broadcast_to(xi_modulus(spatial_mesh(grid)), (grid.nx,) * grid.n)
    weights = np.zeros(xi_abs.shape)
    np.power(xi_abs, float(s), out=weights, where=xi_abs > 0)
    return weights


def sobolev_norm(f, s):
    """Ḣ^s: ‖|ξ|^s f̂‖_{L²}, the ξ = 0 mode excluded"""
    coeffs = spatial_convert(f, FOURIER).coeffs
    _, dx = spacing(f.grid)
    weighted = coeffs * _homogeneous_weights(f.grid, s)
    return float(math.sqrt(dx**f.grid.n) * np.linalg.norm(weighted.ravel()))


def _slices(u):
    return convert(u, SPATIAL_FOURIER).coeffs


def solution_profile(phi, velocity, s, *, profile=SHARP_PROFILE):
    """
    t ↦ ‖φ(t)‖_{Ḃ^{s,1}} + ‖∂_tφ(t)‖_{Ḃ^{s−1,1}} at every grid time

    Returns:
        np.ndarray: One value per time sample
    """
    return np.asarray(
        _besov_sum(phi.grid, _slices(phi), _slices(velocity), s, profile), dtype=float
    )


def shell_energy_profile(u, s, *, profile=SHARP_PROFILE):
    """
    t ↦ (Σ_λ λ^{2s}‖P_λu(t)‖²_{L²})^{1/2} over the spatial shells, at every grid time

    Returns:
        np.ndarray: One value per time sample
    """
    grid = u.grid
    coeffs = _slices(u)
    s = float(s)
    total = np.zeros(grid.nt)
    for lam in spatial_shells(grid):
        total += lam ** (2 * s) * _spatial_shell_norms(grid, coeffs, lam, profile) ** 2
    return np.sqrt(total)


def sobolev_profile(phi, velocity, s):
    """t ↦ ‖φ(t)‖_{Ḣ^s} + ‖∂_tφ(t)‖_{Ḣ^{s−1}}"""
    grid = phi.grid
    _, dx = spacing(grid)
    measure = math.sqrt(dx**grid.n)
    first = _slices(phi) * _homogeneous_weights(grid, s)
    second = _slices(velocity) * _homogeneous_weights(grid, float(s) - 1)
    return measure * (
        np.linalg.norm(first.reshape(grid.nt, -1), axis=1)
        + np.linalg.norm(second.reshape(grid.nt, -1), axis=1)
    )


def norm_table(u, s, *, profile=SHARP_PROFILE):
    """
    Evaluate every dyadic norm of a field

    Empty (λ, d) cells are reported with value None rather than zero.

    Args:
        u (SpaceTimeField): The field
        s (float): Regularity for the F^s and G^s totals
        profile (CutoffProfile): The cutoff profile

    Returns:
        DyadicNormTable: One row per norm component
    """
    grid = u.grid
    rows = []
    for lam in frequency_shells(grid):
        components = f_lambda_components(u, lam, profile=profile)
        for d in components.x_terms:
            empty = not np.any(_shell_cone_weights(grid, lam, d, profile))
            rows.append(
                NormRow("x_half", lam, d, None if empty else components.x_terms[d])
            )
            rows.append(NormRow("y", lam, d, None if empty else components.y_terms[d]))
        f_value = max(components.energy, _route_sum(components))
        f_sum = components.energy + _route_sum(components)
        z_value = None if grid.n == 1 else z_norm(u, lam, profile=profile)
        rows.extend(
            [
                NormRow("energy", lam, None, components.energy),
                NormRow("x_half", lam, None, sum(components.x_terms.values())),
                NormRow("y", lam, None, y_norm(u, lam, profile=profile)),
                NormRow("z", lam, None, z_value),
                NormRow("f", lam, None, f_value),
                NormRow("g", lam, None, f_value if z_value is None else max(f_value, z_value)),
                NormRow("f_sum", lam, None, f_sum),
                NormRow("g_sum", lam, None, f_sum if z_value is None else f_sum + z_value),
            ]
        )
    f_values = {row.lam: row.value for row in rows if row.norm == "f"}
    g_values = {row.lam: row.value for row in rows if row.norm == "g"}
    s_value = float(s)
    rows.append(
        NormRow(
            "fs",
            None,
            None,
            math.sqrt(sum(lam ** (2 * s_value) * value**2 for lam, value in f_values.items())),
        )
    )
    rows.append(
        NormRow("gs", None, None, sum(lam**s_value * value for lam, value in g_values.items()))
    )
    return DyadicNormTable(rows=tuple(rows), grid=grid, profile=profile, s=s)
