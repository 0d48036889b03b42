"""Periodic space-time grids, unitary transforms and mixed Lebesgue norms"""
from collections import namedtuple
from functools import lru_cache
import math

import numpy as np
from scipy import fft

from constants import (
    CONE_RESIDUE_TOLERANCE,
    FOURIER,
    HIGHER_DIMENSION_LIMIT,
    MEMORY_BUDGET_POINTS,
    PHYSICAL,
    SPACETIME_FOURIER,
    SPATIAL_FOURIER,
    VALID_SPACETIME_REPS,
    VALID_SPATIAL_REPS,
)
from exception import ConfigurationException, ContractViolationException
from lib import dyadic_values, frozen, is_integer_power_of_two


GridSpec = namedtuple("GridSpec", ["n", "nx", "length", "nt", "period"])
SpaceTimeField = namedtuple("SpaceTimeField", ["grid", "rep", "coeffs"])
SpatialField = namedtuple("SpatialField", ["grid", "rep", "coeffs"])
FreqPoint = namedtuple("FreqPoint", ["tau", "xi"])
LatticeGeometry = namedtuple(
    "LatticeGeometry", ["tau", "xi", "xi_modulus", "radius", "modulation", "residue"]
)


def make_grid(*, n, nx, length, nt, period, memory_budget=MEMORY_BUDGET_POINTS):
    """
    Validate and build a grid

    Args:
        n (int): Spatial dimension
        nx (int): Points per spatial axis, a power of two
        length (float): Spatial period
        nt (int): Time samples, a power of two
        period (float): Time period
        memory_budget (int): Largest allowed total point count

    Returns:
        GridSpec: The grid
    """
    if not isinstance(n, int) or n < 1 or n > HIGHER_DIMENSION_LIMIT:
        raise ConfigurationException(
            f"Spatial dimension must be an integer between 1 and {HIGHER_DIMENSION_LIMIT}, got {n}"
        )
    for name, value in (("nx", nx), ("nt", nt)):
        if not is_integer_power_of_two(value) or value < 2:
            raise ConfigurationException(
                f"{name} must be a power of two at least 2, got {value}"
            )
    for name, value in (("length", length), ("period", period)):
        if not value > 0:
            raise ConfigurationException(f"{name} must be positive, got {value}")
    if nx**n * nt > memory_budget:
        raise ConfigurationException(
            f"Grid with {nx**n * nt} points exceeds the memory budget of {memory_budget}"
        )
    return GridSpec(
        n=n, nx=int(nx), length=float(length), nt=int(nt), period=float(period)
    )


def spacing(grid):
    """Return (Δt, Δx)"""
    return grid.period / grid.nt, grid.length / grid.nx


def times(grid):
    """Left endpoints of the time samples"""
    return np.arange(grid.nt) * (grid.period / grid.nt)


def temporal_frequencies(grid):
    """τ_j = j/T in FFT order, Nyquist on the negative side"""
    return fft.fftfreq(grid.nt, d=grid.period / grid.nt)


def spatial_frequencies(grid):
    """ξ_k = k/L in FFT order, Nyquist on the negative side"""
    return fft.fftfreq(grid.nx, d=grid.length / grid.nx)


def spatial_mesh(grid):
    """
    Broadcastable spatial frequency components

    Returns:
        list of np.ndarray: n arrays, the j-th varying along spatial axis j
    """
    xi = spatial_frequencies(grid)
    mesh = []
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.nx
        mesh.append(xi.reshape(shape))
    return mesh


def frequency_mesh(grid):
    """
    Broadcastable (τ, ξ) components for space-time coefficient arrays

    Returns:
        tuple: (tau with shape [nt, 1, ...], list of ξ components with shape [1, ..., nx, ...])
    """
    tau = temporal_frequencies(grid).reshape([grid.nt] + [1] * grid.n)
    xi = [component[np.newaxis, ...] for component in spatial_mesh(grid)]
    return tau, xi


def xi_modulus(xi):
    """|ξ| from broadcastable components"""
    return np.sqrt(sum(component**2 for component in xi))


def is_cone_residue(tau, xi_abs):
    """Lattice points with |τ| = |ξ| exactly, ζ = 0 excluded"""
    modulation = np.abs(np.abs(tau) - xi_abs)
    scale = np.maximum(np.abs(tau), xi_abs)
    return (modulation <= CONE_RESIDUE_TOLERANCE * np.maximum(scale, 1.0)) & (
        scale > 0
    )


@lru_cache(maxsize=16)
def lattice_geometry(grid):
    """
    Frequency quantities on the full space-time lattice

    Returns:
        LatticeGeometry: tau, xi components, |ξ|, |(τ,ξ)|, ||τ|−|ξ|| and the cone residue mask
    """
    tau, xi = frequency_mesh(grid)
    shape = space_time_shape(grid)
    xi_abs = np.broadcast_to(xi_modulus(xi), shape)
    tau_full = np.broadcast_to(tau, shape)
    radius = np.sqrt(tau_full**2 + xi_abs**2)
    modulation = np.abs(np.abs(tau_full) - xi_abs)
    residue = is_cone_residue(tau_full, xi_abs)
    return LatticeGeometry(
        tau=frozen(tau_full),
        xi=tuple(frozen(np.broadcast_to(component, shape)) for component in xi),
        xi_modulus=frozen(xi_abs),
        radius=frozen(radius),
        modulation=frozen(modulation),
        residue=frozen(residue),
    )


def wave_symbol(grid):
    """Space-time symbol of □ = −∂_t² + Δ, which is 4π²(τ² − |ξ|²) on modes e^{2πi(τt+ξ·x)}"""
    geometry = lattice_geometry(grid)
    return 4 * math.pi**2 * (geometry.tau**2 - geometry.xi_modulus**2)


def space_time_shape(grid):
    """Shape of a space-time coefficient array"""
    return (grid.nt,) + (grid.nx,) * grid.n


def spatial_shape(grid):
    """Shape of a spatial coefficient array"""
    return (grid.nx,) * grid.n


def _spatial_axes(grid):
    return tuple(range(1, grid.n + 1))


def make_field(grid, coeffs, rep=PHYSICAL):
    """Build a SpaceTimeField, checking the shape"""
    if rep not in VALID_SPACETIME_REPS:
        raise ContractViolationException(f"Unknown representation {rep}")
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != space_time_shape(grid):
        raise ContractViolationException(
            f"Coefficient shape {coeffs.shape} does not match grid shape {space_time_shape(grid)}"
        )
    return SpaceTimeField(grid=grid, rep=rep, coeffs=frozen(coeffs))


def make_spatial_field(grid, coeffs, rep=PHYSICAL):
    """Build a SpatialField, checking the shape"""
    if rep not in VALID_SPATIAL_REPS:
        raise ContractViolationException(f"Unknown representation {rep}")
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != spatial_shape(grid):
        raise ContractViolationException(
            f"Coefficient shape {coeffs.shape} does not match grid shape {spatial_shape(grid)}"
        )
    return SpatialField(grid=grid, rep=rep, coeffs=frozen(coeffs))


def _require_rep(field, reps):
    if field.rep not in reps:
        raise ContractViolationException(
            f"Expected a field in representation {' or '.join(reps)}, got {field.rep}"
        )


def to_spacetime_fourier(u):
    """
    Unitary space-time transform

    Args:
        u (SpaceTimeField): A field in physical or spatial-Fourier representation

    Returns:
        SpaceTimeField: The field in spacetime-Fourier representation
    """
    _require_rep(u, [PHYSICAL, SPATIAL_FOURIER])
    if u.rep == PHYSICAL:
        coeffs = fft.fftn(u.coeffs, norm="ortho")
    else:
        coeffs = fft.fft(u.coeffs, axis=0, norm="ortho")
    return make_field(u.grid, coeffs, SPACETIME_FOURIER)


def from_spacetime_fourier(u, rep=PHYSICAL):
    """
    Inverse of to_spacetime_fourier

    Args:
        u (SpaceTimeField): A field in spacetime-Fourier representation
        rep (str): physical or spatial-Fourier

    Returns:
        SpaceTimeField: The field in the requested representation
    """
    _require_rep(u, [SPACETIME_FOURIER])
    if rep == PHYSICAL:
        coeffs = fft.ifftn(u.coeffs, norm="ortho")
    elif rep == SPATIAL_FOURIER:
        coeffs = fft.ifft(u.coeffs, axis=0, norm="ortho")
    else:
        raise ContractViolationException(f"Cannot invert into representation {rep}")
    return make_field(u.grid, coeffs, rep)


def to_spatial_fourier(u):
    """
    Unitary spatial transform of each time slice

    Args:
        u (SpaceTimeField): A field in physical or spacetime-Fourier representation

    Returns:
        SpaceTimeField: The field in spatial-Fourier representation
    """
    _require_rep(u, [PHYSICAL, SPACETIME_FOURIER])
    if u.rep == PHYSICAL:
        coeffs = fft.fftn(u.coeffs, axes=_spatial_axes(u.grid), norm="ortho")
    else:
        coeffs = fft.ifft(u.coeffs, axis=0, norm="ortho")
    return make_field(u.grid, coeffs, SPATIAL_FOURIER)


def from_spatial_fourier(u):
    """Inverse spatial transform of each time slice, back to physical"""
    _require_rep(u, [SPATIAL_FOURIER])
    coeffs = fft.ifftn(u.coeffs, axes=_spatial_axes(u.grid), norm="ortho")
    return make_field(u.grid, coeffs, PHYSICAL)


def convert(u, rep):
    """Convert a SpaceTimeField to any representation"""
    if u.rep == rep:
        return u
    if rep == SPACETIME_FOURIER:
        return to_spacetime_fourier(u)
    if u.rep == SPACETIME_FOURIER:
        return from_spacetime_fourier(u, rep)
    if rep == SPATIAL_FOURIER:
        return to_spatial_fourier(u)
    return from_spatial_fourier(u)


def spatial_convert(f, rep):
    """Convert a SpatialField to physical or Fourier representation"""
    if f.rep == rep:
        return f
    if rep == FOURIER:
        coeffs = fft.fftn(f.coeffs, norm="ortho")
    else:
        coeffs = fft.ifftn(f.coeffs, norm="ortho")
    return make_spatial_field(f.grid, coeffs, rep)


def time_slice(u, index):
    """
    Take one time sample of a field

    Args:
        u (SpaceTimeField): A field in physical or spatial-Fourier representation
        index (int): The time index

    Returns:
        SpatialField: The slice, in physical or Fourier representation accordingly
    """
    _require_rep(u, [PHYSICAL, SPATIAL_FOURIER])
    rep = PHYSICAL if u.rep == PHYSICAL else FOURIER
    return make_spatial_field(u.grid, u.coeffs[index], rep)


def frequency_of(grid, index):
    """
    The centered frequency point of a space-time coefficient index

    Args:
        grid (GridSpec): The grid
        index (tuple of int): Array index (time first)

    Returns:
        FreqPoint: (τ, ξ) on the dual lattice
    """
    tau = temporal_frequencies(grid)[index[0]]
    xi_values = spatial_frequencies(grid)
    xi = tuple(float(xi_values[k]) for k in index[1:])
    return FreqPoint(tau=float(tau), xi=xi)


def index_of(grid, point):
    """
    Inverse of frequency_of

    Args:
        grid (GridSpec): The grid
        point (FreqPoint): A lattice point

    Returns:
        tuple of int: The array index
    """
    j = point.tau * grid.period
    ks = [xi * grid.length for xi in point.xi]
    for value in [j] + ks:
        if abs(value - round(value)) > 1e-9:
            raise ContractViolationException(f"{point} is not on the dual lattice")
    j = int(round(j))
    ks = [int(round(k)) for k in ks]
    if not -grid.nt // 2 <= j < grid.nt // 2 or any(
        not -grid.nx // 2 <= k < grid.nx // 2 for k in ks
    ):
        raise ContractViolationException(f"{point} is beyond the Nyquist range")
    return (j % grid.nt,) + tuple(k % grid.nx for k in ks)


def plane_wave(grid, *, j, k, amplitude=1.0):
    """
    The physical field amplitude·e^{2πi(τt+ξ·x)} with τ = j/T, ξ = k/L

    Args:
        grid (GridSpec): The grid
        j (int): Temporal lattice index
        k (tuple of int): Spatial lattice indices
        amplitude (complex): Physical amplitude

    Returns:
        SpaceTimeField: The mode in physical representation
    """
    t = times(grid).reshape([grid.nt] + [1] * grid.n)
    phase = j * t / grid.period
    x = np.arange(grid.nx) * (grid.length / grid.nx)
    for axis, k_axis in enumerate(k):
        shape = [1] * (grid.n + 1)
        shape[axis + 1] = grid.nx
        phase = phase + k_axis * x.reshape(shape) / grid.length
    return make_field(grid, amplitude * np.exp(2j * math.pi * phase), PHYSICAL)


def spatial_mode(grid, *, k, amplitude=1.0):
    """The physical spatial field amplitude·e^{2πiξ·x} with ξ = k/L"""
    x = np.arange(grid.nx) * (grid.length / grid.nx)
    phase = np.zeros(spatial_shape(grid))
    for axis, k_axis in enumerate(k):
        shape = [1] * grid.n
        shape[axis] = grid.nx
        phase = phase + k_axis * x.reshape(shape) / grid.length
    return make_spatial_field(grid, amplitude * np.exp(2j * math.pi * phase), PHYSICAL)


def random_field(grid, *, seed, rep=PHYSICAL):
    """A gaussian complex field, mostly for property checks"""
    rng = np.random.default_rng(seed)
    shape = space_time_shape(grid)
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(
        2
    )
    return make_field(grid, coeffs, rep)


def mixed_norm(u, q, r):
    """
    Riemann-sum realization of ‖u‖_{L^q_t(L^r_x)}

    Args:
        u (SpaceTimeField): A field in physical representation
        q (float): Time exponent in [1, ∞]
        r (float): Space exponent in [1, ∞]

    Returns:
        float: (Σ_t Δt (Σ_x Δx^n |u|^r)^{q/r})^{1/q} with max-replacement at ∞
    """
    _require_rep(u, [PHYSICAL])
    if q < 1 or r < 1:
        raise ContractViolationException(f"Exponents must be at least 1, got q={q}, r={r}")
    dt, dx = spacing(u.grid)
    modulus = np.abs(u.coeffs).reshape(u.grid.nt, -1)
    if math.isinf(r):
        slices = modulus.max(axis=1)
    else:
        slices = (dx**u.grid.n * (modulus**r).sum(axis=1)) ** (1 / r)
    if math.isinf(q):
        return float(slices.max())
    return float((dt * (slices**q).sum()) ** (1 / q))


def l2_norm(u):
    """‖u‖_{L²(L²)} computed from any representation (all transforms are unitary)"""
    dt, dx = spacing(u.grid)
    return float(math.sqrt(dt * dx**u.grid.n) * np.linalg.norm(u.coeffs.ravel()))


def spatial_l2_norm(f):
    """‖f‖_{L²} of a SpatialField in either representation"""
    _, dx = spacing(f.grid)
    return float(math.sqrt(dx**f.grid.n) * np.linalg.norm(f.coeffs.ravel()))


def _shell_bounds(grid, spatial):
    low = 1 / grid.length if spatial else max(1 / grid.period, 1 / grid.length)
    spatial_nyquist = grid.nx / (2 * grid.length)
    high = (
        spatial_nyquist
        if spatial
        else min(spatial_nyquist, grid.nt / (2 * grid.period))
    )
    if high <= low:
        raise ConfigurationException(
            f"no resolvable shell: Nyquist bound {high} does not exceed the fundamental {low}"
        )
    values = dyadic_values(low, high)
    if not values:
        raise ConfigurationException(
            f"no resolvable shell between {low} and {high}"
        )
    return values


def frequency_shells(grid):
    """
    Dyadic λ for space-time shells

    Returns:
        list of float: Increasing powers of two between max(1/T, 1/L) and the Nyquist bound
    """
    return _shell_bounds(grid, spatial=False)


def cone_shells(grid):
    """Dyadic d for cone-modulation shells, on the same range as frequency_shells"""
    return _shell_bounds(grid, spatial=False)


def spatial_shells(grid):
    """Dyadic λ for spatial shells, between 1/L and the spatial Nyquist bound"""
    return _shell_bounds(grid, spatial=True)


def nyquist(grid):
    """(temporal, spatial) Nyquist bounds"""
    return grid.nt / (2 * grid.period), grid.nx / (2 * grid.length)


def refine(grid, factor, *, spatial=True, temporal=True):
    """
    Refine the frequency lattice by extending the periods, keeping the Nyquist bounds

    Args:
        grid (GridSpec): The grid
        factor (int): Power of two refinement factor
        spatial (bool): Refine the spatial lattice
        temporal (bool): Refine the temporal lattice

    Returns:
        GridSpec: The refined grid
    """
    return GridSpec(
        n=grid.n,
        nx=grid.nx * factor if spatial else grid.nx,
        length=grid.length * factor if spatial else grid.length,
        nt=grid.nt * factor if temporal else grid.nt,
        period=grid.period * factor if temporal else grid.period,
    )
