"""Fourier cutoffs: dyadic shells, cone modulation, angular blocks and their products"""
from collections import namedtuple
from functools import lru_cache
import json
import math

import numpy as np
from scipy import fft

from constants import (
    CONE,
    DEFAULT_TRANSITION,
    GRADIENT_SCALED,
    KERNEL_OVERSAMPLE,
    MEMORY_BUDGET_POINTS,
    MODULATION_GUARD,
    PLAIN,
    RESOLVENT_SCALED,
    SECTOR,
    SECTOR_BELOW,
    SECTOR_CHUNK,
    SHARP,
    SHELL,
    SHELL_CONE,
    SHELL_CONE_ABOVE,
    SHELL_CONE_BELOW,
    SHELL_CONE_STRICTLY_BELOW,
    SIGNED,
    SMOOTH,
    SPACETIME_FOURIER,
    SPATIAL,
    SPATIAL_BELOW,
    SPECTRAL_ZERO_TOLERANCE,
    VALID_KERNEL_VARIANTS,
    VALID_PROFILES,
    VALID_SYMBOL_KINDS,
    WEIGHT_CACHE_SIZE,
    FOURIER,
)
from exception import (
    ConfigurationException,
    DomainException,
    LightConeException,
    UnboundedKernelException,
    UnsupportedDimensionException,
)
from grid_spectral import (
    GridSpec,
    SpatialField,
    convert,
    cone_shells,
    frequency_mesh,
    frequency_shells,
    is_cone_residue,
    make_field,
    make_spatial_field,
    spatial_convert,
    spatial_mesh,
    spatial_shells,
    space_time_shape,
    spatial_shape,
    xi_modulus,
)
from lib import frozen, matches_dyadic, parse_text_matching_options


CutoffProfile = namedtuple("CutoffProfile", ["kind", "transition"])
SHARP_PROFILE = CutoffProfile(kind=SHARP, transition=None)
SupportDescriptor = namedtuple(
    "SupportDescriptor", ["lambdas", "ds", "sectors", "sign", "radius"]
)
# radius 0 marks a constant symbol with no aliasing concern
CONSTANT_SUPPORT = SupportDescriptor(
    lambdas=None, ds=None, sectors=None, sign=None, radius=0.0
)
SymbolSpec = namedtuple(
    "SymbolSpec",
    ["kind", "lam", "d", "omega", "sign", "profile"],
    defaults=(None, None, None, None, SHARP_PROFILE),
)
AngularSectorSet = namedtuple(
    "AngularSectorSet", ["lam", "delta", "n", "cells", "centers"]
)


def make_profile(kind, transition=DEFAULT_TRANSITION):
    """
    Validate and build a cutoff profile

    Args:
        kind (str): sharp or smooth
        transition (float): Relative transition width in (0, 1/2], smooth only

    Returns:
        CutoffProfile: The profile
    """
    parse_text_matching_options(VALID_PROFILES)(kind)
    if kind == SHARP:
        return SHARP_PROFILE
    if transition is None or not 0 < transition <= 0.5:
        raise ConfigurationException(
            f"Transition width must be in (0, 1/2], got {transition}"
        )
    return CutoffProfile(kind=SMOOTH, transition=float(transition))


def profile_cutoff(profile, s):
    """
    The one-dimensional cutoff φ, equal to 1 on |s| ≤ 1

    The sharp profile is the indicator of |s| < 1. The smooth profile decays to zero on
    1 ≤ |s| ≤ 1 + 2·transition through a degree nine polynomial with four vanishing derivatives
    at both ends.
    """
    s = np.abs(s)
    if profile.kind == SHARP:
        return (s < 1).astype(float)
    x = np.clip((s - 1) / (2 * profile.transition), 0.0, 1.0)
    step = x**5 * (126 - 420 * x + 540 * x**2 - 315 * x**3 + 70 * x**4)
    return 1.0 - step


def _reach(profile):
    """How far past 1 the cutoff extends"""
    return 1.0 if profile.kind == SHARP else 1.0 + 2 * profile.transition


def _dyadic_band(values, low, *, floor, ceiling, profile, excluded):
    """
    The telescoping difference φ(v/2low) − φ(v/low)

    The lowest band absorbs everything below it and the highest everything above it.
    """
    upper = 1.0 if ceiling else profile_cutoff(profile, values / (2 * low))
    lower = excluded.astype(float) if floor else profile_cutoff(profile, values / low)
    return np.where(excluded, 0.0, upper - lower)


class MultiplierSymbol:
    """A real weight in [0, 1] on frequency points, with a superset of its support"""

    def __init__(self, *, evaluator, support, profile, spatial_only=False, spec=None):
        """
        Args:
            evaluator (callable): Takes broadcastable (tau, xi components) and returns weights
            support (SupportDescriptor): A superset of the support
            profile (CutoffProfile or None): The profile, or None for constant symbols
            spatial_only (bool): True if the symbol ignores τ
            spec (SymbolSpec or None): The spec this symbol was built from
        """
        self.evaluator = evaluator
        self.support = support
        self.profile = profile
        self.spatial_only = spatial_only
        self.spec = spec
        self._spacetime_cache = lru_cache(maxsize=WEIGHT_CACHE_SIZE)(self._spacetime_weights)
        self._spatial_cache = lru_cache(maxsize=WEIGHT_CACHE_SIZE)(self._spatial_weights)

    def __call__(self, point):
        """Evaluate at a FreqPoint"""
        tau = np.asarray(point.tau, dtype=float)
        xi = tuple(np.asarray(component, dtype=float) for component in point.xi)
        return float(self.evaluator(tau, xi))

    def __mul__(self, other):
        return multiply(self, other)

    def weights(self, grid):
        """Weights on the space-time coefficient lattice of a grid"""
        return self._spacetime_cache(grid)

    def spatial_weights(self, grid):
        """Weights on the spatial coefficient lattice, for symbols which ignore τ"""
        if not self.spatial_only:
            raise ConfigurationException(
                "Only spatial symbols can be applied to spatial fields"
            )
        return self._spatial_cache(grid)

    def cache_info(self):
        """(space-time, spatial) lru_cache statistics of the lattice weights"""
        return self._spacetime_cache.cache_info(), self._spatial_cache.cache_info()

    def _spacetime_weights(self, grid):
        tau, xi = frequency_mesh(grid)
        values = np.broadcast_to(self.evaluator(tau, xi), space_time_shape(grid))
        return frozen(np.array(values, dtype=float))

    def _spatial_weights(self, grid):
        values = np.broadcast_to(
            self.evaluator(np.zeros(1), spatial_mesh(grid)), spatial_shape(grid)
        )
        return frozen(np.array(values, dtype=float))


def _intersect_labels(first, second):
    if first is None:
        return second
    if second is None:
        return first
    return tuple(sorted(set(first) & set(second)))


def _intersect_sign(first, second):
    if first is None or first == second:
        return second
    if second is None:
        return first
    # opposite half spaces
    return 0


def _intersect_support(first, second):
    """
    Support of a product: None means unrestricted, an empty tuple or sign 0 means empty

    The constant support of the identity is neutral.
    """
    if first == CONSTANT_SUPPORT:
        return second
    if second == CONSTANT_SUPPORT:
        return first
    return SupportDescriptor(
        lambdas=_intersect_labels(first.lambdas, second.lambdas),
        ds=_intersect_labels(first.ds, second.ds),
        sectors=_intersect_labels(first.sectors, second.sectors),
        sign=_intersect_sign(first.sign, second.sign),
        radius=min(first.radius, second.radius),
    )


def _combined_profile(first, second):
    if first is None:
        return second
    if second is None:
        return first
    if SHARP in (first.kind, second.kind):
        return SHARP_PROFILE
    return first


def multiply(*symbols):
    """
    Product of symbols

    Args:
        symbols (list of MultiplierSymbol): Factors

    Returns:
        MultiplierSymbol: The pointwise product
    """
    first, *rest = symbols
    if not rest:
        return first
    second = multiply(*rest)

    def evaluator(tau, xi):
        return first.evaluator(tau, xi) * second.evaluator(tau, xi)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=_intersect_support(first.support, second.support),
        profile=_combined_profile(first.profile, second.profile),
        spatial_only=first.spatial_only and second.spatial_only,
    )


def identity_symbol():
    """The symbol 1, whose kernel is a delta"""

    def evaluator(tau, xi):
        return np.ones(np.broadcast(tau, *xi).shape)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=CONSTANT_SUPPORT,
        profile=None,
        spatial_only=True,
    )


def _radius(tau, xi):
    return np.sqrt(tau**2 + xi_modulus(xi) ** 2)


def _modulation(tau, xi):
    return np.abs(np.abs(tau) - xi_modulus(xi))


def _check_listed(value, values, name):
    index = matches_dyadic(value, values)
    if index is None:
        raise ConfigurationException(
            f"{name}={value} is outside the resolvable range {values}"
        )
    return index == 0, index == len(values) - 1


def shell_symbol(grid, lam, profile=SHARP_PROFILE):
    """
    S_λ: the space-time shell λ ≤ |(τ,ξ)| < 2λ

    Args:
        grid (GridSpec): The grid which fixes the lowest and highest shells
        lam (float): A value from frequency_shells(grid)
        profile (CutoffProfile): Sharp or smooth

    Returns:
        MultiplierSymbol: The shell
    """
    floor, ceiling = _check_listed(lam, frequency_shells(grid), "λ")

    def evaluator(tau, xi):
        radius = _radius(tau, xi)
        return _dyadic_band(
            radius,
            lam,
            floor=floor,
            ceiling=ceiling,
            profile=profile,
            excluded=radius == 0,
        )

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=(lam,),
            ds=None,
            sectors=None,
            sign=None,
            radius=math.inf if ceiling else 2 * lam * _reach(profile),
        ),
        profile=profile,
        spec=SymbolSpec(kind=SHELL, lam=lam, profile=profile),
    )


def cone_symbol(grid, d, profile=SHARP_PROFILE):
    """
    C_d: modulation d ≤ ||τ|−|ξ|| < 2d

    The sharp profile excludes the cone residue from every shell. The smooth lowest shell keeps it
    so the symbol stays continuous across the cone.
    """
    floor, ceiling = _check_listed(d, cone_shells(grid), "d")

    def evaluator(tau, xi):
        xi_abs = xi_modulus(xi)
        modulation = np.abs(np.abs(tau) - xi_abs)
        excluded = (tau == 0) & (xi_abs == 0)
        if profile.kind == SHARP:
            excluded = excluded | is_cone_residue(tau, xi_abs)
        return _dyadic_band(
            modulation,
            d,
            floor=floor,
            ceiling=ceiling,
            profile=profile,
            excluded=excluded,
        )

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=None, ds=(d,), sectors=None, sign=None, radius=math.inf
        ),
        profile=profile,
        spec=SymbolSpec(kind=CONE, d=d, profile=profile),
    )


def spatial_symbol(grid, lam, profile=SHARP_PROFILE):
    """P_λ: the spatial shell λ ≤ |ξ| < 2λ"""
    floor, ceiling = _check_listed(lam, spatial_shells(grid), "λ")

    def evaluator(tau, xi):  # pylint: disable=unused-argument
        xi_abs = xi_modulus(xi)
        return _dyadic_band(
            xi_abs,
            lam,
            floor=floor,
            ceiling=ceiling,
            profile=profile,
            excluded=xi_abs == 0,
        )

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=(lam,),
            ds=None,
            sectors=None,
            sign=None,
            radius=math.inf if ceiling else 2 * lam * _reach(profile),
        ),
        profile=profile,
        spatial_only=True,
        spec=SymbolSpec(kind=SPATIAL, lam=lam, profile=profile),
    )


def spatial_below_symbol(grid, lam, profile=SHARP_PROFILE):
    """P_{•≤λ} = Σ_{μ≤λ} P_μ, which is 0 < |ξ| < 2λ"""
    _, ceiling = _check_listed(lam, spatial_shells(grid), "λ")

    def evaluator(tau, xi):  # pylint: disable=unused-argument
        xi_abs = xi_modulus(xi)
        below = 1.0 if ceiling else profile_cutoff(profile, xi_abs / (2 * lam))
        return np.where(xi_abs == 0, 0.0, below)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=(lam,),
            ds=None,
            sectors=None,
            sign=None,
            radius=math.inf if ceiling else 2 * lam * _reach(profile),
        ),
        profile=profile,
        spatial_only=True,
        spec=SymbolSpec(kind=SPATIAL_BELOW, lam=lam, profile=profile),
    )


def modulation_below_symbol(threshold, profile=SHARP_PROFILE):
    """1{||τ|−|ξ|| < threshold}, cone residue included"""

    def evaluator(tau, xi):
        return profile_cutoff(profile, _modulation(tau, xi) / threshold)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=None, ds=None, sectors=None, sign=None, radius=math.inf
        ),
        profile=profile,
    )


def sign_symbol(sign):
    """1{±τ > 0}; the τ = 0 row belongs to neither half-space"""
    if sign not in (1, -1):
        raise ConfigurationException(f"Sign must be +1 or -1, got {sign}")

    def evaluator(tau, xi):
        shape = np.broadcast(tau, *xi).shape
        return np.broadcast_to((sign * tau > 0).astype(float), shape)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=None, ds=None, sectors=None, sign=sign, radius=math.inf
        ),
        profile=None,
    )


def principal_angle(first, second):
    """
    Angle between vectors along the last axis, atan2(|a∧b|, a·b)

    Args:
        first (np.ndarray): Vectors with shape [..., n]
        second (np.ndarray): Vectors with shape [..., n]

    Returns:
        np.ndarray: Angles in [0, π]
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    dot = (first * second).sum(axis=-1)
    n = first.shape[-1]
    wedge_squared = np.zeros(np.broadcast(dot, dot).shape)
    for i in range(n):
        for j in range(i + 1, n):
            component = first[..., i] * second[..., j] - first[..., j] * second[..., i]
            wedge_squared = wedge_squared + component**2
    return np.arctan2(np.sqrt(wedge_squared), dot)


def _cubed_sphere_centers(n, cells):
    """Centers of an m×…×m grid on each face of the cube, projected to the sphere"""
    coordinates = -1 + (2 * np.arange(cells) + 1) / cells
    face_grid = np.stack(
        [axis.ravel() for axis in np.meshgrid(*([coordinates] * (n - 1)), indexing="ij")],
        axis=-1,
    )
    faces = []
    for axis in range(n):
        for sign in (1.0, -1.0):
            points = np.empty((len(face_grid), n))
            points[:, axis] = sign
            points[:, [other for other in range(n) if other != axis]] = face_grid
            faces.append(points)
    centers = np.concatenate(faces)
    return centers / np.linalg.norm(centers, axis=1, keepdims=True)


def angular_partition(lam, delta, *, n):
    """
    Partition the sphere into sectors of angular size about δ/λ

    Args:
        lam (float): The frequency scale
        delta (float): The transverse block size, at most λ
        n (int): Spatial dimension

    Returns:
        AngularSectorSet: Centers of the sectors
    """
    if delta > lam * (1 + 1e-12):
        raise DomainException(f"Sector size δ={delta} exceeds the frequency λ={lam}")
    if not delta > 0:
        raise DomainException(f"Sector size must be positive, got {delta}")
    if n == 1:
        return AngularSectorSet(
            lam=lam, delta=delta, n=1, cells=1, centers=frozen(np.array([[1.0], [-1.0]]))
        )
    # keeps the count 2n·m^{n−1} at most 8(λ/δ)^{n−1}
    scale = (4 / n) ** (1 / (n - 1))
    cells = int(math.floor(scale * lam / delta + 1e-12))
    if cells == 0:
        centers = np.zeros((1, n))
        centers[0, 0] = 1.0
    else:
        centers = _cubed_sphere_centers(n, cells)
    return AngularSectorSet(
        lam=lam, delta=delta, n=n, cells=cells, centers=frozen(centers)
    )


def sector_count(sectors):
    """How many sectors there are"""
    return len(sectors.centers)


def covering_angle(sectors):
    """An upper bound for the angle from any direction to its nearest center"""
    if sectors.n == 1 or sectors.cells == 0:
        return math.pi
    return math.sqrt(sectors.n - 1) / sectors.cells


def assign_directions(sectors, vectors):
    """
    Nearest-center assignment, ties going to the lowest id

    Args:
        sectors (AngularSectorSet): The partition
        vectors (np.ndarray): Nonzero vectors with shape [P, n]; zero vectors get id −1

    Returns:
        np.ndarray: Sector ids with shape [P]
    """
    vectors = np.asarray(vectors, dtype=float).reshape(-1, sectors.n)
    ids = np.empty(len(vectors), dtype=int)
    for start in range(0, len(vectors), SECTOR_CHUNK):
        chunk = vectors[start : start + SECTOR_CHUNK]
        ids[start : start + SECTOR_CHUNK] = np.argmax(chunk @ sectors.centers.T, axis=1)
    ids[~np.any(vectors != 0, axis=1)] = -1
    return ids


def _direction_vectors(xi):
    shape = np.broadcast(*xi).shape
    vectors = np.stack([np.broadcast_to(component, shape) for component in xi], axis=-1)
    return vectors.reshape(-1, len(xi)), shape


def _smooth_angular_weights(sectors, vectors, profile):
    """Normalized bumps g_ω / Σ g over all centers"""
    radius = covering_angle(sectors)
    weights = np.empty((len(vectors), sector_count(sectors)))
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    units = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    for start in range(0, len(units), SECTOR_CHUNK):
        chunk = units[start : start + SECTOR_CHUNK]
        angles = principal_angle(chunk[:, np.newaxis, :], sectors.centers[np.newaxis])
        weights[start : start + SECTOR_CHUNK] = profile_cutoff(profile, angles / radius)
    total = weights.sum(axis=1, keepdims=True)
    return np.divide(weights, total, out=np.zeros_like(weights), where=total > 0)


def block_symbol(sectors, omega, profile=SHARP_PROFILE):
    """
    B^ω: the angular sector ω of the annulus λ/2 ≤ |ξ| < 4λ

    Args:
        sectors (AngularSectorSet): The partition
        omega (int): A sector id
        profile (CutoffProfile): Sharp indicator or normalized smooth partition

    Returns:
        MultiplierSymbol: The block, which ignores τ
    """
    if not 0 <= omega < sector_count(sectors):
        raise ConfigurationException(
            f"Sector {omega} is outside the range of {sector_count(sectors)} sectors"
        )
    lam = sectors.lam

    def evaluator(tau, xi):  # pylint: disable=unused-argument
        vectors, shape = _direction_vectors(xi)
        xi_abs = np.linalg.norm(vectors, axis=1)
        if profile.kind == SHARP:
            annulus = (xi_abs >= lam / 2) & (xi_abs < 4 * lam)
            angular = assign_directions(sectors, vectors) == omega
            values = (annulus & angular).astype(float)
        else:
            annulus = profile_cutoff(profile, xi_abs / (2 * lam)) - profile_cutoff(
                profile, 2 * xi_abs / lam
            )
            angular = _smooth_angular_weights(sectors, vectors, profile)[:, omega]
            values = np.where(xi_abs > 0, annulus * angular, 0.0)
        return values.reshape(shape)

    return MultiplierSymbol(
        evaluator=evaluator,
        support=SupportDescriptor(
            lambdas=(lam,),
            ds=None,
            sectors=(omega,),
            sign=None,
            radius=4 * lam if profile.kind == SHARP else 2 * lam * _reach(profile),
        ),
        profile=profile,
        spatial_only=True,
    )


def sector_scale(lam, d):
    """Transverse size (λd)^{1/2} of the sectors used with modulation d, capped at λ"""
    return min(math.sqrt(lam * d), lam)


def _sector_set_for(grid, lam, d):
    return angular_partition(lam, sector_scale(lam, d), n=grid.n)


def composite_symbol(grid, spec):
    """
    Build S_{λ,d}, S_{λ,•≤d}, S_{λ,•<d}, S_{λ,d≤•}, S^±_{λ,d}, S^ω_{λ,d} and S^ω_{λ,•≤d}

    Args:
        grid (GridSpec): The grid which fixes the shell lists
        spec (SymbolSpec): What to build

    Returns:
        MultiplierSymbol: The composite symbol
    """
    parse_text_matching_options(VALID_SYMBOL_KINDS)(spec.kind)
    profile = spec.profile or SHARP_PROFILE
    if spec.lam is not None and spec.d is not None and spec.d > MODULATION_GUARD * spec.lam:
        raise ConfigurationException(
            f"Modulation d={spec.d} exceeds {MODULATION_GUARD}·λ for λ={spec.lam}"
        )
    if spec.kind == SHELL:
        symbol = shell_symbol(grid, spec.lam, profile)
    elif spec.kind == CONE:
        symbol = cone_symbol(grid, spec.d, profile)
    elif spec.kind == SPATIAL:
        symbol = spatial_symbol(grid, spec.lam, profile)
    elif spec.kind == SPATIAL_BELOW:
        symbol = spatial_below_symbol(grid, spec.lam, profile)
    elif spec.kind in (SHELL_CONE, SIGNED) and spec.d is not None:
        symbol = shell_symbol(grid, spec.lam, profile) * cone_symbol(
            grid, spec.d, profile
        )
    elif spec.kind == SIGNED:
        symbol = shell_symbol(grid, spec.lam, profile)
    elif spec.kind == SHELL_CONE_BELOW:
        symbol = shell_symbol(grid, spec.lam, profile) * modulation_below_symbol(
            2 * spec.d, profile
        )
    elif spec.kind == SHELL_CONE_STRICTLY_BELOW:
        symbol = shell_symbol(grid, spec.lam, profile) * modulation_below_symbol(
            spec.d, profile
        )
    elif spec.kind == SHELL_CONE_ABOVE:
        shell = shell_symbol(grid, spec.lam, profile)
        below = modulation_below_symbol(spec.d, profile)

        def evaluator(tau, xi):
            return shell.evaluator(tau, xi) * (1.0 - below.evaluator(tau, xi))

        symbol = MultiplierSymbol(
            evaluator=evaluator, support=shell.support, profile=profile
        )
    elif spec.kind in (SECTOR, SECTOR_BELOW):
        if grid.n == 1:
            raise UnsupportedDimensionException(
                "Angular sectors need at least two spatial dimensions"
            )
        sectors = _sector_set_for(grid, spec.lam, spec.d)
        inner = SymbolSpec(
            kind=SHELL_CONE if spec.kind == SECTOR else SHELL_CONE_BELOW,
            lam=spec.lam,
            d=spec.d,
            profile=profile,
        )
        symbol = block_symbol(sectors, spec.omega, profile) * composite_symbol(
            grid, inner
        )
    else:
        raise ConfigurationException(f"Incomplete symbol spec {spec}")

    if spec.sign is not None:
        symbol = symbol * sign_symbol(spec.sign)
    symbol.spec = spec
    return symbol


def symbol_spec_to_json(spec):
    """Canonical JSON text for a symbol spec"""
    profile = spec.profile or SHARP_PROFILE
    return json.dumps(
        {
            "kind": spec.kind,
            "lam": spec.lam,
            "d": spec.d,
            "omega": spec.omega,
            "sign": spec.sign,
            "profile": {"kind": profile.kind, "transition": profile.transition},
        },
        sort_keys=True,
    )


def symbol_spec_from_json(text):
    """Inverse of symbol_spec_to_json"""
    try:
        data = json.loads(text)
        profile = data.get("profile") or {"kind": SHARP}
        return SymbolSpec(
            kind=data["kind"],
            lam=data.get("lam"),
            d=data.get("d"),
            omega=data.get("omega"),
            sign=data.get("sign"),
            profile=make_profile(
                profile["kind"], profile.get("transition", DEFAULT_TRANSITION)
            ),
        )
    except (KeyError, TypeError, ValueError) as ex:
        raise ConfigurationException(f"Invalid symbol spec {text}") from ex


def apply(symbol, u):
    """
    Multiply by the symbol in the Fourier representation

    Args:
        symbol (MultiplierSymbol): The symbol
        u (SpaceTimeField or SpatialField): The field, in any representation

    Returns:
        SpaceTimeField or SpatialField: The result, in the caller's representation
    """
    if isinstance(u, SpatialField):
        transformed = spatial_convert(u, FOURIER)
        result = make_spatial_field(
            u.grid, transformed.coeffs * symbol.spatial_weights(u.grid), FOURIER
        )
        return spatial_convert(result, u.rep)
    transformed = convert(u, SPACETIME_FOURIER)
    result = make_field(
        u.grid, transformed.coeffs * symbol.weights(u.grid), SPACETIME_FOURIER
    )
    return convert(result, u.rep)


def _kernel_size(points, period, radius, oversample):
    needed = 2 * radius * period * oversample + 2
    size = points * oversample
    while size < needed:
        size *= 2
    return size


def _kernel_grid(symbol, grid, oversample):
    radius = symbol.support.radius
    if math.isinf(radius):
        raise ConfigurationException(
            "The symbol's support box is unbounded, so its kernel cannot be resolved"
        )
    nx = _kernel_size(grid.nx, grid.length, radius, oversample)
    nt = 2 if symbol.spatial_only else _kernel_size(grid.nt, grid.period, radius, oversample)
    fine = GridSpec(
        n=grid.n,
        nx=nx,
        length=grid.length * oversample,
        nt=nt,
        period=grid.period * oversample,
    )
    points = fine.nx**fine.n * (1 if symbol.spatial_only else fine.nt)
    if points > MEMORY_BUDGET_POINTS:
        raise ConfigurationException(
            f"Kernel lattice with {points} points exceeds the memory budget"
        )
    return fine


def _variant_weights(symbol, fine, variant):
    if symbol.spatial_only:
        weights = symbol.spatial_weights(fine)
        xi = spatial_mesh(fine)
        tau = np.zeros(1)
        axes = tuple(range(fine.n))
    else:
        weights = symbol.weights(fine)
        tau, xi = frequency_mesh(fine)
        axes = tuple(range(fine.n + 1))
    if variant == PLAIN:
        return [weights], axes
    lam = symbol.support.lambdas[0] if symbol.support.lambdas else None
    if variant == GRADIENT_SCALED:
        if lam is None:
            raise ConfigurationException("Gradient scaling needs a frequency scale λ")
        return [weights * 2j * math.pi * component / lam for component in xi], axes
    d = symbol.support.ds[0] if symbol.support.ds else None
    if lam is None or d is None:
        raise ConfigurationException("Resolvent scaling needs both λ and d")
    box = 4 * math.pi**2 * (tau**2 - xi_modulus(xi) ** 2)
    box = np.broadcast_to(box, weights.shape)
    touching = (np.abs(box) <= SPECTRAL_ZERO_TOLERANCE) & (weights != 0)
    if np.any(touching):
        raise LightConeException(
            "The symbol's support touches the light cone, so Ξ^{-1} is undefined there"
        )
    safe = np.where(weights != 0, box, 1.0)
    return [lam * d * weights / safe], axes


def kernel_l1_norm(
    symbol, grid, variant=PLAIN, *, oversample=KERNEL_OVERSAMPLE, allow_sharp=False
):
    """
    ‖K‖_{L¹} for the kernel K of a (rescaled) symbol

    Args:
        symbol (MultiplierSymbol): The symbol
        grid (GridSpec): The grid whose periods set the lattice spacing
        variant (str): plain, gradient-scaled or resolvent-scaled
        oversample (int): Refinement factor for the frequency lattice
        allow_sharp (bool): Compute even for sharp symbols, which have no uniform bound

    Returns:
        float: The L¹ norm, maximized over components for the gradient variant
    """
    parse_text_matching_options(VALID_KERNEL_VARIANTS)(variant)
    if symbol.profile is not None and symbol.profile.kind == SHARP and not allow_sharp:
        raise UnboundedKernelException(
            "unbounded kernel family: sharp cutoffs do not have uniformly L¹ kernels"
        )
    if symbol.support.radius == 0:
        return 1.0
    fine = _kernel_grid(symbol, grid, oversample)
    components, axes = _variant_weights(symbol, fine, variant)
    return max(
        float(np.abs(fft.ifftn(component, axes=axes)).sum()) for component in components
    )


def l1tau_linf_bound(symbol, grid, *, oversample=KERNEL_OVERSAMPLE, allow_sharp=False):
    """
    ‖K̂‖_{L¹_t(L^∞_ξ)} for the time kernel of the symbol, on the grid's spatial lattice

    Args:
        symbol (MultiplierSymbol): The symbol
        grid (GridSpec): The grid
        oversample (int): Refinement factor for the temporal lattice
        allow_sharp (bool): Compute even for sharp symbols

    Returns:
        float: Σ_t max_ξ |K̂(t, ξ)|
    """
    if symbol.profile is not None and symbol.profile.kind == SHARP and not allow_sharp:
        raise UnboundedKernelException(
            "unbounded kernel family: sharp cutoffs do not have uniformly L¹ kernels"
        )
    if symbol.spatial_only:
        return float(np.abs(symbol.spatial_weights(grid)).max())
    radius = symbol.support.radius
    if math.isinf(radius):
        raise ConfigurationException(
            "The symbol's support box is unbounded, so its kernel cannot be resolved"
        )
    if radius > grid.nx / (2 * grid.length):
        raise ConfigurationException(
            f"The symbol's support radius {radius} exceeds the spatial Nyquist bound"
        )
    fine = grid._replace(
        nt=_kernel_size(grid.nt, grid.period, radius, oversample),
        period=grid.period * oversample,
    )
    kernel = fft.ifft(symbol.weights(fine), axis=0)
    return float(np.abs(kernel).reshape(fine.nt, -1).max(axis=1).sum())


@lru_cache(maxsize=512)
def cached_symbol(grid, spec):
    """composite_symbol memoized on (grid, spec), so lattice weights are computed once"""
    return composite_symbol(grid, spec)
