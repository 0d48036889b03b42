"""Frequency-pair enumeration for the bilinear support lemmas"""
from collections import namedtuple
import logging
import math

import numpy as np

from constants import (
    ANGLE_CEILING,
    B_TERM,
    B_TERM_RANGE_CEILING,
    DEFAULT_CONE_CONSTANT,
    DIAGONAL_MULTIPLICITY,
    EXHAUSTIVE,
    EXHAUSTIVE_PAIR_CAP,
    FAIL,
    INCONCLUSIVE,
    MEMORY_BUDGET_POINTS,
    PASS,
    SAMPLED,
    SAMPLED_PAIR_COUNT,
    SECTOR_CHUNK,
    SMALL,
    VALID_LEMMAS,
    VALID_SUPPORT_MODES,
    WIDE,
)
from exception import ConfigurationException, HypothesisException
from grid_spectral import FreqPoint
from lib import parse_text_matching_options
from multipliers import angular_partition, assign_directions, principal_angle


log = logging.getLogger(__name__)


BandPoints = namedtuple("BandPoints", ["tau", "xi", "sign"])
LemmaRegions = namedtuple("LemmaRegions", ["low", "high", "output", "angle_scale"])
SupportViolation = namedtuple("SupportViolation", ["kind", "first", "second", "value"])
SupportCheckReport = namedtuple(
    "SupportCheckReport",
    [
        "lemma",
        "lam",
        "mu",
        "d",
        "c",
        "n",
        "mode",
        "pairs_examined",
        "hits",
        "violation_count",
        "violations",
        "angle_constant",
        "diagonal_multiplicity",
        "secondary_multiplicity",
        "in_lemma_range",
        "status",
    ],
)

MIN_SCALE_RATIO = 8
STORED_VIOLATIONS = 100
PAIR_BLOCK = SECTOR_CHUNK * 64


def band_points(lam, sign, low, high, *, n, length=1.0, period=1.0):
    """
    Lattice points of λ ≤ |(τ,ξ)| < 2λ with ±τ > 0 and low ≤ ||τ|−|ξ|| < high

    Args:
        lam (float): The shell
        sign (int): +1 or −1
        low (float): Lower modulation bound, 0 includes the cone residue
        high (float): Upper modulation bound
        n (int): Spatial dimension
        length (float): Spatial period, the lattice spacing is 1/L
        period (float): Time period, the lattice spacing is 1/T

    Returns:
        BandPoints: τ with shape [P], ξ with shape [P, n]
    """
    extent = int(math.ceil(2 * lam * length))
    axis = np.arange(-extent, extent + 1) / length
    if len(axis) ** (n - 1) > MEMORY_BUDGET_POINTS:
        raise ConfigurationException(
            f"The shell λ={lam} has too many lattice points to enumerate in n={n}"
        )
    if n > 1:
        rest = np.stack(
            [values.ravel() for values in np.meshgrid(*([axis] * (n - 1)), indexing="ij")],
            axis=-1,
        )
    else:
        rest = np.zeros((1, 0))
    reach = int(math.ceil(high * period)) + 1
    offsets = np.arange(-reach, reach + 1)
    taus, xis = [], []
    total = 0
    for first in axis:
        xi = np.concatenate([np.full((len(rest), 1), first), rest], axis=1)
        xi_abs = np.linalg.norm(xi, axis=1)
        inside = xi_abs < 2 * lam
        xi, xi_abs = xi[inside], xi_abs[inside]
        tau = sign * (np.rint(xi_abs * period)[:, np.newaxis] + offsets) / period
        modulation = np.abs(np.abs(tau) - xi_abs[:, np.newaxis])
        radius = np.sqrt(tau**2 + xi_abs[:, np.newaxis] ** 2)
        member = (
            (sign * tau > 0)
            & (radius >= lam)
            & (radius < 2 * lam)
            & (modulation >= low)
            & (modulation < high)
        )
        rows, columns = np.nonzero(member)
        total += len(rows)
        if total > MEMORY_BUDGET_POINTS:
            raise ConfigurationException(
                f"The band λ={lam} holds more than {MEMORY_BUDGET_POINTS} lattice points"
            )
        taus.append(tau[rows, columns])
        xis.append(xi[rows])
    return BandPoints(
        tau=np.concatenate(taus),
        xi=np.concatenate(xis).reshape(-1, n),
        sign=np.full(total, sign, dtype=int),
    )


def _join(first, second):
    return BandPoints(
        tau=np.concatenate([first.tau, second.tau]),
        xi=np.concatenate([first.xi, second.xi]),
        sign=np.concatenate([first.sign, second.sign]),
    )


def in_band(tau, xi, lam, low, high):
    """Membership of (τ, ξ) in the positive band λ ≤ r < 2λ, low ≤ m < high"""
    xi_abs = np.linalg.norm(xi, axis=-1)
    radius = np.sqrt(tau**2 + xi_abs**2)
    modulation = np.abs(np.abs(tau) - xi_abs)
    return (
        (tau > 0)
        & (radius >= lam)
        & (radius < 2 * lam)
        & (modulation >= low)
        & (modulation < high)
    )


def lemma_regions(lemma, lam, mu, d, c):
    """
    Modulation windows of the μ input, the λ input and the output

    Returns:
        LemmaRegions: low/high pairs keyed "mu" and "lam", the output window, and the sector scale
            used for the output and λ-input diagonality
    """
    if lemma == WIDE:
        return LemmaRegions(
            low={"mu": 0.0, "lam": 0.0},
            high={"mu": 2 * d, "lam": 2 * d},
            output=(d, 2 * d),
            angle_scale=math.sqrt(d / mu),
        )
    if lemma == SMALL:
        return LemmaRegions(
            low={"mu": 0.0, "lam": d},
            high={"mu": 2 * d, "lam": 2 * d},
            output=(0.0, d),
            angle_scale=math.sqrt(d / lam),
        )
    return LemmaRegions(
        low={"mu": d, "lam": 0.0},
        high={"mu": 2 * d, "lam": c * mu},
        output=(0.0, c * mu),
        angle_scale=math.sqrt(min(d, mu) / lam),
    )


def _check_hypotheses(lemma, lam, mu, d, c):
    if not (lam > 0 and mu > 0 and d > 0 and c > 0):
        raise ConfigurationException(
            f"λ, μ, d and c must be positive, got {lam}, {mu}, {d}, {c}"
        )
    if lam / mu < MIN_SCALE_RATIO:
        raise HypothesisException(
            f"{lemma}: needs λ/μ ≥ {MIN_SCALE_RATIO}, got λ={lam}, μ={mu}"
        )
    if lemma in (WIDE, SMALL):
        if d >= mu:
            raise HypothesisException(f"{lemma}: needs d < μ, got d={d}, μ={mu}")
        in_range = d < c * mu
    else:
        in_range = c * mu <= d <= mu
    if not in_range:
        log.warning(
            "%s lemma run outside its nominal range: λ=%s, μ=%s, d=%s, c=%s",
            lemma,
            lam,
            mu,
            d,
            c,
        )
    return in_range


def _point(tau, xi):
    return FreqPoint(tau=float(tau), xi=tuple(float(value) for value in xi))


class _Accumulator:
    """Running totals over pair blocks"""

    def __init__(self, *, lemma, mu, d, c, angle_ceiling, sectors_mu, sectors_output):
        self.lemma = lemma
        self.mu = mu
        self.d = d
        self.c = c
        self.angle_ceiling = angle_ceiling
        self.sectors_mu = sectors_mu
        self.sectors_output = sectors_output
        self.pairs = 0
        self.hits = 0
        self.violation_count = 0
        self.violations = []
        self.angle_constant = 0.0
        self.secondary = set()
        self.tertiary = set()

    def _record(self, kind, first_tau, first_xi, second_tau, second_xi, values):
        self.violation_count += len(values)
        for index in range(min(len(values), STORED_VIOLATIONS - len(self.violations))):
            self.violations.append(
                SupportViolation(
                    kind=kind,
                    first=_point(first_tau[index], first_xi[index]),
                    second=_point(second_tau[index], second_xi[index]),
                    value=float(values[index]),
                )
            )

    def add(self, first, second_tau, second_xi):
        """Fold in the hits: pairs (ζ', ζ) whose sum lies in the output region"""
        count = len(second_tau)
        if count == 0:
            return
        self.hits += count
        oriented = first.sign[:, np.newaxis] * first.xi
        angles = principal_angle(oriented, second_xi)
        scale = math.sqrt(self.d / self.mu)
        self.angle_constant = max(self.angle_constant, float(angles.max() / scale))
        wide = angles > self.angle_ceiling * scale
        self._record(
            "angle",
            first.tau[wide],
            first.xi[wide],
            second_tau[wide],
            second_xi[wide],
            angles[wide] / scale,
        )
        if self.lemma == B_TERM:
            if self.d > B_TERM_RANGE_CEILING * self.mu:
                self._record(
                    "range",
                    first.tau,
                    first.xi,
                    second_tau,
                    second_xi,
                    np.full(count, self.d / self.mu),
                )
            if self.d >= 2 * self.c * self.mu:
                signed = first.sign * (
                    first.tau - first.sign * np.linalg.norm(first.xi, axis=1)
                )
                wrong = signed >= 0
                self._record(
                    "sign",
                    first.tau[wrong],
                    first.xi[wrong],
                    second_tau[wrong],
                    second_xi[wrong],
                    signed[wrong],
                )

        output = assign_directions(self.sectors_output, first.xi + second_xi)
        lam_input = assign_directions(self.sectors_output, second_xi)
        mu_input = assign_directions(self.sectors_mu, oriented)
        self.secondary.update(zip(output.tolist(), mu_input.tolist()))
        self.tertiary.update(zip(output.tolist(), lam_input.tolist()))

    def multiplicities(self):
        """Largest number of distinct μ-input and λ-input sectors meeting one output sector"""

        def largest(pairs):
            counts = {}
            for output, sector in pairs:
                counts.setdefault(output, set()).add(sector)
            return max((len(values) for values in counts.values()), default=0)

        return largest(self.secondary), largest(self.tertiary)


def _exhaustive(accumulator, inputs, targets, lam, output):
    block = max(1, PAIR_BLOCK // max(len(targets.tau), 1))
    for start in range(0, len(inputs.tau), block):
        chunk = BandPoints(
            tau=inputs.tau[start : start + block],
            xi=inputs.xi[start : start + block],
            sign=inputs.sign[start : start + block],
        )
        tau = chunk.tau[:, np.newaxis] + targets.tau[np.newaxis, :]
        xi = chunk.xi[:, np.newaxis, :] + targets.xi[np.newaxis, :, :]
        rows, columns = np.nonzero(in_band(tau, xi, lam, *output))
        accumulator.pairs += tau.size
        accumulator.add(
            BandPoints(tau=chunk.tau[rows], xi=chunk.xi[rows], sign=chunk.sign[rows]),
            targets.tau[columns],
            targets.xi[columns],
        )


def _random_directions(rng, axes, window):
    """Unit vectors within angle window of each axis"""
    count, n = axes.shape
    if n == 1:
        return axes
    noise = rng.standard_normal((count, n))
    noise = noise - (noise * axes).sum(axis=1, keepdims=True) * axes
    norms = np.linalg.norm(noise, axis=1, keepdims=True)
    orthogonal = np.divide(noise, norms, out=np.zeros_like(noise), where=norms > 0)
    theta = rng.uniform(0, min(window, math.pi), size=(count, 1))
    return np.cos(theta) * axes + np.sin(theta) * orthogonal


def _sampled(accumulator, inputs, lam, regions, *, rng, count, window, length, period):
    low, high = regions.low["lam"], regions.high["lam"]
    for start in range(0, count, PAIR_BLOCK):
        size = min(PAIR_BLOCK, count - start)
        picks = rng.integers(0, len(inputs.tau), size=size)
        first = BandPoints(tau=inputs.tau[picks], xi=inputs.xi[picks], sign=inputs.sign[picks])
        oriented = first.sign[:, np.newaxis] * first.xi
        norms = np.linalg.norm(oriented, axis=1, keepdims=True)
        axes = np.divide(oriented, norms, out=np.zeros_like(oriented), where=norms > 0)
        directions = _random_directions(rng, axes, window)
        modulus = rng.uniform(max(0.0, lam / math.sqrt(2) - high), 2 * lam, size=(size, 1))
        xi = np.rint(modulus * directions * length) / length
        xi_abs = np.linalg.norm(xi, axis=1)
        offset = rng.uniform(-high, high, size=size)
        tau = np.rint((xi_abs + offset) * period) / period
        valid = in_band(tau, xi, lam, low, high)
        valid &= in_band(first.tau + tau, first.xi + xi, lam, *regions.output)
        accumulator.pairs += size
        accumulator.add(
            BandPoints(tau=first.tau[valid], xi=first.xi[valid], sign=first.sign[valid]),
            tau[valid],
            xi[valid],
        )


def bilinear_support_check(
    lemma,
    lam,
    mu,
    d,
    *,
    c=DEFAULT_CONE_CONSTANT,
    mode=EXHAUSTIVE,
    n=2,
    length=1.0,
    period=1.0,
    angle_ceiling=ANGLE_CEILING,
    seed=0,
    sample_count=SAMPLED_PAIR_COUNT,
    pair_cap=EXHAUSTIVE_PAIR_CAP,
):
    """
    Check the frequency geometry of a bilinear decomposition lemma on the lattice

    Args:
        lemma (str): wide, small or B-term
        lam (float): The high frequency
        mu (float): The low frequency, with λ/μ ≥ 8
        d (float): The modulation scale
        c (float): The small cone constant
        mode (str): exhaustive enumerates every pair, sampled draws pairs near the ±ξ' direction
        n (int): Spatial dimension
        length (float): Spatial period
        period (float): Time period
        angle_ceiling (float): Largest accepted Θ/(d/μ)^{1/2}
        seed (int): Seed for sampled mode
        sample_count (int): Pairs drawn in sampled mode
        pair_cap (int): Exhaustive runs with more pairs fall back to sampling

    Returns:
        SupportCheckReport: Pair counts, violations and measured constants
    """
    parse_text_matching_options(VALID_LEMMAS)(lemma)
    parse_text_matching_options(VALID_SUPPORT_MODES)(mode)
    in_range = _check_hypotheses(lemma, lam, mu, d, c)
    regions = lemma_regions(lemma, lam, mu, d, c)
    inputs = _join(
        band_points(mu, 1, regions.low["mu"], regions.high["mu"], n=n, length=length, period=period),
        band_points(mu, -1, regions.low["mu"], regions.high["mu"], n=n, length=length, period=period),
    )
    accumulator = _Accumulator(
        lemma=lemma,
        mu=mu,
        d=d,
        c=c,
        angle_ceiling=angle_ceiling,
        sectors_mu=angular_partition(1.0, min(math.sqrt(d / mu), 1.0), n=n),
        sectors_output=angular_partition(1.0, min(regions.angle_scale, 1.0), n=n),
    )
    used_mode = mode
    if mode == EXHAUSTIVE:
        try:
            targets = band_points(
                lam, 1, regions.low["lam"], regions.high["lam"], n=n, length=length, period=period
            )
        except ConfigurationException:
            log.warning("The λ band is too large to enumerate, switching to sampled mode")
            used_mode = SAMPLED
        else:
            total = len(inputs.tau) * len(targets.tau)
            if total > pair_cap:
                log.warning(
                    "%s pairs exceed the exhaustive cap %s, switching to sampled mode",
                    total,
                    pair_cap,
                )
                used_mode = SAMPLED
            else:
                _exhaustive(accumulator, inputs, targets, lam, regions.output)
    if used_mode == SAMPLED and len(inputs.tau):
        _sampled(
            accumulator,
            inputs,
            lam,
            regions,
            rng=np.random.default_rng(seed),
            count=sample_count,
            window=2 * angle_ceiling * math.sqrt(d / mu),
            length=length,
            period=period,
        )

    secondary, tertiary = accumulator.multiplicities()
    if lemma == WIDE:
        diagonal = max(secondary, tertiary)
    else:
        diagonal = tertiary
    if accumulator.hits and diagonal > DIAGONAL_MULTIPLICITY:
        accumulator.violation_count += 1
        accumulator.violations.append(
            SupportViolation(kind="diagonality", first=None, second=None, value=float(diagonal))
        )
    if accumulator.hits == 0:
        status = INCONCLUSIVE
    elif accumulator.violation_count:
        status = FAIL
    else:
        status = PASS
    log.info(
        "%s support check λ=%s μ=%s d=%s: %s pairs, %s hits, %s violations",
        lemma,
        lam,
        mu,
        d,
        accumulator.pairs,
        accumulator.hits,
        accumulator.violation_count,
    )
    return SupportCheckReport(
        lemma=lemma,
        lam=lam,
        mu=mu,
        d=d,
        c=c,
        n=n,
        mode=used_mode,
        pairs_examined=accumulator.pairs,
        hits=accumulator.hits,
        violation_count=accumulator.violation_count,
        violations=tuple(accumulator.violations),
        angle_constant=accumulator.angle_constant,
        diagonal_multiplicity=diagonal,
        secondary_multiplicity=secondary,
        in_lemma_range=in_range,
        status=status,
    )
