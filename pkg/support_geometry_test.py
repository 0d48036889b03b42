"""Tests for support_geometry"""
import itertools
import math

import numpy as np
import pytest

from constants import B_TERM, EXHAUSTIVE, FAIL, INCONCLUSIVE, PASS, SAMPLED, SMALL, WIDE
from exception import ConfigurationException, HypothesisException
from support_geometry import (
    band_points,
    bilinear_support_check,
    in_band,
    lemma_regions,
)


def _brute_force_count(lam, sign, low, high):
    """Count the band on a one dimensional lattice by direct enumeration"""
    reach = int(2 * lam) + 1
    count = 0
    for tau, xi in itertools.product(range(-reach, reach + 1), repeat=2):
        radius = math.hypot(tau, xi)
        modulation = abs(abs(tau) - abs(xi))
        if sign * tau > 0 and lam <= radius < 2 * lam and low <= modulation < high:
            count += 1
    return count


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("low, high", [(0.0, 2.0), (1.0, 4.0), (0.0, 16.0)])
def test_band_points_line(sign, low, high):
    """band_points should enumerate exactly the lattice points of the band"""
    points = band_points(4.0, sign, low, high, n=1)
    assert len(points.tau) == _brute_force_count(4.0, sign, low, high)
    assert points.xi.shape == (len(points.tau), 1)
    assert np.all(points.sign == sign)
    assert np.all(in_band(sign * points.tau, points.xi, 4.0, low, high))


def test_band_points_plane():
    """Every enumerated point should be a distinct member of the band"""
    points = band_points(4.0, 1, 0.0, 2.0, n=2)
    assert np.all(in_band(points.tau, points.xi, 4.0, 0.0, 2.0))
    rows = {(tau, *xi) for tau, xi in zip(points.tau.tolist(), points.xi.tolist())}
    assert len(rows) == len(points.tau)


def test_band_points_too_large():
    """Bands beyond the memory budget should be refused"""
    with pytest.raises(ConfigurationException):
        band_points(1024.0, 1, 0.0, 1.0, n=4)


@pytest.mark.parametrize(
    "lemma, low, high, output, angle_scale",
    [
        (WIDE, {"mu": 0.0, "lam": 0.0}, {"mu": 2.0, "lam": 2.0}, (1.0, 2.0), 0.5),
        (SMALL, {"mu": 0.0, "lam": 1.0}, {"mu": 2.0, "lam": 2.0}, (0.0, 1.0), 0.25),
        (B_TERM, {"mu": 1.0, "lam": 0.0}, {"mu": 2.0, "lam": 0.5}, (0.0, 0.5), 0.25),
    ],
)
def test_lemma_regions(lemma, low, high, output, angle_scale):
    """Each lemma should restrict the inputs and the output to its own windows"""
    regions = lemma_regions(lemma, 16.0, 4.0, 1.0, 0.125)
    assert regions.low == low
    assert regions.high == high
    assert regions.output == output
    assert regions.angle_scale == pytest.approx(angle_scale)


@pytest.mark.parametrize(
    "lemma, lam, mu, d, exception",
    [
        (WIDE, 8.0, 2.0, 1.0, HypothesisException),
        (WIDE, 16.0, 2.0, 2.0, HypothesisException),
        (SMALL, 16.0, 2.0, -1.0, ConfigurationException),
        ("C-term", 16.0, 2.0, 1.0, ConfigurationException),
    ],
)
def test_hypotheses(lemma, lam, mu, d, exception):
    """Runs outside the hypotheses of a lemma should be refused"""
    with pytest.raises(exception):
        bilinear_support_check(lemma, lam, mu, d)


def test_unknown_mode():
    """Only exhaustive and sampled modes exist"""
    with pytest.raises(ConfigurationException):
        bilinear_support_check(WIDE, 16.0, 2.0, 1.0, mode="grid")


def test_exhaustive_check():
    """An exhaustive run should examine every pair of the two bands"""
    report = bilinear_support_check(WIDE, 16.0, 2.0, 1.0, c=1.0, n=2)
    regions = lemma_regions(WIDE, 16.0, 2.0, 1.0, 1.0)
    inputs = sum(
        len(band_points(2.0, sign, 0.0, regions.high["mu"], n=2).tau) for sign in (1, -1)
    )
    targets = len(band_points(16.0, 1, 0.0, regions.high["lam"], n=2).tau)
    assert report.mode == EXHAUSTIVE
    assert report.pairs_examined == inputs * targets
    assert 0 <= report.hits <= report.pairs_examined
    assert report.in_lemma_range is True
    assert report.status in (PASS, FAIL, INCONCLUSIVE)
    assert (report.status == INCONCLUSIVE) is (report.hits == 0)
    assert (report.status == FAIL) is (report.violation_count > 0 and report.hits > 0)
    assert len(report.violations) <= report.violation_count
    assert report.angle_constant >= 0


def test_fallback_to_sampling():
    """Runs above the pair cap should sample instead, reproducibly"""
    first = bilinear_support_check(
        SMALL, 16.0, 2.0, 1.0, n=2, pair_cap=1, sample_count=2000, seed=3
    )
    second = bilinear_support_check(
        SMALL, 16.0, 2.0, 1.0, n=2, pair_cap=1, sample_count=2000, seed=3
    )
    assert first.mode == SAMPLED
    assert first.pairs_examined == 2000
    assert first.hits == second.hits
    assert first.angle_constant == second.angle_constant


def test_empty_inputs(mocker):
    """A μ band without lattice points leaves the check inconclusive"""
    warning = mocker.patch("support_geometry.log.warning")
    report = bilinear_support_check(B_TERM, 16.0, 2.0, 16.0)
    assert report.in_lemma_range is False
    assert warning.call_count == 1
    assert report.pairs_examined == 0
    assert report.hits == 0
    assert report.status == INCONCLUSIVE


def test_sampled_on_a_line():
    """Sampled mode should work in one dimension"""
    report = bilinear_support_check(
        WIDE, 16.0, 2.0, 1.0, n=1, mode=SAMPLED, sample_count=500
    )
    assert report.mode == SAMPLED
    assert report.n == 1
    assert report.pairs_examined == 500


@pytest.mark.parametrize("d, in_range", [(0.5, True), (1.0, False)])
def test_wide_angle_constant(d, in_range):
    """Every wide pair at λ = 64, μ = 8 should meet Θ ≤ 4(d/μ)^{1/2}"""
    report = bilinear_support_check(WIDE, 64.0, 8.0, d, n=2)
    assert report.mode == EXHAUSTIVE
    assert report.hits > 0
    assert report.in_lemma_range is in_range
    assert report.angle_constant <= 4
    assert not [violation for violation in report.violations if violation.kind == "angle"]


def test_wide_angle_outside_range():
    """Past cμ the angle constant leaves the default ceiling and the run fails"""
    report = bilinear_support_check(WIDE, 64.0, 8.0, 2.0, n=2)
    assert report.in_lemma_range is False
    assert report.angle_constant > 4
    assert report.status == FAIL
    assert any(violation.kind == "angle" for violation in report.violations)


def test_b_term_angle():
    """The B-term pairs are held to the angle ceiling too"""
    loose = bilinear_support_check(B_TERM, 64.0, 8.0, 2.0, n=2)
    tight = bilinear_support_check(B_TERM, 64.0, 8.0, 2.0, n=2, angle_ceiling=1e-3)
    assert tight.hits == loose.hits > 0
    assert tight.angle_constant == loose.angle_constant
    assert tight.status == FAIL
    assert any(violation.kind == "angle" for violation in tight.violations)
    assert not [violation for violation in loose.violations if violation.kind == "range"]
