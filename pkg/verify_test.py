"""Tests for verify"""
import math

import numpy as np
import pytest

from constants import (
    ANGULAR_RECONSTRUCTION,
    C_III,
    ENERGY,
    FAIL,
    FOURIER,
    HH,
    HL_A,
    HL_B,
    INCONCLUSIVE,
    PASS,
    PROXY_FIDELITY,
    REJECTED,
    SHELL,
    SHELL_CONE,
    SPATIAL_BELOW,
    STRICHARTZ,
    UNIMODULAR_PHASE,
    Y_L2,
    Y_OUTERBLOCK,
)
from exception import (
    ConfigurationException,
    HypothesisException,
    InadmissibleExponentsException,
    UnsupportedDimensionException,
)
from grid_spectral import (
    SpatialField,
    SpaceTimeField,
    make_field,
    make_grid,
    plane_wave,
    random_field,
    spatial_mode,
)
from multipliers import SymbolSpec
from spaces import f_lambda_components, f_lambda_norm
from verify import (
    EstimateReport,
    check_admissible,
    energy_ratio,
    inclusion_checks,
    local_strichartz_ratio,
    make_ensemble,
    make_ensemble_spec,
    product_estimate_check,
    proxy_fidelity,
    stability_ratio,
    strichartz_ratio,
    support_check,
    y_l2_ratio,
    y_outerblock_ratio,
)


pytestmark = pytest.mark.asyncio


def _spatial_spec(lam, count=8, seed=3, **kwargs):
    return make_ensemble_spec(
        count=count, localization=SymbolSpec(kind=SPATIAL_BELOW, lam=lam), seed=seed, **kwargs
    )


def _report(max_ratio):
    return EstimateReport(
        estimate_id=STRICHARTZ,
        params={},
        ratios=(max_ratio,),
        max_ratio=max_ratio,
        median_ratio=max_ratio,
        ceiling=math.inf,
        verdict=PASS,
    )


@pytest.mark.parametrize("count", [0, 7, 8.0])
async def test_make_ensemble_spec_count(count):
    """make_ensemble_spec should require at least eight members"""
    with pytest.raises(ConfigurationException):
        make_ensemble_spec(count=count, localization=SymbolSpec(kind=SHELL, lam=4))


async def test_make_ensemble_spec_law():
    """make_ensemble_spec should reject an unknown amplitude law"""
    with pytest.raises(ConfigurationException):
        make_ensemble_spec(count=8, localization=SymbolSpec(kind=SHELL, lam=4), law="cauchy")


async def test_make_ensemble_reproducible(line_grid):
    """make_ensemble should give the same members for the same seed and different ones otherwise"""
    spec = make_ensemble_spec(count=8, localization=SymbolSpec(kind=SHELL, lam=4), seed=5)
    first = make_ensemble(line_grid, spec)
    second = make_ensemble(line_grid, spec)
    other = make_ensemble(line_grid, spec._replace(seed=6))
    assert len(first) == 8
    assert all(isinstance(member, SpaceTimeField) for member in first)
    for left, right in zip(first, second):
        assert np.array_equal(left.coeffs, right.coeffs)
    assert not np.array_equal(first[0].coeffs, other[0].coeffs)
    assert not np.array_equal(first[0].coeffs, first[1].coeffs)


async def test_make_ensemble_spatial(line_grid):
    """make_ensemble should give spatial Fourier data for spatial localizations"""
    members = make_ensemble(line_grid, _spatial_spec(4, law=UNIMODULAR_PHASE))
    assert all(isinstance(member, SpatialField) for member in members)
    assert all(member.rep == FOURIER for member in members)
    magnitudes = np.abs(members[0].coeffs)
    assert np.allclose(magnitudes[magnitudes > 0], 1.0)


async def test_make_ensemble_localized(line_grid):
    """make_ensemble should only populate the requested cell"""
    spec = make_ensemble_spec(
        count=8, localization=SymbolSpec(kind=SHELL_CONE, lam=8, d=2), seed=1
    )
    member = make_ensemble(line_grid, spec)[0]
    indices = np.argwhere(member.coeffs != 0)
    assert len(indices) > 0
    for j, k in indices:
        tau = np.fft.fftfreq(64, d=1 / 64)[j]
        xi = np.fft.fftfreq(64, d=1 / 64)[k]
        assert 8 <= math.hypot(tau, xi) < 16
        assert 2 <= abs(abs(tau) - abs(xi)) < 4


@pytest.mark.parametrize(
    "q, r, n, gamma",
    [
        (math.inf, 2, 1, 0.0),
        (math.inf, 2, 2, 0.0),
        (4, math.inf, 3, 1.25),
        (2, math.inf, 4, 1.5),
    ],
)
async def test_check_admissible(q, r, n, gamma):
    """check_admissible should return the scaling exponent for admissible pairs"""
    assert check_admissible(q, r, n) == pytest.approx(gamma)


@pytest.mark.parametrize("q, r, n", [(2, 2, 2), (4, 4, 1), (2, math.inf, 3), (1, 2, 3)])
async def test_check_admissible_rejects(q, r, n):
    """check_admissible should reject pairs outside the admissible range"""
    with pytest.raises(InadmissibleExponentsException):
        check_admissible(q, r, n)


async def test_strichartz_energy_pair(line_grid):
    """The energy pair should measure exactly one on every member"""
    ensemble = make_ensemble(line_grid, _spatial_spec(8))
    report = await strichartz_ratio(math.inf, 2, 8, ensemble, ceiling=1.0 + 1e-9, threads=2)
    assert report.estimate_id == STRICHARTZ
    assert len(report.ratios) == 8
    assert report.ratios == pytest.approx([1.0] * 8)
    assert report.verdict == PASS
    assert report.params["gamma"] == 0.0


async def test_strichartz_inadmissible(plane_grid):
    """strichartz_ratio should refuse inadmissible exponents before measuring anything"""
    ensemble = make_ensemble(plane_grid, _spatial_spec(4))
    with pytest.raises(InadmissibleExponentsException):
        await strichartz_ratio(2, 2, 4, ensemble)


async def test_strichartz_fail_verdict(line_grid):
    """A ceiling below the measured value should fail"""
    ensemble = make_ensemble(line_grid, _spatial_spec(8))
    report = await strichartz_ratio(math.inf, 2, 8, ensemble, ceiling=0.5)
    assert report.verdict == FAIL


async def test_strichartz_zero_data(line_grid):
    """Members with no mass in the cell should be skipped, leaving nothing to judge"""
    zero = SpatialField(grid=line_grid, rep=FOURIER, coeffs=np.zeros(64, dtype=complex))
    report = await strichartz_ratio(math.inf, 2, 8, [zero] * 8)
    assert report.ratios == ()
    assert report.max_ratio is None
    assert report.verdict == INCONCLUSIVE


async def test_local_strichartz_one_dimension(line_grid):
    """Local Strichartz needs angular sectors"""
    ensemble = make_ensemble(line_grid, _spatial_spec(8))
    with pytest.raises(UnsupportedDimensionException):
        await local_strichartz_ratio(8, 2, ensemble)


async def test_local_strichartz_single_mode(plane_grid):
    """A single spatial mode sits in one sector, so the sector and summed ratios agree"""
    mode = spatial_mode(plane_grid, k=(6, 2))
    report = await local_strichartz_ratio(4, 2, [mode] * 8)
    expected = 1 / (4 ** (3 / 4) * 2 ** (-1 / 4))
    assert report.ratios == pytest.approx([expected] * 8)
    assert report.params["square_summed_max"] == pytest.approx(expected)
    assert report.verdict is None


async def test_y_l2_closed_form(line_grid):
    """For one mode off the cone the ratio is sqrt(d)λ / (4π²|τ² − |ξ|²|)"""
    u = plane_wave(line_grid, j=10, k=(15,))
    assert y_l2_ratio(u, 16, 4) == pytest.approx(2 * 16 / (4 * math.pi**2 * 125))


async def test_inclusion_checks_line(line_grid):
    """In one dimension the sector and outer block items should be rejected"""
    u = plane_wave(line_grid, j=10, k=(15,))
    reports = await inclusion_checks([u] * 8, 16, 4)
    assert reports[ANGULAR_RECONSTRUCTION].verdict == REJECTED
    assert reports[Y_OUTERBLOCK].verdict == REJECTED
    assert reports[Y_L2].ratios == pytest.approx([2 * 16 / (4 * math.pi**2 * 125)] * 8)
    assert reports[ENERGY].ratios == pytest.approx([0.5] * 8)
    assert reports[ENERGY].verdict == PASS


async def test_energy_ratio_free_wave(line_grid):
    """A single free wave carries its whole F_λ norm in the energy term"""
    assert energy_ratio(plane_wave(line_grid, j=6, k=(6,))) == pytest.approx(1.0)


async def test_energy_ratio_off_cone(line_grid):
    """Off the cone the X route dominates, so the ratio is 1/sqrt(8)"""
    u = plane_wave(line_grid, j=10, k=(1,))
    assert f_lambda_components(u, 8).energy < f_lambda_norm(u, 8)
    assert energy_ratio(u) == pytest.approx(1 / math.sqrt(8))


async def test_energy_ratio_mixed_times(line_grid):
    """Two temporal frequencies in one spatial shell add up at t = 0 and give sqrt(2)"""
    first = plane_wave(line_grid, j=6, k=(6,))
    second = plane_wave(line_grid, j=5, k=(6,))
    u = make_field(line_grid, first.coeffs + second.coeffs)
    assert energy_ratio(u) == pytest.approx(math.sqrt(2))
    reports = await inclusion_checks([u] * 8, 8, 2, items=[ENERGY], ceiling=1.0, threads=2)
    assert list(reports) == [ENERGY]
    assert reports[ENERGY].ratios == pytest.approx([math.sqrt(2)] * 8)
    assert reports[ENERGY].verdict == FAIL
    assert reports[ENERGY].params["s"] == 0.0


async def test_energy_ratio_regularity(line_grid):
    """With s = 1 the free wave at |ξ| = 6 is weighted by 4 against 8"""
    u = plane_wave(line_grid, j=6, k=(6,))
    reports = await inclusion_checks([u] * 8, 8, 2, items=[ENERGY], s=1)
    assert reports[ENERGY].ratios == pytest.approx([0.5] * 8)
    assert reports[ENERGY].params["s"] == 1.0


@pytest.mark.parametrize("n, nx, lam", [(5, 8, 2), (6, 4, 1)])
async def test_y_outerblock_floor_shell(n, nx, lam):
    """The lowest cone shell should not reach Ξ^{-1} on the cone itself"""
    grid = make_grid(n=n, nx=nx, length=1.0, nt=8, period=1.0)
    u = random_field(grid, seed=0)
    assert 0 < y_outerblock_ratio(u, lam, 1) < math.inf
    reports = await inclusion_checks([u] * 2, lam, 1, items=[Y_OUTERBLOCK])
    report = reports[Y_OUTERBLOCK]
    assert len(report.ratios) == 2
    assert all(math.isfinite(ratio) for ratio in report.ratios)
    assert report.verdict == (None if n == 5 else PASS)


async def test_inclusion_checks_angular(plane_grid):
    """Square summing the sector pieces of a random field should reconstruct its norm"""
    spec = make_ensemble_spec(
        count=8, localization=SymbolSpec(kind=SHELL_CONE, lam=4, d=1), seed=4
    )
    reports = await inclusion_checks(
        make_ensemble(plane_grid, spec), 4, 1, items=[ANGULAR_RECONSTRUCTION]
    )
    report = reports[ANGULAR_RECONSTRUCTION]
    assert len(report.ratios) == 8
    assert all(ratio <= 1 + 1e-9 for ratio in report.ratios)


async def test_inclusion_checks_unknown_item(line_grid):
    """inclusion_checks should reject an unknown item"""
    with pytest.raises(ConfigurationException):
        await inclusion_checks([plane_wave(line_grid, j=1, k=(2,))], 4, 1, items=["bogus"])


async def test_product_hl_a_closed_form(line_grid):
    """Two single modes should give 2π·15/λ over μ^{-1/2}·‖u‖_{F_μ}·‖v‖_{F_λ} = 2^{-1/2}·1·2"""
    u = plane_wave(line_grid, j=1, k=(2,))
    v = plane_wave(line_grid, j=10, k=(15,))
    report = await product_estimate_check(HL_A, 16, 2, [(u, v)] * 8)
    assert report.max_ratio == pytest.approx(30 * math.pi / (16 * math.sqrt(2)))
    assert report.verdict is None


@pytest.mark.parametrize(
    "kind, lam, mu", [(HL_A, 16, 4), (HL_B, 8, 2), (C_III, 4, 4), (HH, 16, 4)]
)
async def test_product_hypotheses(line_grid, kind, lam, mu):
    """product_estimate_check should refuse frequencies outside the case"""
    u = plane_wave(line_grid, j=1, k=(2,))
    with pytest.raises(HypothesisException):
        await product_estimate_check(kind, lam, mu, [(u, u)])


async def test_product_c_iii_line(line_grid):
    """The angular case needs at least two space dimensions"""
    u = plane_wave(line_grid, j=1, k=(2,))
    v = plane_wave(line_grid, j=16, k=(17,))
    with pytest.raises(UnsupportedDimensionException):
        await product_estimate_check(C_III, 16, 2, [(u, v)])


async def test_product_unknown_kind(line_grid):
    """product_estimate_check should reject an unknown case"""
    u = plane_wave(line_grid, j=1, k=(2,))
    with pytest.raises(ConfigurationException):
        await product_estimate_check("LL", 16, 2, [(u, u)])


async def test_product_high_dimension_verdict(mocker):
    """In high dimension the verdict should follow the ceiling"""
    grid = make_grid(n=6, nx=2, length=1.0, nt=2, period=1.0)
    mocker.patch("verify._product_member", return_value=0.5)
    pair = (plane_wave(grid, j=0, k=(0,) * 6),) * 2
    passing = await product_estimate_check(HH, 4, 4, [pair] * 8, ceiling=1.0)
    failing = await product_estimate_check(HH, 4, 4, [pair] * 8, ceiling=0.25)
    assert passing.verdict == PASS
    assert failing.verdict == FAIL
    assert passing.median_ratio == 0.5


async def test_stability_ratio():
    """stability_ratio should compare the largest and smallest max ratios"""
    assert stability_ratio([_report(1.0), _report(4.0), _report(2.0)]) == 4.0
    assert math.isnan(stability_ratio([_report(1.0)]))


async def test_proxy_fidelity(small_line_grid):
    """The route sum should never be below the optimal splitting"""
    report = await proxy_fidelity(small_line_grid, 2, 8, 7, threads=2)
    assert report.estimate_id == PROXY_FIDELITY
    assert len(report.ratios) == 8
    assert all(ratio >= 1 - 1e-9 for ratio in report.ratios)
    assert report.verdict == PASS


async def test_support_check(mocker):
    """support_check should run the bilinear check with the given arguments"""
    patched = mocker.patch("verify.bilinear_support_check", return_value="report")
    assert await support_check("wide", 64, 8, 1, c=0.125, n=2) == "report"
    patched.assert_called_once_with("wide", 64, 8, 1, c=0.125, n=2)
