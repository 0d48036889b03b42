"""Tests for the dyadic function spaces"""
from fractions import Fraction
import math

import numpy as np
import pytest

from constants import (
    MD_SCHEMATIC,
    PHYSICAL,
    SCALAR_MODEL,
    SHELL_CONE,
    SPACETIME_FOURIER,
    X_ROUTE,
)
from exception import ConfigurationException, UnsupportedDimensionException
from grid_spectral import convert, make_field, make_spatial_field, random_field, spatial_mode
from multipliers import SymbolSpec, cached_symbol
from spaces import (
    besov_data_norm,
    f_lambda_components,
    f_lambda_norm,
    fs_norm,
    g_lambda_norm,
    gs_norm,
    norm_table,
    relevant_modulations,
    schematic_params,
    sector_ids,
    sector_pieces,
    sobolev_norm,
    solution_profile,
    sum_form_norm,
    x_half_norm,
    x_half_terms,
    y_norm,
    z_norm,
)
from test_util import field_from_modes


BOX = 4 * math.pi**2 * 125


# pylint: disable=redefined-outer-name
@pytest.fixture
def mode(line_grid):
    """The unit plane wave at τ = 10, ξ = 15, in shell 16 and cone shell 4"""
    yield field_from_modes(line_grid, {(10, (15,)): 1.0}, PHYSICAL)


def test_relevant_modulations(line_grid):
    """Cone shells up to twice λ can meet the shell λ"""
    assert relevant_modulations(line_grid, 1) == [1.0, 2.0]
    assert relevant_modulations(line_grid, 32) == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]


def test_x_half(mode):
    """A single mode has one nonzero X term, d^{1/2}"""
    terms = x_half_terms(mode, 16)
    assert terms[4.0] == pytest.approx(2.0)
    assert sum(terms.values()) == pytest.approx(2.0)
    assert x_half_norm(mode, 16) == pytest.approx(2.0)
    assert x_half_norm(mode, 16, math.inf) == pytest.approx(2.0)
    assert x_half_norm(mode, 8) == pytest.approx(0.0, abs=1e-12)


def test_y(mode):
    """Y_λ of a mode is |□ symbol| / λ"""
    assert y_norm(mode, 16) == pytest.approx(BOX / 16)


def test_f_lambda(mode):
    """F_λ should take the cheaper route per cone shell"""
    components = f_lambda_components(mode, 16)
    assert components.energy == pytest.approx(1.0)
    assert components.y_terms[4.0] == pytest.approx(BOX / 16)
    assert components.routes[4.0] == X_ROUTE
    assert f_lambda_norm(mode, 16) == pytest.approx(2.0)
    assert g_lambda_norm(mode, 16) == pytest.approx(2.0)
    assert sum_form_norm(mode, 16) == pytest.approx((3.0, 3.0))


def test_totals(mode):
    """F^s and G^s should weigh the shells"""
    assert fs_norm(mode, 0) == pytest.approx(2.0)
    assert gs_norm(mode, 1) == pytest.approx(32.0)
    assert gs_norm(mode, Fraction(1, 2)) == pytest.approx(8.0)


def test_no_angles_on_a_line(mode):
    """Z_λ and the sector pieces need two dimensions"""
    with pytest.raises(UnsupportedDimensionException):
        z_norm(mode, 16)
    with pytest.raises(UnsupportedDimensionException):
        list(sector_pieces(mode, 16, 4))


def test_sector_pieces(plane_grid):
    """Sector pieces should split the annulus part of a cell without loss"""
    u = random_field(plane_grid, seed=5)
    lam, d = 4.0, 2.0
    coeffs = convert(u, SPACETIME_FOURIER).coeffs
    pieces = list(sector_pieces(u, lam, d))
    ids, annulus, count = sector_ids(plane_grid, lam, d)
    assert len(pieces) <= count
    assert ids.min() >= -1 and ids.max() < count
    cell = cached_symbol(plane_grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d)).weights(plane_grid)
    assert np.allclose(sum(piece for _, piece in pieces), coeffs * cell * annulus)


def test_z_norm(plane_grid):
    """Z_λ should be positive and scale linearly"""
    u = random_field(plane_grid, seed=6)
    doubled = make_field(plane_grid, 2 * u.coeffs, u.rep)
    value = z_norm(u, 4)
    assert value > 0
    assert z_norm(doubled, 4) == pytest.approx(2 * value)
    assert g_lambda_norm(u, 4) == pytest.approx(max(f_lambda_norm(u, 4), value))


@pytest.mark.parametrize(
    "system, n, sigma, s_c",
    [
        (SCALAR_MODEL, 3, (Fraction(1),), (Fraction(1, 2),)),
        (MD_SCHEMATIC, 4, (Fraction(1, 2), Fraction(1)), (Fraction(3, 2), Fraction(1))),
    ],
)
def test_schematic_params(system, n, sigma, s_c):
    """s_c should be n/2 − σ per component"""
    params = schematic_params(system, n)
    assert params.sigma == sigma
    assert params.s_c == s_c


def test_schematic_override(mocker):
    """Overrides should be parsed and checked against the component count"""
    warning = mocker.patch("spaces.log.warning")
    assert schematic_params(SCALAR_MODEL, 2, s_c="1/3").s_c == (Fraction(1, 3),)
    assert warning.call_count == 1
    with pytest.raises(ConfigurationException) as ex:
        schematic_params(MD_SCHEMATIC, 4, s_c=["1"])
    assert "has 2 components" in ex.value.args[0]
    with pytest.raises(ConfigurationException):
        schematic_params("KdV", 1)


def test_data_norms(line_grid):
    """Besov and Sobolev norms of a mode are powers of its shell and its frequency"""
    f = spatial_mode(line_grid, k=(5,))
    zero = make_spatial_field(line_grid, np.zeros(64))
    assert besov_data_norm(f, zero, 1) == pytest.approx(4.0)
    assert besov_data_norm(f, f, 1) == pytest.approx(5.0)
    assert sobolev_norm(f, 2) == pytest.approx(25.0)
    assert sobolev_norm(spatial_mode(line_grid, k=(0,)), 1) == 0


def test_solution_profile(mode, line_grid):
    """The data norm of each slice of a mode is its spatial shell to the power s"""
    zero = make_field(line_grid, np.zeros((64, 64)))
    assert np.allclose(solution_profile(mode, zero, 1), 8.0)


def test_norm_table(mode):
    """The table should hold every norm, with empty cells reported as None"""
    table = norm_table(mode, 1)
    rows = {(row.norm, row.lam, row.d): row.value for row in table.rows}
    assert rows[("x_half", 16.0, 4.0)] == pytest.approx(2.0)
    assert rows[("f", 16.0, None)] == pytest.approx(2.0)
    assert rows[("z", 16.0, None)] is None
    assert rows[("gs", None, None)] == pytest.approx(gs_norm(mode, 1))
    assert rows[("fs", None, None)] == pytest.approx(fs_norm(mode, 1))
    assert table.s == 1


LINE_NORMS = [
    lambda u: x_half_norm(u, 4),
    lambda u: x_half_norm(u, 4, 2),
    lambda u: y_norm(u, 4),
    lambda u: f_lambda_norm(u, 4),
    lambda u: g_lambda_norm(u, 4),
    lambda u: fs_norm(u, 0.5),
    lambda u: gs_norm(u, 0.5),
]


def _pair(grid, seed):
    """Two gaussian fields and their sum"""
    u = random_field(grid, seed=seed)
    v = random_field(grid, seed=seed + 1)
    return u, v, make_field(grid, u.coeffs + v.coeffs)


@pytest.mark.parametrize("norm", LINE_NORMS)
@pytest.mark.parametrize("seed", [20, 30])
def test_triangle_inequality(small_line_grid, norm, seed):
    """‖u + v‖ ≤ ‖u‖ + ‖v‖ on random pairs"""
    u, v, total = _pair(small_line_grid, seed)
    bound = norm(u) + norm(v)
    assert norm(total) <= bound + 1e-10 * bound


@pytest.mark.parametrize("norm", LINE_NORMS)
def test_homogeneity(small_line_grid, norm):
    """‖cu‖ = |c|‖u‖ for complex c"""
    u = random_field(small_line_grid, seed=40)
    scale = 2.5 - 1.5j
    scaled = make_field(small_line_grid, u.coeffs * scale)
    assert norm(scaled) == pytest.approx(abs(scale) * norm(u), rel=1e-10)


def test_z_norm_is_a_norm(plane_grid):
    """Z_λ is subadditive and absolutely homogeneous"""
    u, v, total = _pair(plane_grid, 50)
    bound = z_norm(u, 4) + z_norm(v, 4)
    assert z_norm(total, 4) <= bound + 1e-10 * bound
    scaled = make_field(plane_grid, u.coeffs * (2.5 - 1.5j))
    assert z_norm(scaled, 4) == pytest.approx(math.sqrt(8.5) * z_norm(u, 4), rel=1e-10)
