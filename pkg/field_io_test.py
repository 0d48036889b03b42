"""Tests for field_io"""
import json

import numpy as np
import pytest

from constants import FOURIER, SPATIAL_FOURIER
from exception import ConfigurationException
from field_io import read_field, slice_norms, write_field, write_slice_norms
from grid_spectral import convert, make_field, make_spatial_field, plane_wave, random_field


def test_field_container(tmp_path, plane_grid):
    """write_field should keep the grid, the representation and every coefficient bit"""
    u = convert(random_field(plane_grid, seed=4), SPATIAL_FOURIER)
    path = tmp_path / "u.field"
    write_field(path, u)
    header = json.loads(path.read_bytes().split(b"\n", 1)[0])
    assert header["kind"] == "spacetime"
    assert header["dtype"] == "<c16"
    assert header["shape"] == [32, 32, 32]
    stored = read_field(path)
    assert stored.grid == plane_grid
    assert stored.rep == SPATIAL_FOURIER
    assert np.array_equal(stored.coeffs, u.coeffs)


def test_spatial_container(tmp_path, line_grid):
    """Spatial fields should come back as spatial fields"""
    f = make_spatial_field(line_grid, np.arange(64) * (1 + 1j), FOURIER)
    path = tmp_path / "f.field"
    write_field(path, f)
    stored = read_field(path)
    assert (stored.grid, stored.rep) == (line_grid, FOURIER)
    assert type(stored) is type(f)
    assert np.array_equal(stored.coeffs, f.coeffs)


def test_truncated_container(tmp_path, line_grid):
    """A payload shorter than its header should be rejected"""
    path = tmp_path / "u.field"
    write_field(path, random_field(line_grid, seed=0))
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(ConfigurationException) as ex:
        read_field(path)
    assert "header describes shape" in ex.value.args[0]


@pytest.mark.parametrize(
    "header",
    [
        b"not json\n",
        b'{"kind": "spacetime"}\n',
        b'{"kind": "spatial", "rep": "Fourier", "grid": {"n": 1, "nx": 2, "length": 1.0, "nt": 2, "period": 1.0}, "dtype": "<f8"}\n',
    ],
)
def test_invalid_header(tmp_path, header):
    """Headers which do not describe a field should be rejected"""
    path = tmp_path / "u.field"
    path.write_bytes(header)
    with pytest.raises(ConfigurationException):
        read_field(path)


def test_slice_norms(tmp_path, small_line_grid):
    """A unimodular plane wave has unit L² and L^∞ norm at every time"""
    u = plane_wave(small_line_grid, j=1, k=(3,))
    norms = slice_norms(u)
    assert len(norms) == 16
    assert norms[1][0] == pytest.approx(1 / 16)
    assert all(l2 == pytest.approx(1.0) and linf == pytest.approx(1.0) for _, l2, linf in norms)
    path = tmp_path / "slices.csv"
    write_slice_norms(path, u)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,l2,linf"
    assert len(lines) == 17


def test_slice_norms_zero(small_line_grid):
    """The zero field has zero norms"""
    u = make_field(small_line_grid, np.zeros((16, 16)))
    assert all(l2 == 0 and linf == 0 for _, l2, linf in slice_norms(u))
