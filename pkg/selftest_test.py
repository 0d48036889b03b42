"""Tests for the known-answer checks"""
import json

import pytest

from config import load_run_config
from grid_spectral import random_field
from reports import compare_golden, load_golden
from selftest import (
    EXACT,
    ROUNDING,
    collinear_angle,
    cone_partition_defect,
    duhamel_cauchy_defect,
    idempotence_defect,
    partition_of_unity_defect,
    plancherel_defect,
    run_selftest,
    selftest_rows,
    selftest_summary,
    trace_roundtrip_defect,
    zero_solve_steps,
)


pytestmark = pytest.mark.asyncio


# pylint: disable=redefined-outer-name
@pytest.fixture
def line_config(tmp_path):
    """A RunConfig on a 16 point line"""
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps({"grid": {"n": 1, "nx": 16, "length": 1.0, "nt": 16, "period": 1.0}}),
        encoding="utf-8",
    )
    return load_run_config(str(path), environ={})


def test_partitions(plane_grid):
    """The shell and cone partitions should sum to one"""
    assert partition_of_unity_defect(plane_grid) <= EXACT
    assert cone_partition_defect(plane_grid) <= EXACT


def test_field_identities(line_grid):
    """Idempotence, Plancherel and the trace round trip should hold to rounding"""
    u = random_field(line_grid, seed=3)
    assert idempotence_defect(line_grid, u) <= EXACT
    assert plancherel_defect(u) <= ROUNDING
    assert trace_roundtrip_defect(line_grid, u) <= ROUNDING


def test_duhamel_starts_at_rest(small_line_grid):
    """□^{-1}F should vanish with its time derivative at t = 0"""
    assert duhamel_cauchy_defect(random_field(small_line_grid, seed=0)) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_collinear_angle(n):
    """Parallel vectors should have angle zero"""
    assert collinear_angle(n) == 0


def test_zero_solve(line_config):
    """Zero data should converge in one step"""
    assert zero_solve_steps(line_config.grid, line_config.solver) == 1


async def test_run_selftest_line(line_config):
    """Every check should pass on a line, and the angular check should be skipped"""
    results = await run_selftest(line_config)
    names = [result.name for result in results]
    assert "angular_reconstruction" not in names
    assert "strichartz_energy_pair" in names
    assert all(result.passed for result in results), [r for r in results if not r.passed]
    assert not compare_golden(selftest_summary(results), load_golden("default")["selftest"])
    assert selftest_rows(results)[0] == results[0]._asdict()


async def test_failed_check_logged(mocker, line_config):
    """A failing check should be reported as not passed with a warning"""
    mocker.patch("selftest.plancherel_defect", return_value=1.0)
    warning = mocker.patch("selftest.log.warning")
    results = await run_selftest(line_config)
    plancherel = next(result for result in results if result.name == "plancherel")
    assert plancherel.passed is False
    assert warning.call_count == 1
    mismatches = compare_golden(selftest_summary(results), load_golden("default")["selftest"])
    assert mismatches == ["plancherel.passed: expected True, got False"]
