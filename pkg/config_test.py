"""Tests for config"""
import json
import math

import pytest

from config import load_run_config, merge_config, read_json
from constants import DEFAULT_CONFIG_PATH, FILE_DATA, OUTPUT_DIR_ENV, SCALAR_MODEL
from exception import ConfigurationException


# pylint: disable=redefined-outer-name
@pytest.fixture
def write_config(tmp_path):
    """Write a user config and return its path"""

    def _write(value):
        path = tmp_path / "config.json"
        path.write_text(value if isinstance(value, str) else json.dumps(value), encoding="utf-8")
        return str(path)

    return _write


def test_default_config():
    """The shipped config should load into a two dimensional scalar run"""
    config = load_run_config(environ={})
    assert config.grid.n == 2
    assert config.grid.nx == 32
    assert config.schematic.system == SCALAR_MODEL
    assert config.solver.epsilon0 == 0.001
    assert config.verify.c == 0.125
    assert config.verify.ceiling == math.inf
    assert config.verify.exponents == ((math.inf, 2.0),)
    assert config.output.directory == "wave_calculus_out"
    assert config.resolved == read_json(DEFAULT_CONFIG_PATH)


def test_merge_overrides(write_config):
    """A user file should override only the fields it names"""
    path = write_config({"grid": {"n": 1, "nx": 64}, "verify": {"c": 0.0625}})
    config = load_run_config(path, environ={})
    assert config.grid.n == 1
    assert config.grid.nx == 64
    assert config.grid.nt == 32
    assert config.verify.c == 0.0625
    assert config.resolved["grid"]["length"] == 1.0


def test_merge_does_not_mutate():
    """merge_config should leave the defaults untouched"""
    defaults = {"grid": {"n": 2}}
    merged = merge_config(defaults, {"grid": {"n": 3}})
    assert merged == {"grid": {"n": 3}}
    assert defaults == {"grid": {"n": 2}}


def test_syntax_error_position(write_config):
    """JSON syntax errors should name the line and column"""
    path = write_config('{\n  "grid": {\n    "n": 2,\n  }\n}')
    with pytest.raises(ConfigurationException) as ex:
        load_run_config(path, environ={})
    assert "line 4 column 3" in ex.value.args[0]


@pytest.mark.parametrize(
    "override, message",
    [
        ({"grid": {"dimension": 2}}, "Unknown config field grid.dimension"),
        ({"solver": {"max_iter": "ten"}}, "solver.max_iter must be of type int"),
        ({"solver": {"nonlinear": 1}}, "solver.nonlinear must be of type bool"),
        ({"grid": 2}, "grid must be an object"),
        ({"grid": {"nx": 30}}, "grid: nx must be a power of two"),
        ({"profile": {"kind": "smooth", "transition": 0.9}}, "profile: Transition width"),
        ({"verify": {"estimates": ["strichartz", "bogus"]}}, "verify.estimates[1]"),
        ({"verify": {"ensemble": {"count": 4}}}, "verify.ensemble.count"),
        ({"verify": {"exponents": [[2]]}}, "verify.exponents[0]"),
        ({"verify": {"lams": []}}, "verify.lams"),
        ({"output": {"formats": ["xml"]}}, "output.formats[0]"),
        ({"data": {"kind": FILE_DATA}}, "data.path"),
        ({"schematic": {"system": "KdV"}}, "schematic: Unexpected option KdV"),
    ],
)
def test_invalid_fields(write_config, override, message):
    """Invalid fields should be reported with their dotted path"""
    with pytest.raises(ConfigurationException) as ex:
        load_run_config(write_config(override), environ={})
    assert message in ex.value.args[0]


def test_derivative_choice_keyword(write_config):
    """derivative_choice accepts the gradient keyword as well as an axis"""
    config = load_run_config(write_config({"solver": {"derivative_choice": "gradient"}}), environ={})
    assert config.solver.derivative_choice == "gradient"


def test_s_c_override(write_config):
    """An explicit s_c should replace the derived value"""
    config = load_run_config(write_config({"schematic": {"s_c": "1/2"}}), environ={})
    assert [str(value) for value in config.schematic.s_c] == ["1/2"]


@pytest.mark.parametrize(
    "out, environ, expected",
    [
        (None, {}, "wave_calculus_out"),
        (None, {OUTPUT_DIR_ENV: "from_env"}, "from_env"),
        ("from_flag", {OUTPUT_DIR_ENV: "from_env"}, "from_flag"),
    ],
)
def test_output_directory(out, environ, expected):
    """--out should beat the environment, which beats the file"""
    config = load_run_config(out=out, environ=environ)
    assert config.output.directory == expected
    assert config.resolved["output"]["directory"] == expected


def test_command_line_overrides():
    """seed and threads from the command line should replace the file values"""
    config = load_run_config(seed=7, threads=3, environ={})
    assert config.seed == 7
    assert config.threads == 3
    assert config.resolved["seed"] == 7


def test_missing_file(tmp_path):
    """A missing config file should be a configuration error"""
    with pytest.raises(ConfigurationException):
        load_run_config(str(tmp_path / "missing.json"), environ={})
