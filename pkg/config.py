"""Run configuration: a JSON key tree merged over default_config.json"""
from collections import namedtuple
from contextlib import contextmanager
import copy
import json
import logging
import math
import os

from constants import (
    DEFAULT_CONFIG_PATH,
    FILE_DATA,
    MIN_ENSEMBLE_COUNT,
    OUTPUT_DIR_ENV,
    VALID_AMPLITUDE_LAWS,
    VALID_DATA_KINDS,
    VALID_ESTIMATES,
    VALID_FORMATS,
    VALID_LEMMAS,
    VALID_SUPPORT_MODES,
)
from exception import ConfigurationException
from grid_spectral import make_grid
from lib import parse_extended_real, parse_text_matching_options
from multipliers import make_profile
from solver import make_iteration_config
from spaces import schematic_params


log = logging.getLogger(__name__)


RunConfig = namedtuple(
    "RunConfig",
    [
        "grid",
        "profile",
        "schematic",
        "solver",
        "data",
        "verify",
        "output",
        "seed",
        "threads",
        "resolved",
    ],
)
DataConfig = namedtuple(
    "DataConfig", ["kind", "lam", "amplitude", "k", "path", "velocity_path"]
)
EnsembleConfig = namedtuple("EnsembleConfig", ["count", "law"])
SupportConfig = namedtuple(
    "SupportConfig",
    ["n", "lam", "mu", "ds", "mode", "angle_ceiling", "pair_cap", "sample_count"],
)
VerifyConfig = namedtuple(
    "VerifyConfig",
    [
        "estimates",
        "lams",
        "mus",
        "ds",
        "c",
        "exponents",
        "ensemble",
        "ceiling",
        "lemmas",
        "support",
    ],
)
OutputConfig = namedtuple("OutputConfig", ["directory", "formats"])

# fields which take either a number or a keyword
NUMBER_OR_TEXT_FIELDS = {"solver.derivative_choice"}


def read_json(path):
    """
    Parse a JSON file, reporting syntax errors with their position

    Args:
        path (str): The file

    Returns:
        dict: The parsed object
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as ex:
        raise ConfigurationException(f"Unable to read config {path}: {ex}") from ex
    try:
        value = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ConfigurationException(
            f"{path}: line {ex.lineno} column {ex.colno}: {ex.msg}"
        ) from ex
    if not isinstance(value, dict):
        raise ConfigurationException(f"{path}: expected a JSON object at the top level")
    return value


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_type(dotted, default, value):
    if default is None:
        return
    if dotted in NUMBER_OR_TEXT_FIELDS and isinstance(value, str):
        return
    if isinstance(default, bool):
        valid = isinstance(value, bool)
    elif _is_number(default):
        valid = _is_number(value)
    else:
        valid = isinstance(value, type(default))
    if not valid:
        raise ConfigurationException(
            f"{dotted} must be of type {type(default).__name__}, got {json.dumps(value)}"
        )


def merge_config(defaults, overrides, path=""):
    """
    Deep-merge overrides into defaults, rejecting keys the defaults do not have

    Args:
        defaults (dict): The default key tree
        overrides (dict): User values
        path (str): Dotted prefix for messages

    Returns:
        dict: A new merged tree
    """
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        dotted = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigurationException(f"Unknown config field {dotted}")
        default = defaults[key]
        if isinstance(default, dict):
            if not isinstance(value, dict):
                raise ConfigurationException(f"{dotted} must be an object")
            merged[key] = merge_config(default, value, dotted)
        else:
            _check_type(dotted, default, value)
            merged[key] = copy.deepcopy(value)
    return merged


@contextmanager
def config_field(dotted):
    """Prefix configuration errors raised inside the block with a field path"""
    try:
        yield
    except ConfigurationException as ex:
        raise ConfigurationException(f"{dotted}: {ex}") from ex


def _positive_list(values, dotted):
    with config_field(dotted):
        if not values or not all(_is_number(value) and value > 0 for value in values):
            raise ConfigurationException(
                f"Expected a nonempty list of positive numbers, got {values}"
            )
    return tuple(float(value) for value in values)


def _data_config(block):
    with config_field("data.kind"):
        parse_text_matching_options(VALID_DATA_KINDS)(block["kind"])
    if block["kind"] == FILE_DATA and not block["path"]:
        raise ConfigurationException("data.path: required when data.kind is file")
    with config_field("data.amplitude"):
        if not block["amplitude"] >= 0:
            raise ConfigurationException(
                f"Amplitude must not be negative, got {block['amplitude']}"
            )
    return DataConfig(
        kind=block["kind"],
        lam=float(block["lam"]),
        amplitude=float(block["amplitude"]),
        k=tuple(int(value) for value in block["k"]),
        path=block["path"],
        velocity_path=block["velocity_path"],
    )


def _verify_config(block):
    for index, estimate in enumerate(block["estimates"]):
        with config_field(f"verify.estimates[{index}]"):
            parse_text_matching_options(VALID_ESTIMATES)(estimate)
    for index, lemma in enumerate(block["lemmas"]):
        with config_field(f"verify.lemmas[{index}]"):
            parse_text_matching_options(VALID_LEMMAS)(lemma)
    exponents = []
    for index, pair in enumerate(block["exponents"]):
        with config_field(f"verify.exponents[{index}]"):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigurationException(f"Expected a [q, r] pair, got {pair}")
            exponents.append(tuple(parse_extended_real(value) for value in pair))
    ensemble = block["ensemble"]
    with config_field("verify.ensemble.count"):
        if not isinstance(ensemble["count"], int) or ensemble["count"] < MIN_ENSEMBLE_COUNT:
            raise ConfigurationException(
                f"Ensembles need at least {MIN_ENSEMBLE_COUNT} members, got {ensemble['count']}"
            )
    with config_field("verify.ensemble.law"):
        parse_text_matching_options(VALID_AMPLITUDE_LAWS)(ensemble["law"])
    support = block["support"]
    with config_field("verify.support.mode"):
        parse_text_matching_options(VALID_SUPPORT_MODES)(support["mode"])
    with config_field("verify.ceiling"):
        ceiling = (
            math.inf if block["ceiling"] is None else parse_extended_real(block["ceiling"])
        )
    return VerifyConfig(
        estimates=tuple(block["estimates"]),
        lams=_positive_list(block["lams"], "verify.lams"),
        mus=_positive_list(block["mus"], "verify.mus"),
        ds=_positive_list(block["ds"], "verify.ds"),
        c=float(block["c"]),
        exponents=tuple(exponents),
        ensemble=EnsembleConfig(count=ensemble["count"], law=ensemble["law"]),
        ceiling=ceiling,
        lemmas=tuple(block["lemmas"]),
        support=SupportConfig(
            n=support["n"],
            lam=float(support["lam"]),
            mu=float(support["mu"]),
            ds=_positive_list(support["ds"], "verify.support.ds"),
            mode=support["mode"],
            angle_ceiling=float(support["angle_ceiling"]),
            pair_cap=int(support["pair_cap"]),
            sample_count=int(support["sample_count"]),
        ),
    )


def _output_directory(block, out, environ):
    if out:
        return out
    if environ.get(OUTPUT_DIR_ENV):
        return environ[OUTPUT_DIR_ENV]
    return block["directory"]


def build_run_config(tree, *, out=None, environ=None):
    """
    Validate a merged key tree and build the RunConfig

    Args:
        tree (dict): A tree with every default key present
        out (str or None): Output directory from the command line
        environ (dict or None): Environment, os.environ by default

    Returns:
        RunConfig: The validated configuration
    """
    environ = os.environ if environ is None else environ
    grid_block = tree["grid"]
    with config_field("grid"):
        grid = make_grid(**grid_block)
    with config_field("profile"):
        profile = make_profile(tree["profile"]["kind"], tree["profile"]["transition"])
    with config_field("schematic"):
        schematic = schematic_params(
            tree["schematic"]["system"], grid.n, s_c=tree["schematic"]["s_c"]
        )
    with config_field("solver"):
        solver = make_iteration_config(schematic=schematic, **tree["solver"])
    for index, value in enumerate(tree["output"]["formats"]):
        with config_field(f"output.formats[{index}]"):
            parse_text_matching_options(VALID_FORMATS)(value)
    with config_field("threads"):
        if tree["threads"] < 1:
            raise ConfigurationException(f"threads must be positive, got {tree['threads']}")
    directory = _output_directory(tree["output"], out, environ)
    resolved = copy.deepcopy(tree)
    resolved["output"]["directory"] = directory
    return RunConfig(
        grid=grid,
        profile=profile,
        schematic=schematic,
        solver=solver,
        data=_data_config(tree["data"]),
        verify=_verify_config(tree["verify"]),
        output=OutputConfig(directory=directory, formats=tuple(tree["output"]["formats"])),
        seed=tree["seed"],
        threads=tree["threads"],
        resolved=resolved,
    )


def load_run_config(path=None, *, out=None, seed=None, threads=None, environ=None):
    """
    Load the default configuration, merge a user file over it and apply command line overrides

    Args:
        path (str or None): User config file
        out (str or None): --out, which beats the environment and the file
        seed (int or None): --seed
        threads (int or None): --threads
        environ (dict or None): Environment, os.environ by default

    Returns:
        RunConfig: The validated configuration
    """
    tree = read_json(DEFAULT_CONFIG_PATH)
    if path is not None:
        tree = merge_config(tree, read_json(path))
        log.info("Loaded config from %s", path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if threads is not None:
        overrides["threads"] = threads
    tree = merge_config(tree, overrides)
    return build_run_config(tree, out=out, environ=environ)
