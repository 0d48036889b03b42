"""Deterministic CSV and JSON report writers"""
import csv
from fractions import Fraction
from functools import lru_cache
import json
import logging
import math
import os

import numpy as np

from constants import CSV_FORMAT, GOLDEN_DIR, JSON_FORMAT, REPORT_SCHEMA_PATH
from exception import ConfigurationException, ContractViolationException
from grid_spectral import times


log = logging.getLogger(__name__)

ESTIMATE_PARAMS = ("lam", "mu", "d", "q", "r", "n")


@lru_cache(maxsize=1)
def load_schema():
    """Column orders per report kind, from report_schema.json"""
    with open(REPORT_SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def jsonable(value):
    """
    Convert namedtuples, numpy values and fractions into plain JSON values

    Non-finite floats become the strings "inf", "-inf" and "nan" so the output stays strict JSON.
    """
    if hasattr(value, "_asdict"):
        return {key: jsonable(item) for key, item in value._asdict().items()}
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [jsonable(item) for item in value.tolist()]
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, complex):
        return [jsonable(value.real), jsonable(value.imag)]
    return value


def format_cell(value):
    """CSV text of one value, with floats written by repr"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_json(path, payload):
    """Write sorted, indented JSON with a trailing newline"""
    text = json.dumps(jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.write("\n")
    log.info("Wrote %s", path)


def write_csv(path, kind, rows):
    """
    Write rows with the column order of a report kind

    Args:
        path (str): Where to write
        kind (str): A key of report_schema.json
        rows (iterable of dict): One dict per row, with exactly the schema's columns
    """
    schema = load_schema()
    if kind not in schema:
        raise ContractViolationException(f"No column order for report kind {kind}")
    columns = schema[kind]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if set(row) != set(columns):
                raise ContractViolationException(
                    f"Row columns {sorted(row)} do not match {kind} columns {columns}"
                )
            writer.writerow([format_cell(row[column]) for column in columns])
    log.info("Wrote %s", path)


def envelope(kind, config, content_hash, body):
    """Wrap a report body with its kind, the resolved config and the input hash"""
    return {
        "kind": kind,
        "config": config.resolved,
        "content_hash": content_hash,
        **body,
    }


def write_report(directory, name, kind, payload, rows, formats):
    """
    Write name.json and name.csv, as selected by formats

    Returns:
        list of str: The paths written
    """
    os.makedirs(directory, exist_ok=True)
    paths = []
    if JSON_FORMAT in formats:
        path = os.path.join(directory, f"{name}.json")
        write_json(path, payload)
        paths.append(path)
    if CSV_FORMAT in formats:
        path = os.path.join(directory, f"{name}.csv")
        write_csv(path, kind, rows)
        paths.append(path)
    return paths


def estimate_rows(report):
    """
    One row per measured sample of an EstimateReport

    Reports without samples, rejected ones included, get a single row with empty sample and ratio.
    """
    samples = list(enumerate(report.ratios)) or [(None, None)]
    return [
        {
            "estimate_id": report.estimate_id,
            **{key: report.params.get(key) for key in ESTIMATE_PARAMS},
            "sample": index,
            "ratio": ratio,
            "max_ratio": report.max_ratio,
            "median_ratio": report.median_ratio,
            "ceiling": report.ceiling,
            "verdict": report.verdict,
        }
        for index, ratio in samples
    ]


def support_row(report):
    """The summary row of a SupportCheckReport"""
    columns = load_schema()["support"]
    values = report._asdict()
    return {column: values[column] for column in columns}


def trace_rows(trace):
    """Per-step norms of an IterationTrace"""
    return [
        {
            "step": index + 1,
            "iterate_norm": iterate,
            "difference_norm": difference,
            "residual": residual,
        }
        for index, (iterate, difference, residual) in enumerate(
            zip(trace.iterate_norms, trace.difference_norms, trace.residuals)
        )
    ]


def scatter_rows(grid, scattering):
    """δ(t) and its bounds at every grid time"""
    return [
        {
            "t": float(t),
            "discrepancy": float(discrepancy),
            "bound": float(bound),
            "energy_discrepancy": float(energy_discrepancy),
            "energy_bound": float(energy_bound),
        }
        for t, discrepancy, bound, energy_discrepancy, energy_bound in zip(
            times(grid),
            scattering.discrepancy,
            scattering.bound,
            scattering.energy_discrepancy,
            scattering.energy_bound,
        )
    ]


def norm_rows(table):
    """The rows of a DyadicNormTable"""
    return [row._asdict() for row in table.rows]


def load_golden(name):
    """
    Pinned expectations from golden/<name>.json

    Returns:
        dict: Section to key to expected fields, empty when the file does not exist
    """
    path = os.path.join(GOLDEN_DIR, f"{name}.json")
    if not os.path.exists(path):
        return {}
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as ex:
            raise ConfigurationException(
                f"{path}: line {ex.lineno} column {ex.colno}: {ex.msg}"
            ) from ex


def compare_golden(results, expected):
    """
    Compare results against pinned values

    Expected entries are either exact values or [low, high] intervals for numbers. Keys present in
    only one of the two are ignored.

    Args:
        results (dict): key to dict of measured fields
        expected (dict): key to dict of pinned fields

    Returns:
        list of str: One message per mismatch
    """
    mismatches = []
    for key in sorted(set(results) & set(expected)):
        for field, pinned in sorted(expected[key].items()):
            actual = results[key].get(field)
            if isinstance(pinned, list):
                low, high = pinned
                if actual is None or not low <= actual <= high:
                    mismatches.append(f"{key}.{field}: {actual} outside [{low}, {high}]")
            elif actual != pinned:
                mismatches.append(f"{key}.{field}: expected {pinned}, got {actual}")
    return mismatches
