#!/usr/bin/env python3
"""Command line front end: decompose, norms, solve, verify, scatter and selftest"""
import argparse
import asyncio
import logging
import os
import sys

import numpy as np
import sentry_sdk

from config import load_run_config
from constants import (
    DECOMPOSE,
    FAIL,
    FILE_DATA,
    FOURIER,
    HH,
    LOCAL_STRICHARTZ,
    MODE_DATA,
    NORMS,
    PROXY_FIDELITY,
    RANDOM_DATA,
    SCATTER,
    SELFTEST,
    SHELL,
    SHELL_CONE,
    SOLVE,
    SPACETIME_FOURIER,
    SPATIAL,
    SPATIAL_BELOW,
    STRICHARTZ,
    VALID_INCLUSION_ITEMS,
    VALID_PRODUCT_KINDS,
    VERIFY,
    VALID_SUBCOMMANDS,
)
from exception import (
    ConfigurationException,
    HypothesisException,
    InadmissibleExponentsException,
    UnsupportedDimensionException,
)
from executor import fft_workers
from field_io import read_field, write_field, write_slice_norms
from grid_spectral import (
    SpatialField,
    convert,
    frequency_shells,
    l2_norm,
    lattice_geometry,
    make_field,
    make_spatial_field,
    spatial_l2_norm,
    spatial_mode,
    spatial_shape,
)
from lib import content_hash
from multipliers import SymbolSpec, cached_symbol
from reports import (
    compare_golden,
    envelope,
    estimate_rows,
    load_golden,
    norm_rows,
    scatter_rows,
    support_row,
    trace_rows,
    write_report,
)
from selftest import run_selftest, selftest_rows, selftest_summary
from solver import picard_solve, scattering_data
from spaces import norm_table, relevant_modulations, sector_pieces
from verify import (
    inclusion_checks,
    local_strichartz_ratio,
    make_ensemble,
    make_ensemble_spec,
    product_estimate_check,
    proxy_fidelity,
    rejected_report,
    strichartz_ratio,
    support_check,
)
from wave_ops import propagate


log = logging.getLogger(__name__)

GOLDEN_NAME = "default"
SCATTER_SLACK = 1e-8


def init_sentry():
    """Initialize the Sentry SDK"""
    sentry_dsn = os.environ.get("SENTRY_SDK", "")

    if sentry_dsn:
        sentry_sdk.init(
            dsn=sentry_dsn,
            send_default_pii=False,
        )


def parse_args(argv):
    """Parse the command line"""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("subcommand", choices=VALID_SUBCOMMANDS)
    parser.add_argument("--config", dest="config_path", default=None, help="JSON config file")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    return parser.parse_args(argv)


def _zero(grid):
    return make_spatial_field(grid, np.zeros(spatial_shape(grid)))


def _random_data(config, rng):
    grid = config.grid
    weights = cached_symbol(grid, SymbolSpec(kind=SPATIAL, lam=config.data.lam)).spatial_weights(
        grid
    )
    shape = spatial_shape(grid)
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * weights
    norm = spatial_l2_norm(make_spatial_field(grid, coeffs, FOURIER))
    if norm == 0:
        raise ConfigurationException(f"data.lam={config.data.lam} selects no lattice points")
    return make_spatial_field(grid, coeffs * config.data.amplitude / norm, FOURIER)


def _read_spatial(path, grid):
    field = read_field(path)
    if not isinstance(field, SpatialField) or field.grid != grid:
        raise ConfigurationException(f"{path} does not hold spatial data on the configured grid")
    return field


def make_data(config):
    """
    Build the Cauchy data described by the data block

    Returns:
        tuple: (f, g), each a SpatialField or a tuple with one field per component
    """
    grid = config.grid
    data = config.data
    components = len(config.schematic.sigma)
    if data.kind == FILE_DATA and components > 1:
        raise ConfigurationException("data.kind file supports single component systems only")
    fs, gs = [], []
    for index in range(components):
        if data.kind == RANDOM_DATA:
            rng = np.random.default_rng(config.seed + index)
            fs.append(_random_data(config, rng))
            gs.append(_random_data(config, rng))
        elif data.kind == MODE_DATA:
            fs.append(spatial_mode(grid, k=tuple(data.k[: grid.n]), amplitude=data.amplitude))
            gs.append(_zero(grid))
        elif data.kind == FILE_DATA:
            fs.append(_read_spatial(data.path, grid))
            gs.append(_read_spatial(data.velocity_path, grid) if data.velocity_path else _zero(grid))
        else:
            fs.append(_zero(grid))
            gs.append(_zero(grid))
    if components == 1:
        return fs[0], gs[0]
    return tuple(fs), tuple(gs)


def _fields(value):
    return value if isinstance(value, tuple) else (value,)


def data_hash(f, g):
    """SHA-256 over the coefficients of every data component"""
    return content_hash(*(field.coeffs for field in _fields(f) + _fields(g)))


def _mass(grid, coeffs):
    return l2_norm(make_field(grid, coeffs, SPACETIME_FOURIER)) ** 2


def decompose_rows(u):
    """
    Coefficient mass per cell of the dyadic decomposition

    Rows with d empty hold the cone residue of a shell. In one dimension there are no angular
    sectors and ω is empty too.
    """
    grid = u.grid
    coeffs = convert(u, SPACETIME_FOURIER).coeffs
    residue = lattice_geometry(grid).residue
    rows = []
    for lam in frequency_shells(grid):
        shell = cached_symbol(grid, SymbolSpec(kind=SHELL, lam=lam)).weights(grid)
        rows.append({"lam": lam, "d": None, "omega": None, "mass": _mass(grid, coeffs * shell * residue)})
        for d in relevant_modulations(grid, lam):
            if grid.n == 1:
                cell = cached_symbol(grid, SymbolSpec(kind=SHELL_CONE, lam=lam, d=d)).weights(grid)
                rows.append({"lam": lam, "d": d, "omega": None, "mass": _mass(grid, coeffs * cell)})
                continue
            for omega, piece in sector_pieces(u, lam, d, coeffs=coeffs):
                rows.append({"lam": lam, "d": d, "omega": omega, "mass": _mass(grid, piece)})
    return rows


async def run_decompose(config, f, g):
    """Decompose the free wave of the first data component"""
    u = propagate(_fields(f)[0], _fields(g)[0])
    rows = decompose_rows(u)
    body = {"total_mass": l2_norm(u) ** 2, "cells": rows}
    return [(DECOMPOSE, DECOMPOSE, body, rows)], True


async def run_norms(config, f, g):
    """Dyadic norm table of the free wave of every data component"""
    outputs = []
    for index, (f_i, g_i) in enumerate(zip(_fields(f), _fields(g))):
        s = float(config.schematic.s_c[index])
        table = norm_table(propagate(f_i, g_i), s, profile=config.profile)
        rows = norm_rows(table)
        name = NORMS if index == 0 else f"{NORMS}_{index}"
        outputs.append((name, NORMS, {"s": s, "rows": rows}, rows))
    return outputs, True


def _trace_body(trace):
    return {
        "data_norm": trace.data_norm,
        "converged": trace.converged,
        "diverged": trace.diverged,
        "steps": trace.steps,
        "iterate_norms": trace.iterate_norms,
        "difference_norms": trace.difference_norms,
        "residuals": trace.residuals,
    }


async def run_solve(config, f, g):
    """Picard iteration from the configured data, with the final iterate written as fields"""
    trace = picard_solve(f, g, config.solver)
    directory = config.output.directory
    os.makedirs(directory, exist_ok=True)
    for index, field in enumerate(_fields(trace.solution)):
        write_field(os.path.join(directory, f"solution_{index}.field"), field)
        write_slice_norms(os.path.join(directory, f"solution_{index}_slices.csv"), field)
    rows = trace_rows(trace)
    if trace.diverged:
        log.warning("Picard iteration diverged after %s steps", trace.steps)
    elif not trace.converged:
        log.warning("Picard iteration stopped after %s steps without converging", trace.steps)
    return [(SOLVE, "trace", _trace_body(trace), rows)], not trace.diverged


async def run_scatter(config, f, g):
    """Asymptotic free data of the converged solution and the discrepancy against its bound"""
    trace = picard_solve(f, g, config.solver)
    scattering = scattering_data(trace)
    directory = config.output.directory
    os.makedirs(directory, exist_ok=True)
    outputs = []
    ok = True
    for index, part in enumerate(_fields(scattering)):
        write_field(os.path.join(directory, f"f_plus_{index}.field"), part.f_plus)
        write_field(os.path.join(directory, f"g_plus_{index}.field"), part.g_plus)
        rows = scatter_rows(config.grid, part)
        within = all(
            row["discrepancy"] <= row["bound"] * (1 + SCATTER_SLACK) + 1e-12 for row in rows
        )
        if not within:
            log.warning("Scattering discrepancy of component %s exceeds its tail bound", index)
        ok = ok and within
        body = {"steps": trace.steps, "within_bound": within, "rows": rows}
        name = SCATTER if index == 0 else f"{SCATTER}_{index}"
        outputs.append((name, SCATTER, body, rows))
    return outputs, ok


def _ensemble(config, offset=0, **localization):
    spec = make_ensemble_spec(
        count=config.verify.ensemble.count,
        localization=SymbolSpec(profile=config.profile, **localization),
        law=config.verify.ensemble.law,
        seed=config.seed + offset,
    )
    return make_ensemble(config.grid, spec)


async def _strichartz_reports(config):
    verify, threads = config.verify, config.threads
    reports = []
    for lam in verify.lams:
        ensemble = _ensemble(config, kind=SPATIAL_BELOW, lam=lam)
        for q, r in verify.exponents:
            try:
                report = await strichartz_ratio(
                    q, r, lam, ensemble, ceiling=verify.ceiling, threads=threads
                )
            except InadmissibleExponentsException as ex:
                log.warning("Rejected %s: %s", STRICHARTZ, ex)
                report = rejected_report(
                    STRICHARTZ, {"q": q, "r": r, "lam": lam, "n": config.grid.n}, verify.ceiling
                )
            reports.append(report)
    return reports


async def _local_strichartz_reports(config):
    verify = config.verify
    reports = []
    for lam in verify.lams:
        ensemble = _ensemble(config, kind=SPATIAL, lam=lam)
        for d in verify.ds:
            try:
                report = await local_strichartz_ratio(
                    lam, d, ensemble, ceiling=verify.ceiling, threads=config.threads
                )
            except UnsupportedDimensionException as ex:
                log.warning("Rejected %s: %s", LOCAL_STRICHARTZ, ex)
                report = rejected_report(
                    LOCAL_STRICHARTZ, {"lam": lam, "d": d, "n": config.grid.n}, verify.ceiling
                )
            reports.append(report)
    return reports


async def _inclusion_reports(config, items):
    verify = config.verify
    reports = []
    for lam in verify.lams:
        for d in verify.ds:
            ensemble = _ensemble(config, kind=SHELL_CONE, lam=lam, d=d)
            found = await inclusion_checks(
                ensemble, lam, d, items=items, ceiling=verify.ceiling, threads=config.threads
            )
            reports.extend(found[item] for item in items)
    return reports


async def _product_reports(config, kind):
    verify = config.verify
    reports = []
    for lam in verify.lams:
        for mu in verify.mus:
            high = mu if kind == HH else lam
            lows = _ensemble(config, kind=SHELL, lam=mu)
            highs = _ensemble(config, offset=1, kind=SHELL, lam=high)
            try:
                report = await product_estimate_check(
                    kind,
                    lam,
                    mu,
                    list(zip(lows, highs)),
                    c=verify.c,
                    ceiling=verify.ceiling,
                    threads=config.threads,
                )
            except HypothesisException as ex:
                log.warning("Rejected %s: %s", kind, ex)
                report = rejected_report(kind, {"lam": lam, "mu": mu, "n": config.grid.n}, verify.ceiling)
            reports.append(report)
    return reports


async def _support_reports(config):
    support = config.verify.support
    reports = []
    for lemma in config.verify.lemmas:
        for d in support.ds:
            reports.append(
                await support_check(
                    lemma,
                    support.lam,
                    support.mu,
                    d,
                    c=config.verify.c,
                    mode=support.mode,
                    n=support.n,
                    angle_ceiling=support.angle_ceiling,
                    seed=config.seed,
                    sample_count=support.sample_count,
                    pair_cap=support.pair_cap,
                )
            )
    return reports


def support_key(report):
    """Golden key of a support report"""
    return f"{report.lemma} lam={float(report.lam)} mu={float(report.mu)} d={float(report.d)}"


async def run_verify(config, f, g):
    """Every configured estimate, then the support lemmas against their pinned values"""
    estimates = config.verify.estimates
    reports = []
    if STRICHARTZ in estimates:
        reports.extend(await _strichartz_reports(config))
    if LOCAL_STRICHARTZ in estimates:
        reports.extend(await _local_strichartz_reports(config))
    items = [item for item in VALID_INCLUSION_ITEMS if item in estimates]
    if items:
        reports.extend(await _inclusion_reports(config, items))
    for kind in VALID_PRODUCT_KINDS:
        if kind in estimates:
            reports.extend(await _product_reports(config, kind))
    if PROXY_FIDELITY in estimates:
        for lam in config.verify.lams:
            reports.append(
                await proxy_fidelity(
                    config.grid,
                    lam,
                    config.verify.ensemble.count,
                    config.seed,
                    threads=config.threads,
                )
            )
    support = await _support_reports(config)
    summary = {
        support_key(report): {
            "angle_constant": report.angle_constant,
            "violation_count": report.violation_count,
            "status": report.status,
        }
        for report in support
    }
    mismatches = compare_golden(summary, load_golden(GOLDEN_NAME).get("support", {}))
    for mismatch in mismatches:
        log.warning("Golden mismatch: %s", mismatch)

    rows = [row for report in reports for row in estimate_rows(report)]
    support_rows = [support_row(report) for report in support]
    failed = [report.estimate_id for report in reports if report.verdict == FAIL]
    if failed:
        log.warning("Estimates above their ceiling: %s", ", ".join(failed))
    outputs = [
        ("estimates", "estimate", {"reports": reports}, rows),
        ("support", "support", {"reports": support_rows, "golden_mismatches": mismatches}, support_rows),
    ]
    return outputs, not failed and not mismatches


async def run_selftest_command(config, f, g):
    """Known-answer checks on the configured grid"""
    results = await run_selftest(config)
    mismatches = compare_golden(
        selftest_summary(results), load_golden(GOLDEN_NAME).get(SELFTEST, {})
    )
    for mismatch in mismatches:
        log.warning("Golden mismatch: %s", mismatch)
    rows = selftest_rows(results)
    body = {"results": rows, "golden_mismatches": mismatches}
    passed = all(result.passed for result in results)
    return [(SELFTEST, SELFTEST, body, rows)], passed and not mismatches


RUNNERS = {
    DECOMPOSE: run_decompose,
    NORMS: run_norms,
    SOLVE: run_solve,
    VERIFY: run_verify,
    SCATTER: run_scatter,
    SELFTEST: run_selftest_command,
}


async def run_subcommand(subcommand, config):
    """
    Run one subcommand and write its reports

    Returns:
        tuple: (list of written paths, whether every check passed)
    """
    f, g = make_data(config)
    digest = data_hash(f, g)
    with fft_workers(config.threads):
        outputs, ok = await RUNNERS[subcommand](config, f, g)
    paths = []
    for name, kind, body, rows in outputs:
        paths.extend(
            write_report(
                config.output.directory,
                name,
                kind,
                envelope(kind, config, digest, body),
                rows,
                config.output.formats,
            )
        )
    return paths, ok


async def async_main(argv=None):
    """
    Parse the command line, run the subcommand and report an exit status

    Returns:
        int: 0 on success, 1 on errors or failed checks
    """
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO)
    init_sentry()
    try:
        config = load_run_config(
            args.config_path, out=args.out, seed=args.seed, threads=args.threads
        )
        paths, ok = await run_subcommand(args.subcommand, config)
    except Exception:  # pylint: disable=broad-except
        log.exception("%s failed", args.subcommand)
        return 1
    if not ok:
        log.error("%s finished with failed checks, see %s", args.subcommand, ", ".join(paths))
        return 1
    log.info("%s finished, wrote %s", args.subcommand, ", ".join(paths))
    return 0


def main():
    """Run the command line"""
    loop = asyncio.get_event_loop()
    sys.exit(loop.run_until_complete(async_main()))


if __name__ == "__main__":
    main()
