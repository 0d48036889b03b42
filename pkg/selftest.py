"""Checks whose outcome is known exactly, run by the selftest subcommand"""
from collections import namedtuple
import logging
import math

import numpy as np

from constants import (
    ANGULAR_RECONSTRUCTION,
    CONE,
    SHELL,
    SHELL_CONE,
    SIGNED,
    SPACETIME_FOURIER,
    SPATIAL_BELOW,
)
from grid_spectral import (
    cone_shells,
    convert,
    frequency_shells,
    l2_norm,
    lattice_geometry,
    make_field,
    make_spatial_field,
    random_field,
    spatial_shape,
)
from multipliers import SymbolSpec, apply, cached_symbol, principal_angle
from solver import picard_solve
from verify import inclusion_checks, make_ensemble, make_ensemble_spec, strichartz_ratio
from wave_ops import box, duhamel, trace_decompose, trace_reconstruct, xi_inverse


log = logging.getLogger(__name__)


SelftestResult = namedtuple("SelftestResult", ["name", "passed", "value", "tolerance"])

EXACT = 1e-12
ROUNDING = 1e-10
QUADRATURE = 1e-8


def _relative(difference, reference):
    return difference / reference if reference > 0 else difference


def _off_origin(grid):
    geometry = lattice_geometry(grid)
    return geometry.radius > 0


def partition_of_unity_defect(grid):
    """max |Σ_λ S_λ − 1| away from the origin"""
    total = sum(
        cached_symbol(grid, SymbolSpec(kind=SHELL, lam=lam)).weights(grid)
        for lam in frequency_shells(grid)
    )
    return float(np.abs(total - 1)[_off_origin(grid)].max())


def cone_partition_defect(grid):
    """max |Σ_d C_d + 1{cone residue} − 1| away from the origin"""
    total = sum(
        cached_symbol(grid, SymbolSpec(kind=CONE, d=d)).weights(grid)
        for d in cone_shells(grid)
    )
    total = total + lattice_geometry(grid).residue
    return float(np.abs(total - 1)[_off_origin(grid)].max())


def idempotence_defect(grid, u):
    """max over λ of ‖S_λS_λu − S_λu‖ / ‖u‖"""
    worst = 0.0
    for lam in frequency_shells(grid):
        symbol = cached_symbol(grid, SymbolSpec(kind=SHELL, lam=lam))
        once = apply(symbol, u)
        twice = apply(symbol, once)
        difference = make_field(grid, twice.coeffs - once.coeffs, u.rep)
        worst = max(worst, _relative(l2_norm(difference), l2_norm(u)))
    return worst


def plancherel_defect(u):
    """|‖u‖ in physical − ‖u‖ in spacetime-Fourier| / ‖u‖"""
    physical = l2_norm(u)
    return _relative(abs(physical - l2_norm(convert(u, SPACETIME_FOURIER))), physical)


def xi_inverse_defect(grid, u):
    """‖□Ξ^{-1}F − F‖ / ‖F‖ for F in a cone shell away from the guard band"""
    d = cone_shells(grid)[min(1, len(cone_shells(grid)) - 1)]
    source = apply(cached_symbol(grid, SymbolSpec(kind=CONE, d=d)), u)
    recovered = box(xi_inverse(source, d))
    difference = make_field(grid, recovered.coeffs - source.coeffs, source.rep)
    return _relative(l2_norm(difference), l2_norm(source))


def trace_roundtrip_defect(grid, u):
    """‖reconstruct(decompose(S^+_λu)) − S^+_λu‖ / ‖S^+_λu‖ on a middle shell"""
    shells = frequency_shells(grid)
    lam = shells[len(shells) // 2]
    localized = convert(
        apply(cached_symbol(grid, SymbolSpec(kind=SIGNED, lam=lam, sign=1)), u),
        SPACETIME_FOURIER,
    )
    rebuilt = trace_reconstruct(trace_decompose(localized, lam, 1))
    difference = make_field(grid, rebuilt.coeffs - localized.coeffs, SPACETIME_FOURIER)
    return _relative(l2_norm(difference), l2_norm(localized))


def duhamel_cauchy_defect(u):
    """Largest |□^{-1}F| or |∂_t□^{-1}F| at t = 0"""
    solution = duhamel(u)
    return float(
        max(
            np.abs(solution.field.coeffs[0]).max(),
            np.abs(solution.velocity.coeffs[0]).max(),
        )
    )


def collinear_angle(n):
    """Angle between ξ' and ξ = 2ξ', which is zero"""
    direction = np.zeros(n)
    direction[0] = 1.0
    return float(principal_angle(direction, 2 * direction))


def zero_solve_steps(grid, iteration_config):
    """Picard steps taken from zero data, one when the iteration stops at once"""
    components = len(iteration_config.schematic.sigma)
    zero = make_spatial_field(grid, np.zeros(spatial_shape(grid)))
    zeros = zero if components == 1 else (zero,) * components
    trace = picard_solve(zeros, zeros, iteration_config)
    return trace.steps if trace.converged else math.inf


def _result(name, value, tolerance):
    passed = bool(value <= tolerance)
    if passed:
        log.info("selftest %s passed: %s", name, value)
    else:
        log.warning("selftest %s failed: %s exceeds %s", name, value, tolerance)
    return SelftestResult(name=name, passed=passed, value=float(value), tolerance=tolerance)


async def run_selftest(config):
    """
    Run every check on the configured grid

    Args:
        config (RunConfig): The run configuration

    Returns:
        list of SelftestResult: One result per check
    """
    grid = config.grid
    u = random_field(grid, seed=config.seed)
    shells = frequency_shells(grid)
    lam = shells[len(shells) // 2]
    results = [
        _result("partition_of_unity", partition_of_unity_defect(grid), EXACT),
        _result("cone_partition", cone_partition_defect(grid), EXACT),
        _result("projector_idempotence", idempotence_defect(grid, u), EXACT),
        _result("plancherel", plancherel_defect(u), ROUNDING),
        _result("xi_inverse_identity", xi_inverse_defect(grid, u), ROUNDING),
        _result("trace_roundtrip", trace_roundtrip_defect(grid, u), ROUNDING),
        _result("duhamel_cauchy_data", duhamel_cauchy_defect(u), QUADRATURE),
        _result("collinear_angle", collinear_angle(grid.n), EXACT),
    ]

    spatial = make_ensemble(
        grid,
        make_ensemble_spec(
            count=8, localization=SymbolSpec(kind=SPATIAL_BELOW, lam=lam), seed=config.seed
        ),
    )
    energy = await strichartz_ratio(math.inf, 2, lam, spatial, threads=config.threads)
    results.append(
        _result(
            "strichartz_energy_pair",
            max(abs(ratio - 1) for ratio in energy.ratios),
            ROUNDING,
        )
    )
    if grid.n >= 2:
        d = cone_shells(grid)[0]
        cells = make_ensemble(
            grid,
            make_ensemble_spec(
                count=8, localization=SymbolSpec(kind=SHELL_CONE, lam=lam, d=d), seed=config.seed
            ),
        )
        reports = await inclusion_checks(
            cells, lam, d, items=[ANGULAR_RECONSTRUCTION], threads=config.threads
        )
        results.append(
            _result(
                "angular_reconstruction",
                max(reports[ANGULAR_RECONSTRUCTION].max_ratio - 1, 0.0),
                ROUNDING,
            )
        )
    results.append(_result("zero_data_solve", zero_solve_steps(grid, config.solver), 1))
    log.info(
        "selftest finished: %s of %s passed",
        sum(result.passed for result in results),
        len(results),
    )
    return results


def selftest_rows(results):
    """Report rows for the selftest CSV"""
    return [result._asdict() for result in results]


def selftest_summary(results):
    """name to {passed} for golden comparison"""
    return {result.name: {"passed": result.passed} for result in results}
