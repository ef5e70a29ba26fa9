"""
The built-in commands: solve, energy, classify, sweep and verify.
"""

import concurrent.futures
import itertools
import logging
import math

import numpy as np
import tempora.timing

import mbwave

from . import analysis
from .core import Repeated, command, comma_list, parse_grid
from .delay import DelayProfile
from .emit import csv_lines, number, record_json
from .errors import ValidationError, VerificationFailure
from .fdm import FdmGrid, l2_error, observed_order, solve_fdm
from .scenario import load_scenario, parse_range, validate


log = logging.getLogger(__name__)


# thresholds applied by ``verify``
MAX_ERROR = 0.01
MIN_ORDER = 1.8
MAX_ENERGY_DEVIATION = 0.02

SWEEPABLE = {'k', 'a', 'mu1', 'mu2', 'tau', 'xi'}


def _profile_options():
    config = mbwave.config
    return dict(
        max_depth=config['max depth'],
        compatibility_tol=config['compatibility tol'],
        compatibility_samples=config['compatibility samples'],
        breakpoint_cap=config['breakpoint cap'],
    )


def _load(path, quad_tol=None):
    scenario = load_scenario(path, defaults=dict(quad_tol=mbwave.config['quad tol']))
    if quad_tol is not None:
        scenario = validate(scenario.replace(quad_tol=quad_tol))
    return scenario


def _regime(scenario):
    if scenario.is_delay:
        return analysis.classify_delay_regime(
            scenario.k, scenario.mu1, scenario.mu2, scenario.xi, scenario.tau
        )
    return analysis.classify_neumann_regime(scenario.k, scenario.a)


def _energy(profile, t, tol):
    if isinstance(profile, DelayProfile):
        return analysis.energy_E2(profile, t, tol=tol)
    return analysis.energy_E1(profile, t, tol=tol)


@command()
def solve(scenario: str, quad_tol: float = None, grid: parse_grid = None):
    """
    Write ``t,x,u,ut,ux`` samples of the solution.

    With ``--grid``, the finite-difference oracle supplies the field at
    the grid's final time instead of the characteristic construction.
    """
    scenario = _load(scenario, quad_tol)
    yield from csv_lines(['t', 'x', 'u', 'ut', 'ux'], _solve_rows(scenario, grid))


def _solve_rows(scenario, grid):
    if grid:
        settings = FdmGrid.build(
            grid.get('ny', scenario.fdm.ny),
            grid.get('tmax', scenario.t_max),
            scenario.k,
            tau=scenario.tau if scenario.is_delay else None,
            cfl=grid.get('cfl', scenario.fdm.cfl),
        )
        result = solve_fdm(scenario, settings)
        for x, u, ut, ux in zip(result.x, result.v, result.ut, result.ux):
            yield result.t, x, u, ut, ux
        return
    profile = scenario.build_profile(**_profile_options())
    count = int(mbwave.config['x count'])
    for t in scenario.times:
        length = scenario.geometry.boundary_position(t)
        for x in np.linspace(0.0, length, count):
            yield (t, x, *profile.state(float(x), float(t)))


@command()
def energy(scenario: str, quad_tol: float = None):
    """
    Write the energy, its exact rate and the boundary velocity at the
    scenario's sample times.
    """
    scenario = _load(scenario, quad_tol)
    profile = scenario.build_profile(**_profile_options())
    regime = _regime(scenario)
    log.info("Regime: %s", regime.kind.value)
    trace = analysis.energy_trace(
        profile, scenario.times, regime=regime, tol=scenario.quad_tol
    )
    return list(csv_lines(trace.columns, trace.rows()))


@command(aliases='regime')
def classify(
    scenario: str = None,
    k: float = None,
    a: float = None,
    mu1: float = None,
    mu2: float = None,
    xi: float = None,
    tau: float = None,
):
    """
    Print the stability regime of a scenario, or of bare parameters
    (``--k --a`` or ``--k --mu1 --mu2 [--xi] [--tau]``), as one JSON
    record.
    """
    if scenario is not None:
        loaded = _load(scenario)
        k, a = loaded.k, loaded.a
        mu1, mu2, xi, tau = loaded.mu1, loaded.mu2, loaded.xi, loaded.tau
    if k is None:
        raise ValidationError("classify needs --k or --scenario")
    if a is not None:
        regime = analysis.classify_neumann_regime(k, a)
        return record_json(regime.to_record())
    if mu1 is None or mu2 is None:
        raise ValidationError("classify needs --a, or --mu1 and --mu2")
    regime = analysis.classify_delay_regime(
        k, mu1, mu2, 1.0 if xi is None else xi, tau
    )
    record = regime.to_record()
    record.update(analysis.thresholds(k)._asdict())
    return record_json(record)


def _grid_points(scenario, ranges):
    grids = dict(scenario.sweep)
    grids.update(ranges)
    if not grids:
        raise ValidationError("nothing to sweep; give --range or a sweep block")
    unknown = set(grids) - SWEEPABLE
    if unknown:
        raise ValidationError(
            f"cannot sweep {', '.join(sorted(unknown))}; "
            f"choose from {', '.join(sorted(SWEEPABLE))}"
        )
    names = list(grids)
    return names, [
        dict(zip(names, values))
        for values in itertools.product(*(grids[name] for name in names))
    ]


def sweep_point(job):
    """
    Regime, initial and final energy and late-time energy slope of one
    grid point. Points the solver rejects are reported as ``Invalid``.
    """
    index, scenario, point, options = job
    try:
        varied = validate(scenario.replace(**point))
        profile = varied.build_profile(**options)
    except ValidationError as exc:
        log.info("Sweep point %d %s: %s", index, point, exc)
        return (index, *point.values(), 'Invalid', math.nan, math.nan, math.nan)
    tol = varied.quad_tol
    kind = _regime(varied).kind.value
    times = np.linspace(varied.t_max / 2, varied.t_max, 11)
    late = [_energy(profile, t, tol) for t in times]
    try:
        slope = analysis.energy_slope(times, late, varied.k)
    except ValidationError:
        slope = math.nan
    return (index, *point.values(), kind, _energy(profile, 0.0, tol), late[-1], slope)


@command(aliases='scan')
def sweep(
    scenario: str,
    range: Repeated(parse_range),  # noqa: A002
    quad_tol: float = None,
    workers: int = None,
):
    """
    Classify and integrate the scenario at every point of a parameter
    grid, one row per point in grid order.
    """
    scenario = _load(scenario, quad_tol)
    names, points = _grid_points(scenario, range)
    workers = workers or int(mbwave.config['workers'])
    options = _profile_options()
    jobs = [(index, scenario, point, options) for index, point in enumerate(points)]
    log.info("Sweeping %d points over %s", len(jobs), ', '.join(names))
    header = ['index', *names, 'kind', 'E0', 'E_end', 'slope']
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_point, jobs))
    else:
        rows = list(map(sweep_point, jobs))
    return list(csv_lines(header, rows))


@command()
def verify(
    scenario: str,
    ny: comma_list(int) = (128, 256, 512),
    time: float = 1.0,
    grid: parse_grid = None,
    quad_tol: float = None,
):
    """
    Compare the characteristic solution with the finite-difference
    oracle under grid refinement and report pass or fail.

    ``--grid ny=N`` replaces the refinement ladder by ``N/4, N/2, N``;
    its ``tmax`` and ``cfl`` override ``--time`` and the scenario's
    Courant ratio.
    """
    watch = tempora.timing.Stopwatch()
    scenario = _load(scenario, quad_tol)
    grid = grid or {}
    if 'ny' in grid:
        ny = [grid['ny'] // 4, grid['ny'] // 2, grid['ny']]
    time = grid.get('tmax', time)
    cfl = grid.get('cfl', scenario.fdm.cfl)
    profile = scenario.build_profile(**_profile_options())

    results = []
    for nodes in sorted(ny):
        settings = FdmGrid.build(
            nodes,
            time,
            scenario.k,
            tau=scenario.tau if scenario.is_delay else None,
            cfl=cfl,
        )
        result = solve_fdm(scenario, settings)
        results.append((settings, result, l2_error(result, profile)))
        log.info("ny=%d: relative error %.3g", nodes, results[-1][2])
    spacings = [settings.spacing for settings, _, _ in results]
    errors = [error for _, _, error in results]
    orders = observed_order(errors, spacings)

    finest = results[-1][1]
    check = np.linspace(0.0, finest.t, 11)
    exact = np.array([_energy(profile, t, scenario.quad_tol) for t in check])
    discrete = np.interp(check, finest.times, finest.energy)
    scale = max(float(np.max(np.abs(exact))), np.finfo(float).tiny)
    deviation = float(np.max(np.abs(discrete - exact))) / scale

    rows = [
        (settings.ny, settings.spacing, error, '' if not i else orders[i - 1])
        for i, (settings, _, error) in enumerate(results)
    ]
    yield from csv_lines(['ny', 'h', 'l2_error', 'order'], rows)

    failures = []
    if errors[-1] > MAX_ERROR:
        failures.append(f"error {errors[-1]:.3g} exceeds {MAX_ERROR:g}")
    if orders and min(orders) < MIN_ORDER:
        failures.append(f"order {min(orders):.3g} below {MIN_ORDER:g}")
    if deviation > MAX_ENERGY_DEVIATION:
        failures.append(
            f"energy deviates by {deviation:.3g}, above {MAX_ENERGY_DEVIATION:g}"
        )
    elapsed = watch.split().total_seconds()
    summary = (
        f"error {number(errors[-1])} at ny={results[-1][0].ny}, "
        f"energy deviation {number(deviation)}, {elapsed:.1f} s"
    )
    log.info("Verification of %s took %.1f s", scenario.path, elapsed)
    if failures:
        yield 'FAIL: ' + summary
        raise VerificationFailure('; '.join(failures))
    yield 'PASS: ' + summary
