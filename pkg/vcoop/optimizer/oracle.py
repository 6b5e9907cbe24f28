"""
Randomized equivalence suites between the closed-form schedules, the dense simplex and the exact cut solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from ..constants import LP_REL_TOL, TQDM_BAR_FORMAT, OracleSuite, StreamComponent
from ..scenario import REFERENCE_SCENARIO, HelperConfig, Scenario, classify_regime, validate_scenario
from ..utils import Logger, make_stream
from .cycle_lp import build_cycle_lp, check_schedule, solve_cycle_lp
from .schedules import max_cycle_delivery, schedule_theorem1, schedule_theorem2, transitional_cycle_bounds


__all__ = ["OracleReport", "run_oracle_suite"]

logger = Logger(__name__)


@dataclass
class OracleReport:
    """
    Outcome of one suite. `max_rel_deviation` compares a theorem total with the LP optimum and is None for the
    transitional suite, where `max_sandwich_violation` (relative distance outside [lower, upper]) applies instead.
    """

    suite: OracleSuite
    trials: int
    max_rel_deviation: Optional[float] = None
    max_sandwich_violation: Optional[float] = None
    max_cut_deviation: float = 0.0
    infeasible_schedules: int = 0
    failures: List[str] = field(default_factory=list)
    tolerance: float = LP_REL_TOL

    @property
    def passed(self) -> bool:
        return not self.failures

    def row(self) -> dict:
        return {
            "suite": str(self.suite),
            "trials": self.trials,
            "max_rel_deviation": self.max_rel_deviation,
            "max_sandwich_violation": self.max_sandwich_violation,
            "max_cut_deviation": self.max_cut_deviation,
            "infeasible_schedules": self.infeasible_schedules,
            "status": "pass" if self.passed else "FAIL",
        }


def _rel(x: float, reference: float) -> float:
    return abs(x - reference) / max(abs(reference), 1.0)


def _draw_rate(suite: OracleSuite, base: Scenario, stream: np.random.Generator) -> float:
    regime = classify_regime(base)
    if suite == OracleSuite.INFRA:
        # (0, w_lo]
        return regime.w_lo * (1.0 - stream.random())
    if suite == OracleSuite.V2V:
        return regime.w_hi * (1.0 + stream.random())
    while True:
        w = stream.uniform(regime.w_lo, regime.w_hi)
        if regime.w_lo < w < regime.w_hi:
            return w


def _draw_instance(suite: OracleSuite, base: Scenario, n_max: int, stream: np.random.Generator):
    s = base.replace(w_I=_draw_rate(suite, base, stream))
    n = int(stream.integers(1, n_max + 1))
    gaps = stream.exponential(1.0 / base.rho2, size=n - 1)
    return s, HelperConfig.from_gaps(gaps)


def _run_single_suite(
    suite: OracleSuite,
    trials: int,
    n_max: int,
    seed: int,
    base: Scenario,
    progress: bool,
) -> OracleReport:
    report = OracleReport(suite=suite, trials=trials)
    deviations, sandwich, cut = [0.0], [0.0], [0.0]
    suite_id = OracleSuite.list().index(str(suite))

    for trial in tqdm(range(trials), desc=f"lp-check {suite}", bar_format=TQDM_BAR_FORMAT, disable=not progress):
        stream = make_stream(seed, StreamComponent.ORACLE, suite_id, trial)
        s, cfg = _draw_instance(suite, base, n_max, stream)
        optimum = solve_cycle_lp(build_cycle_lp(cfg, s))
        opt_total = optimum.total_delivered
        schedules = [optimum]

        if suite == OracleSuite.TRANSITIONAL:
            bounds = transitional_cycle_bounds(cfg, s)
            schedules.append(bounds.schedule_for_lower)
            gap = max(bounds.lower - opt_total, opt_total - bounds.upper, 0.0)
            sandwich.append(gap / max(bounds.upper, 1.0))
        else:
            closed_form = schedule_theorem1(cfg, s) if suite == OracleSuite.INFRA else schedule_theorem2(cfg, s)
            schedules.append(closed_form)
            deviations.append(_rel(closed_form.total_delivered, opt_total))

        cut.append(_rel(max_cycle_delivery(cfg, s), opt_total))
        for schedule in schedules:
            if check_schedule(schedule, cfg, s):
                report.infeasible_schedules += 1

    report.max_cut_deviation = max(cut)
    if suite == OracleSuite.TRANSITIONAL:
        report.max_sandwich_violation = max(sandwich)
        if report.max_sandwich_violation > report.tolerance:
            report.failures.append(f"sandwich violated by {report.max_sandwich_violation:.3e} (relative)")
    else:
        report.max_rel_deviation = max(deviations)
        if report.max_rel_deviation > report.tolerance:
            report.failures.append(f"closed form deviates from the LP by {report.max_rel_deviation:.3e}")
    if report.max_cut_deviation > report.tolerance:
        report.failures.append(f"cut solver deviates from the LP by {report.max_cut_deviation:.3e}")
    if report.infeasible_schedules:
        report.failures.append(f"{report.infeasible_schedules} schedules failed the constraint check")
    return report


def run_oracle_suite(
    suite: OracleSuite | str = OracleSuite.ALL,
    trials: int = 500,
    n_max: int = 8,
    seed: int = 0,
    base: Scenario = None,
    progress: bool = False,
) -> List[OracleReport]:
    """
    Draw random cycles (n uniform in 1..n_max, Exp(rho2) gaps, w_I uniform inside the suite's regime) and check the
    closed forms against the LP optimum.

    Args:
        suite: One of `OracleSuite`; `all` runs the three regime suites
        trials: Instances per suite
        n_max: Largest helper count drawn
        seed: Master seed, instances are keyed on (seed, suite, trial)
        base: Scenario providing everything but w_I, defaults to the reference scenario
        progress: Show a tqdm bar on stderr

    Returns:
        One report per suite run
    """
    suite = OracleSuite(suite)
    if trials < 1 or n_max < 1:
        raise ValueError(f"trials and n_max must be positive, got trials={trials}, n_max={n_max}")
    base = base or validate_scenario(REFERENCE_SCENARIO)
    if base.rho2 <= 0:
        raise ValueError("Oracle suites need a positive helper density to draw gaps from")

    if suite == OracleSuite.ALL:
        suites = [OracleSuite.INFRA, OracleSuite.V2V, OracleSuite.TRANSITIONAL]
    else:
        suites = [suite]
    reports = [_run_single_suite(x, trials, n_max, seed, base, progress) for x in suites]
    for report in reports:
        logger.debug(f"Oracle suite `{report.suite}`: {report.row()}")
    return reports
