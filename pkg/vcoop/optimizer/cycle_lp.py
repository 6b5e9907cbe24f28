"""
The per-cycle scheduling problem as a linear program.

Variables are D_1..D_n (bits helper i receives from the source infrastructure) followed by Y_1..Y_n (bits helper i
hands to the VoI). The objective is Σ Y_i. Rows come in a fixed order:

    n   box rows        D_i <= 2·r_I·a
    n   box rows        Y_i <= 2·r0·b
    n   coupling rows   Y_i - D_i <= 0
    n(n+1)/2 rows       Σ_{k1..k2} D_i <= (Σ_{k1..k2-1} min(l_i, 2r_I) + 2r_I)·a
    n(n+1)/2 rows       Σ_{k1..k2} Y_i <= (Σ_{k1..k2-1} min(l_i, 2r0) + 2r0)·b

with a = w_I/v2 and b = w_V/(v1 + v2) the bits per metre of relative displacement on the two links.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..constants import LP_REL_TOL
from ..scenario import HelperConfig, Scenario
from ..utils import Logger
from .simplex import DenseSimplex, SimplexStatus, SolverError


__all__ = ["LpInstance", "Schedule", "build_cycle_lp", "solve_cycle_lp", "check_schedule"]

logger = Logger(__name__)


@dataclass
class LpInstance:
    n: int
    objective: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray

    @property
    def num_vars(self) -> int:
        return 2 * self.n

    @property
    def num_constraints(self) -> int:
        return int(self.A_ub.shape[0])


@dataclass
class Schedule:
    d_alloc: np.ndarray = field(default_factory=lambda: np.zeros(0))
    y_alloc: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.d_alloc = np.asarray(self.d_alloc, dtype=np.float64)
        self.y_alloc = np.asarray(self.y_alloc, dtype=np.float64)
        if self.d_alloc.shape != self.y_alloc.shape:
            raise ValueError(f"Allocation shapes differ: {self.d_alloc.shape} vs {self.y_alloc.shape}")

    @property
    def n(self) -> int:
        return int(self.d_alloc.size)

    @property
    def total_delivered(self) -> float:
        return float(self.y_alloc.sum())


def _link_factors(s: Scenario):
    return s.w_I / s.v2, s.w_V / (s.v1 + s.v2)


def _interval_capacity(gaps: np.ndarray, window: float, k1: int, k2: int) -> float:
    return float(np.minimum(gaps[k1:k2], window).sum()) + window


def build_cycle_lp(cfg: HelperConfig, s: Scenario) -> LpInstance:
    n = cfg.n
    num_intervals = n * (n + 1) // 2
    rows = 3 * n + 2 * num_intervals
    A = np.zeros((rows, 2 * n))
    b = np.zeros(rows)
    if n == 0:
        return LpInstance(n=0, objective=np.zeros(0), A_ub=A, b_ub=b)

    a_rate, b_rate = _link_factors(s)
    gaps = np.asarray(cfg.gaps, dtype=np.float64)
    idx = np.arange(n)

    A[idx, idx] = 1.0
    b[:n] = 2 * s.r_I * a_rate
    A[n + idx, n + idx] = 1.0
    b[n:2 * n] = 2 * s.r0 * b_rate
    A[2 * n + idx, n + idx] = 1.0
    A[2 * n + idx, idx] = -1.0

    row = 3 * n
    for k1 in range(n):
        for k2 in range(k1, n):
            A[row, k1:k2 + 1] = 1.0
            b[row] = _interval_capacity(gaps, 2 * s.r_I, k1, k2) * a_rate
            A[row + num_intervals, n + k1:n + k2 + 1] = 1.0
            b[row + num_intervals] = _interval_capacity(gaps, 2 * s.r0, k1, k2) * b_rate
            row += 1

    objective = np.concatenate((np.zeros(n), np.ones(n)))
    return LpInstance(n=n, objective=objective, A_ub=A, b_ub=b)


def solve_cycle_lp(lp: LpInstance) -> Schedule:
    """
    Solve the instance with the dense simplex. The right-hand sides are scaled to O(1) first and the solution is
    scaled back, so the tolerance is effectively relative.
    """
    if lp.n == 0:
        return Schedule()
    scale = float(lp.b_ub.max())
    if scale <= 0:
        return Schedule(np.zeros(lp.n), np.zeros(lp.n))

    result = DenseSimplex(lp.objective, lp.A_ub, lp.b_ub / scale, tol=LP_REL_TOL).solve()
    if result.status != SimplexStatus.OPTIMAL:
        raise SolverError(
            f"Cycle LP with n={lp.n} ended as `{result.status}` after {result.iterations} pivots; "
            f"the instance is feasible and bounded by construction"
        )
    x = result.x * scale
    return Schedule(d_alloc=x[:lp.n], y_alloc=x[lp.n:])


def check_schedule(schedule: Schedule, cfg: HelperConfig, s: Scenario, rtol: float = LP_REL_TOL) -> List[str]:
    """
    Re-evaluate every constraint family against a schedule without going through `LpInstance`.

    Returns:
        Descriptions of the violated rows, empty when the schedule is feasible
    """
    if schedule.n != cfg.n:
        return [f"schedule has {schedule.n} helpers but the configuration has {cfg.n}"]
    a_rate, b_rate = _link_factors(s)
    gaps = np.asarray(cfg.gaps, dtype=np.float64)
    d, y = schedule.d_alloc, schedule.y_alloc
    violations = []

    def _exceeds(lhs, rhs):
        return lhs - rhs > rtol * max(abs(rhs), 1.0)

    for i in range(cfg.n):
        if d[i] < -rtol or y[i] < -rtol:
            violations.append(f"negative allocation at helper {i}")
        if _exceeds(d[i], 2 * s.r_I * a_rate):
            violations.append(f"D[{i}] above the V2I window cap")
        if _exceeds(y[i], 2 * s.r0 * b_rate):
            violations.append(f"Y[{i}] above the V2V window cap")
        if _exceeds(y[i], d[i]):
            violations.append(f"Y[{i}] exceeds D[{i}]")

    d_cum = np.concatenate(([0.0], np.cumsum(d)))
    y_cum = np.concatenate(([0.0], np.cumsum(y)))
    for k1 in range(cfg.n):
        for k2 in range(k1, cfg.n):
            if _exceeds(d_cum[k2 + 1] - d_cum[k1], _interval_capacity(gaps, 2 * s.r_I, k1, k2) * a_rate):
                violations.append(f"D interval [{k1}, {k2}] over capacity")
            if _exceeds(y_cum[k2 + 1] - y_cum[k1], _interval_capacity(gaps, 2 * s.r0, k1, k2) * b_rate):
                violations.append(f"Y interval [{k1}, {k2}] over capacity")
    return violations
