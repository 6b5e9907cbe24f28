"""
Closed-form per-cycle schedules for the three regimes, and the exact optimum for any regime.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import RegimeType
from ..scenario import HelperConfig, RegimeError, Scenario, classify_regime
from .cycle_lp import Schedule


__all__ = [
    "TransitionalBounds",
    "schedule_theorem1",
    "schedule_theorem2",
    "transitional_cycle_bounds",
    "max_cycle_delivery",
]


@dataclass
class TransitionalBounds:
    lower: float
    upper: float
    schedule_for_lower: Schedule


def _require_regime(s: Scenario, expected: RegimeType, operation: str):
    regime = classify_regime(s)
    if regime.kind != expected:
        raise RegimeError(
            f"`{operation}` needs a {expected} scenario, got {regime.kind} "
            f"(w_I={s.w_I:g}, w_lo={regime.w_lo:g}, w_hi={regime.w_hi:g})"
        )


def _windowed(cfg: HelperConfig, window: float, rate: float) -> np.ndarray:
    """
    min(l_i, window)·rate for the first n - 1 helpers and the full window for the last one.
    """
    if cfg.n == 0:
        return np.zeros(0)
    gaps = np.asarray(cfg.gaps, dtype=np.float64)
    return np.append(np.minimum(gaps, window), window) * rate


def schedule_theorem1(cfg: HelperConfig, s: Scenario) -> Schedule:
    """
    Infrastructure-limited optimum: every helper forwards all it received, Y_i = D_i.
    """
    _require_regime(s, RegimeType.INFRASTRUCTURE_LIMITED, "schedule_theorem1")
    d = _windowed(cfg, 2 * s.r_I, s.w_I / s.v2)
    return Schedule(d_alloc=d, y_alloc=d.copy())


def schedule_theorem2(cfg: HelperConfig, s: Scenario) -> Schedule:
    """
    V2V-limited optimum: helpers are filled as in the infrastructure-limited case and drained at the V2V window limit.
    """
    _require_regime(s, RegimeType.V2V_LIMITED, "schedule_theorem2")
    d = _windowed(cfg, 2 * s.r_I, s.w_I / s.v2)
    y = _windowed(cfg, 2 * s.r0, s.w_V / (s.v1 + s.v2))
    return Schedule(d_alloc=d, y_alloc=y)


def transitional_cycle_bounds(cfg: HelperConfig, s: Scenario) -> TransitionalBounds:
    _require_regime(s, RegimeType.TRANSITIONAL, "transitional_cycle_bounds")
    a_rate, b_rate = s.w_I / s.v2, s.w_V / (s.v1 + s.v2)
    if cfg.n == 0:
        return TransitionalBounds(lower=0.0, upper=0.0, schedule_for_lower=Schedule())

    cap = 2 * s.r0 * b_rate
    gaps = np.asarray(cfg.gaps, dtype=np.float64)
    d = _windowed(cfg, 2 * s.r_I, a_rate)
    y = np.append(np.minimum(gaps * a_rate, cap), cap)

    upper_v2i = float(_windowed(cfg, 2 * s.r_I, a_rate).sum())
    upper_v2v = float(_windowed(cfg, 2 * s.r0, b_rate).sum())
    schedule = Schedule(d_alloc=d, y_alloc=y)
    return TransitionalBounds(
        lower=schedule.total_delivered,
        upper=min(upper_v2i, upper_v2v),
        schedule_for_lower=schedule,
    )


def max_cycle_delivery(cfg: HelperConfig, s: Scenario) -> float:
    """
    Exact LP optimum of one cycle, for any regime and any n.

    Both constraint families are coverage capacities: a set S of helpers can receive at most `a` times the length of
    the union of their V2I windows [p_i, p_i + 2r_I], and can hand over at most `b` times the union of their V2V
    windows [p_i, p_i + 2r0]. The maximum flow through the two stages equals the minimum over all splits of the
    helpers into S (cut on the V2I side) and the rest (cut on the V2V side) of a·|∪ V2I windows of S| +
    b·|∪ V2V windows of the rest|. Because the windows are intervals anchored at sorted positions, the union length
    only depends on the previous member of the same side, so the minimum is a dynamic program over helpers in order.

    State after helper i: which side helper i is on, and the index of the last helper on the other side (or none).
    """
    n = cfg.n
    if n == 0:
        return 0.0
    a_rate, b_rate = s.w_I / s.v2, s.w_V / (s.v1 + s.v2)
    w1, w2 = 2 * s.r_I, 2 * s.r0
    p = cfg.positions - cfg.l0
    # index n encodes "no helper on the other side yet"; its position at -inf makes the union term a full window
    p_ext = np.append(p, -np.inf)

    # on_v2i[j]: helper i is in S and the last helper outside S is j; on_v2v[j]: the mirror case
    on_v2i = np.full(n + 1, np.inf)
    on_v2v = np.full(n + 1, np.inf)
    on_v2i[n] = a_rate * w1
    on_v2v[n] = b_rate * w2

    for i in range(n - 1):
        gap = p[i + 1] - p[i]
        reach = p[i + 1] - p_ext
        switch_to_v2i = np.min(on_v2v + a_rate * np.minimum(reach, w1))
        switch_to_v2v = np.min(on_v2i + b_rate * np.minimum(reach, w2))
        on_v2i = on_v2i + a_rate * min(gap, w1)
        on_v2v = on_v2v + b_rate * min(gap, w2)
        on_v2i[i] = switch_to_v2i
        on_v2v[i] = switch_to_v2v

    return float(min(on_v2i.min(), on_v2v.min()))
