"""
Sampled-schedule mode: one cycle is one Poisson draw of the helpers over the relative span, evaluated with the
closed-form schedule of its regime (or the exact optimum in the transitional regime).
"""
from __future__ import annotations

import numpy as np

from ..analytic import effective_radius
from ..constants import DEFAULT_LP_CAP, OptimumSolver, RegimeType
from ..optimizer import (
    build_cycle_lp,
    max_cycle_delivery,
    schedule_theorem1,
    schedule_theorem2,
    solve_cycle_lp,
    transitional_cycle_bounds,
)
from ..scenario import HelperConfig, Scenario, classify_regime, relative_span
from .traces import CycleTrace
from .traffic import count_clusters, generate_helpers


__all__ = ["run_cycle_sampled", "cycle_v2v_bits"]


def cycle_v2v_bits(
    cfg: HelperConfig,
    s: Scenario,
    regime: RegimeType,
    lp_cap: int = DEFAULT_LP_CAP,
    optimum_solver: OptimumSolver | str = OptimumSolver.CUT,
):
    """
    V2V bits of one helper configuration in its regime.

    Returns:
        A tuple of (delivered bits, lower, upper, flagged). Lower and upper are None outside the transitional regime.
    """
    if regime == RegimeType.INFRASTRUCTURE_LIMITED:
        return schedule_theorem1(cfg, s).total_delivered, None, None, False
    if regime == RegimeType.V2V_LIMITED:
        return schedule_theorem2(cfg, s).total_delivered, None, None, False

    bounds = transitional_cycle_bounds(cfg, s)
    if OptimumSolver(optimum_solver) == OptimumSolver.CUT:
        return max_cycle_delivery(cfg, s), bounds.lower, bounds.upper, False
    if cfg.n <= lp_cap:
        return solve_cycle_lp(build_cycle_lp(cfg, s)).total_delivered, bounds.lower, bounds.upper, False
    return bounds.lower, bounds.lower, bounds.upper, True


def run_cycle_sampled(
    s: Scenario,
    stream: np.random.Generator,
    cycle_index: int = 0,
    lp_cap: int = DEFAULT_LP_CAP,
    optimum_solver: OptimumSolver | str = OptimumSolver.CUT,
) -> CycleTrace:
    """
    Simulate one cycle in sampled-schedule mode.

    Args:
        s: The scenario
        stream: Random stream of this cycle
        cycle_index: Recorded in the trace
        lp_cap: Largest transitional cycle the dense simplex solves when `optimum_solver` is `simplex`
        optimum_solver: `cut` (exact for any size) or `simplex`

    Returns:
        The cycle trace; v2i_bits = 2r_I·w_I/v1 and duration = d/v1 are deterministic
    """
    regime = classify_regime(s).kind
    cfg = generate_helpers(s.rho2, relative_span(s), stream)
    v2v, lower, upper, flagged = cycle_v2v_bits(cfg, s, regime, lp_cap, optimum_solver)

    if regime == RegimeType.INFRASTRUCTURE_LIMITED:
        radius = s.r_I
    elif regime == RegimeType.V2V_LIMITED:
        radius = s.r0
    else:
        radius = effective_radius(s)

    return CycleTrace(
        cycle_index=cycle_index,
        duration=s.d / s.v1,
        v2i_bits=2 * s.r_I * s.w_I / s.v1,
        v2v_bits=v2v,
        helper_count=cfg.n,
        cluster_count=count_clusters(cfg, radius),
        v2v_lower=lower,
        v2v_upper=upper,
        flagged=flagged,
    )
