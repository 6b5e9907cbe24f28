"""
Throughput estimation from many simulated cycles. Work is split into units that each own their random streams
(sampled mode: blocks of cycles, event mode: replications), so the result is the same for any number of workers.
"""
from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from ..analytic import non_cooperative_throughput
from ..configs import ModelConfig
from ..constants import (
    DEFAULT_LP_CAP,
    DEFAULT_N_CYCLES,
    TQDM_BAR_FORMAT,
    OptimumSolver,
    SimulationMode,
    StreamComponent,
)
from ..scenario import Scenario
from ..utils import Logger, make_stream, ratio_confidence_interval
from .event_driven import EventStreams, run_event_driven
from .sampled import run_cycle_sampled
from .traces import CycleTrace


__all__ = ["ThroughputEstimate", "simulate_cycles", "estimate_from_traces", "estimate_throughput"]

logger = Logger(__name__)

SAMPLED_BLOCK_SIZE = 250


@dataclass(frozen=True)
class ThroughputEstimate:
    """
    Renewal-reward throughput estimate Σ bits / Σ duration over the retained cycles.

    `eta_lower` / `eta_upper` are set for transitional sampled runs, computed with the per-cycle lower-bound and
    upper-bound totals in place of the delivered bits.
    """

    mean: float
    std_err: float
    ci95_lo: float
    ci95_hi: float
    n_cycles: int
    mode: SimulationMode
    master_seed: int
    eta_lower: Optional[float] = None
    eta_upper: Optional[float] = None
    flagged_cycles: int = 0

    @property
    def ci95(self):
        return self.ci95_lo, self.ci95_hi

    def dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_err": self.std_err,
            "ci95": [self.ci95_lo, self.ci95_hi],
            "n_cycles": self.n_cycles,
            "mode": str(self.mode),
            "master_seed": self.master_seed,
            "eta_lower": self.eta_lower,
            "eta_upper": self.eta_upper,
            "flagged_cycles": self.flagged_cycles,
        }


def _sampled_block(args) -> List[CycleTrace]:
    s, start, stop, master_seed, lp_cap, optimum_solver = args
    return [
        run_cycle_sampled(s, make_stream(master_seed, StreamComponent.SAMPLED_CYCLE, i), i, lp_cap, optimum_solver)
        for i in range(start, stop)
    ]


def _event_replication(args) -> List[CycleTrace]:
    s, models, horizon, master_seed, replication = args
    return run_event_driven(s, models, horizon, EventStreams.from_seed(master_seed, replication))


def _ordered_map(func: Callable, tasks: Sequence, workers: int, progress: bool, desc: str) -> list:
    bar = dict(total=len(tasks), desc=desc, bar_format=TQDM_BAR_FORMAT, disable=not progress)
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tqdm(tasks, **bar)]
    with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
        return list(tqdm(pool.imap(func, tasks), **bar))


def simulate_cycles(
    s: Scenario,
    models: Optional[ModelConfig] = None,
    mode: SimulationMode | str = SimulationMode.SAMPLED,
    n_cycles: int = DEFAULT_N_CYCLES,
    master_seed: int = 0,
    workers: int = 1,
    lp_cap: int = DEFAULT_LP_CAP,
    optimum_solver: OptimumSolver | str = OptimumSolver.CUT,
    progress: bool = False,
) -> List[CycleTrace]:
    """
    Simulate exactly `n_cycles` retained cycles.

    In event mode every replication simulates `num_infra - 1` cycles and keeps all but the first and the last, and
    replications are added until enough cycles are collected; surplus cycles of the last replication are dropped.

    Args:
        s: The scenario
        models: Simulation models, event mode only (sampled mode is defined by the closed-form schedules)
        mode: `sampled` or `event`
        n_cycles: Number of cycles returned
        master_seed: Seed of all random streams
        workers: Worker processes, 1 runs inline
        lp_cap: See `run_cycle_sampled`
        optimum_solver: See `run_cycle_sampled`
        progress: Show a tqdm bar on stderr

    Returns:
        The cycle traces, renumbered 0..n_cycles-1
    """
    mode = SimulationMode(mode)
    if n_cycles < 1:
        raise ValueError(f"n_cycles must be positive, got {n_cycles}")

    if mode == SimulationMode.SAMPLED:
        tasks = [
            (s, start, min(start + SAMPLED_BLOCK_SIZE, n_cycles), master_seed, lp_cap, str(optimum_solver))
            for start in range(0, n_cycles, SAMPLED_BLOCK_SIZE)
        ]
        blocks = _ordered_map(_sampled_block, tasks, workers, progress, "sampled cycles")
    else:
        horizon = s.num_infra - 1
        retained = horizon - 2
        if retained < 1:
            raise ValueError(
                f"num_infra={s.num_infra} leaves no cycle after discarding the first and the last, need at least 4"
            )
        replications = math.ceil(n_cycles / retained)
        models = models or ModelConfig()
        tasks = [(s, models, horizon, master_seed, r) for r in range(replications)]
        blocks = _ordered_map(_event_replication, tasks, workers, progress, "replications")

    traces = [trace for block in blocks for trace in block][:n_cycles]
    for i, trace in enumerate(traces):
        trace.cycle_index = i
    return traces


def estimate_from_traces(
    traces: Sequence[CycleTrace],
    mode: SimulationMode | str,
    master_seed: int,
    s: Optional[Scenario] = None,
) -> ThroughputEstimate:
    """
    Renewal-reward estimate of `traces`. Pass the scenario `s` of sampled traces so that a run without helpers
    returns the non-cooperative throughput 2r_I·w_I/d exactly rather than its floating-point ratio.
    """
    durations = np.array([t.duration for t in traces])
    bits = np.array([t.total_bits for t in traces])
    mean, std_err, lo, hi = ratio_confidence_interval(bits, durations)

    eta_lower = eta_upper = None
    if traces and all(t.v2v_lower is not None for t in traces):
        v2i = np.array([t.v2i_bits for t in traces])
        eta_lower = float((v2i.sum() + sum(t.v2v_lower for t in traces)) / durations.sum())
        eta_upper = float((v2i.sum() + sum(t.v2v_upper for t in traces)) / durations.sum())

    flagged = sum(t.flagged for t in traces)
    if flagged:
        logger.warning(f"{flagged} of {len(traces)} transitional cycles exceeded lp_cap and used the lower bound")

    if s is not None and s.rho2 == 0 and SimulationMode(mode) == SimulationMode.SAMPLED:
        # every cycle is the non-cooperative one
        mean = lo = hi = non_cooperative_throughput(s)
        std_err = 0.0
        if eta_lower is not None:
            eta_lower = eta_upper = mean

    return ThroughputEstimate(
        mean=mean,
        std_err=std_err,
        ci95_lo=lo,
        ci95_hi=hi,
        n_cycles=len(traces),
        mode=SimulationMode(mode),
        master_seed=master_seed,
        eta_lower=eta_lower,
        eta_upper=eta_upper,
        flagged_cycles=flagged,
    )


def estimate_throughput(
    s: Scenario,
    models: Optional[ModelConfig] = None,
    mode: SimulationMode | str = SimulationMode.SAMPLED,
    n_cycles: int = DEFAULT_N_CYCLES,
    master_seed: int = 0,
    workers: int = 1,
    lp_cap: int = DEFAULT_LP_CAP,
    optimum_solver: OptimumSolver | str = OptimumSolver.CUT,
    progress: bool = False,
) -> ThroughputEstimate:
    """
    Estimate the long-run throughput of `s` in bit/s, see `simulate_cycles` for the arguments
    """
    traces = simulate_cycles(s, models, mode, n_cycles, master_seed, workers, lp_cap, optimum_solver, progress)
    return estimate_from_traces(traces, mode, master_seed, s)
