"""
Parameter sweeps: one scenario per axis value (and per series), evaluated with every selected estimator.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
from tqdm import tqdm

from ..analytic import non_cooperative_throughput, throughput, throughput_eta1
from ..builders import build_channel
from ..configs import ModelConfig, SweepConfig, _resolve_model_slot
from ..constants import (
    MBPS,
    RESULT_CSV_COLUMNS,
    TQDM_BAR_FORMAT,
    SimulationMode,
    StreamComponent,
    SweepAxis,
    SweepMode,
)
from ..scenario import Scenario, ScenarioValidationError, classify_regime, relative_span, validate_scenario
from ..sim import estimate_throughput, generate_helpers, measure_average_rates
from .. import __version__
from ..utils import Logger, derive_seed, make_stream, write_csv
from .statistics import mean_confidence_interval


__all__ = ["ResultRow", "run_sweep", "approx_v2v_summary", "write_results_csv", "spec_hash"]

logger = Logger(__name__)

# sweep axis -> scenario file key it overrides
AXIS_FILE_KEYS = {
    SweepAxis.D: "d_km",
    SweepAxis.W_I: "wI_mbps",
    SweepAxis.RHO2: "rho2_veh_per_m",
}

DEFAULT_RATE_TRAVERSES = 10_000


@dataclass
class ResultRow:
    """
    One CSV row. Columns that do not apply to the selected modes stay None (empty cells).
    """

    axis: str
    value: float
    regime: str
    eta_analytic: Optional[float] = None
    eta_lower: Optional[float] = None
    eta_upper: Optional[float] = None
    eta_sampled: Optional[float] = None
    eta_sampled_ci_lo: Optional[float] = None
    eta_sampled_ci_hi: Optional[float] = None
    eta_event: Optional[float] = None
    eta_event_ci_lo: Optional[float] = None
    eta_event_ci_hi: Optional[float] = None
    ratio_noncoop: Optional[float] = None
    series: Optional[str] = None

    def dict(self) -> Dict[str, Any]:
        return asdict(self)


def spec_hash(spec: SweepConfig) -> str:
    payload = json.dumps(spec.dict(), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _mode_seed(master_seed: int, value_index: int, mode: SweepMode) -> int:
    # identical across series, so series at the same axis value share random numbers
    return derive_seed(master_seed, value_index, SweepMode.list().index(str(mode)))


def approx_v2v_summary(s: Scenario, n_cycles: int, master_seed: int):
    """
    Per-cycle V2V data D_V1 = Σ_j (L_j + 2r_I)·w_I/v2 over the clusters of sampled cycles, the data the
    infrastructure-limited schedule forwards. Cycles are drawn from the same streams as sampled mode.

    Returns:
        A `Summary` of the per-cycle bits
    """
    span = relative_span(s)
    values = []
    for i in range(n_cycles):
        cfg = generate_helpers(s.rho2, span, make_stream(master_seed, StreamComponent.SAMPLED_CYCLE, i))
        if cfg.n == 0:
            values.append(0.0)
            continue
        # within-cluster gaps sum to Σ L_j, every wider gap closes a cluster and adds one full window
        windows = np.minimum(np.asarray(cfg.gaps), 2 * s.r_I).sum() + 2 * s.r_I
        values.append(float(windows) * s.w_I / s.v2)
    return mean_confidence_interval(values)


class _Series:
    def __init__(self, spec: SweepConfig, entry: Dict[str, Any]):
        self.label = entry.get("label")
        self.overrides = dict(entry.get("scenario") or {})
        models = entry.get("models")
        self.models = spec.models if models is None else ModelConfig.from_dict(models)
        self.rates = None
        if entry.get("average_rates_of"):
            self.rates = self._measure_rates(spec, entry["average_rates_of"])

    def _measure_rates(self, spec: SweepConfig, channel_entry):
        channel_entry = dict(channel_entry) if isinstance(channel_entry, dict) else {"name": channel_entry}
        traverses = int(channel_entry.pop("traverses", DEFAULT_RATE_TRAVERSES))
        config = _resolve_model_slot("channel", channel_entry)
        channel = build_channel(config.name, config)
        s = validate_scenario({**spec.base, **self.overrides})
        stream = make_stream(spec.master_seed, StreamComponent.RATE_MEASUREMENT)
        w_i, w_v = measure_average_rates(channel, s, traverses, stream)
        logger.info(f"Series `{self.label}`: measured mean rates w_I={w_i:.6g} bit/s, w_V={w_v:.6g} bit/s")
        return w_i, w_v

    def scenario(self, spec: SweepConfig, value: float) -> Scenario:
        raw = {**spec.base, **self.overrides, AXIS_FILE_KEYS[SweepAxis(spec.axis)]: value}
        if self.rates is not None:
            raw["wI_mbps"], raw["wV_mbps"] = self.rates[0] / MBPS, self.rates[1] / MBPS
        try:
            return validate_scenario(raw)
        except ScenarioValidationError as e:
            raise ScenarioValidationError(
                [f"sweep value {spec.axis}={value} (series {self.label}): {v}" for v in e.violations]
            ) from e


def _evaluate(spec: SweepConfig, series: _Series, s: Scenario, value: float, index: int, workers: int) -> ResultRow:
    modes = [SweepMode(m) for m in spec.modes]
    row = ResultRow(axis=spec.axis, value=value, regime=str(classify_regime(s).kind), series=series.label)

    if SweepMode.APPROX in modes:
        analytic = throughput_eta1(s, allow_any_regime=True)
        summary = approx_v2v_summary(s, spec.n_cycles, _mode_seed(spec.master_seed, index, SweepMode.APPROX))
        row.eta_analytic = analytic.e_v2v_data
        row.eta_sampled, row.eta_sampled_ci_lo, row.eta_sampled_ci_hi = summary.mean, *summary.ci95
        return row

    analytic_eta = None
    if SweepMode.ANALYTIC in modes:
        breakdown = throughput(s)
        if breakdown.is_interval:
            row.eta_lower, row.eta_upper = breakdown.eta_lower, breakdown.eta_upper
        else:
            row.eta_analytic = breakdown.eta
        analytic_eta = breakdown.eta

    for mode, prefix in ((SweepMode.SAMPLED, "eta_sampled"), (SweepMode.EVENT, "eta_event")):
        if mode not in modes:
            continue
        estimate = estimate_throughput(
            s,
            models=series.models,
            mode=SimulationMode(str(mode)),
            n_cycles=spec.n_cycles,
            master_seed=_mode_seed(spec.master_seed, index, mode),
            workers=workers,
            lp_cap=spec.lp_cap,
            optimum_solver=spec.optimum_solver,
        )
        setattr(row, prefix, estimate.mean)
        setattr(row, f"{prefix}_ci_lo", estimate.ci95_lo)
        setattr(row, f"{prefix}_ci_hi", estimate.ci95_hi)

    reference = next((x for x in (row.eta_sampled, row.eta_event, analytic_eta) if x is not None), None)
    baseline = non_cooperative_throughput(s)
    if reference is not None and baseline > 0:
        row.ratio_noncoop = reference / baseline
    return row


def run_sweep(spec: SweepConfig, workers: int = 1, progress: bool = False) -> List[ResultRow]:
    """
    Evaluate a sweep.

    Rows come series by series, and within a series in axis order. The seed of every simulated estimate only depends
    on the master seed, the axis index and the mode, so the output does not depend on `workers`.

    Args:
        spec: The sweep
        workers: Worker processes handed to the simulator
        progress: Show a tqdm bar on stderr

    Returns:
        The result rows
    """
    entries = spec.series or [{"label": None}]
    series = [_Series(spec, entry) for entry in entries]
    # validate everything before the first estimate runs
    scenarios = [[x.scenario(spec, v) for v in spec.values] for x in series]

    rows = []
    total = len(series) * len(spec.values)
    with tqdm(total=total, desc=spec.label, bar_format=TQDM_BAR_FORMAT, disable=not progress) as bar:
        for x, series_scenarios in zip(series, scenarios):
            for index, (value, s) in enumerate(zip(spec.values, series_scenarios)):
                rows.append(_evaluate(spec, x, s, value, index, workers))
                bar.update(1)
    logger.info(f"Sweep `{spec.label}` produced {len(rows)} rows")
    return rows


def write_results_csv(rows: List[ResultRow], target: str | os.PathLike | TextIO, spec: SweepConfig) -> None:
    """
    Write sweep rows with a provenance comment line first
    """
    header = f"vcoop {__version__} preset={spec.label} seed={spec.master_seed} spec_sha256={spec_hash(spec)}"
    if SweepMode.APPROX in spec.modes:
        header += " eta_columns=v2v_bits_per_cycle"
    write_csv([r.dict() for r in rows], RESULT_CSV_COLUMNS, target, header_comment=header)
    if not hasattr(target, "write"):
        logger.log_file_written(spec.label, str(target))
