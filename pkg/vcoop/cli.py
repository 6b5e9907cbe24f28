"""
Command line entry point.

    vcoop validate scenario.json --out report.json
    vcoop analytic scenario.json --sweep d=2:50:2 --out eta.csv
    vcoop simulate scenario.json --models models.json --mode event --cycles 2000 --seed 7 --trace trace.csv
    vcoop lp-check --regime transitional --trials 500 --seed 0
    vcoop sweep sweep.yaml --workers 8 --out results.csv
    vcoop figure --preset fig5 --out results/ --seed 0

Exit codes: 0 on success, 1 for invalid input (configs, flags), 2 for runtime failures such as a failed oracle check.
Command output goes to stdout, logs to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import pandas as pd

from . import __version__
from .analytic import non_cooperative_throughput, throughput, validity_density
from .configs import ModelConfig, SweepConfig
from .constants import (
    ANALYTIC_CSV_COLUMNS,
    DEFAULT_LP_CAP,
    DEFAULT_N_CYCLES,
    MIN_CYCLES_FOR_CI,
    OptimumSolver,
    OracleSuite,
    SimulationMode,
    SweepAxis,
)
from .experiments import figure_preset, run_sweep, write_results_csv
from .experiments.sweep import AXIS_FILE_KEYS
from .optimizer import run_oracle_suite
from .scenario import classify_regime, load_scenario, serialize_scenario, validate_scenario
from .sim import estimate_from_traces, simulate_cycles, write_trace_csv
from .utils import Logger, exec_timer, parse_range, set_verbosity, write_csv


__all__ = ["main", "build_parser", "CliUsageError"]

logger = Logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


class CliUsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, usage errors must map to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliUsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _emit(text: str):
    sys.stdout.write(text)
    sys.stdout.flush()


def _emit_json(name: str, obj: dict, out: Optional[str] = None, **kwargs):
    text = json.dumps(obj, **kwargs) + "\n"
    if out is None:
        _emit(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    with open(out, "w") as f:
        f.write(text)
    logger.log_file_written(name, out)


def cmd_validate(args) -> int:
    s = load_scenario(args.config)
    regime = classify_regime(s)
    rho_min = validity_density(s)
    if s.rho2 == 0:
        note = "rho2 = 0, only direct V2I data (non-cooperative)"
    elif s.rho2 < rho_min:
        note = "rho2 is below rho_min, cooperative formulas are clamped at the non-cooperative value"
        logger.warning(f"rho2={s.rho2} veh/m is below the validity threshold {rho_min:.6g} veh/m")
    else:
        note = "rho2 is above rho_min, cooperative formulas are valid"
    report = {
        "scenario": serialize_scenario(s),
        "regime": str(regime.kind),
        "w_lo": regime.w_lo,
        "w_hi": regime.w_hi,
        "rho_min": rho_min,
        "note": note,
    }
    _emit_json("validation report", report, args.out, indent=2)
    return EXIT_OK


def _parse_sweep_flag(text: str):
    axis, sep, spec = text.partition("=")
    if not sep:
        raise CliUsageError(f"Invalid --sweep `{text}`, expected `axis=lo:hi:step`")
    if axis not in SweepAxis.list():
        raise CliUsageError(f"Invalid sweep axis `{axis}`. Available options are {SweepAxis.list()}")
    return SweepAxis(axis), parse_range(spec)


def _analytic_row(s, axis=None, value=None) -> dict:
    breakdown = throughput(s)
    return {
        "axis": None if axis is None else str(axis),
        "value": value,
        "regime": str(breakdown.regime.kind),
        "e_cycle_time": breakdown.e_cycle_time,
        "e_v2i_data": breakdown.e_v2i_data,
        "e_v2v_data": breakdown.e_v2v_data,
        "e_v2v_data_upper": breakdown.e_v2v_data_upper,
        "eta_analytic": None if breakdown.is_interval else breakdown.eta,
        "eta_lower": breakdown.eta_lower if breakdown.is_interval else None,
        "eta_upper": breakdown.eta_upper,
        "eta_noncoop": non_cooperative_throughput(s),
        "transition_point": breakdown.transition_point,
        "clamped": breakdown.clamped,
    }


def cmd_analytic(args) -> int:
    s = load_scenario(args.config)
    if args.sweep is None:
        rows = [_analytic_row(s)]
    else:
        axis, values = _parse_sweep_flag(args.sweep)
        raw = serialize_scenario(s)
        rows = [_analytic_row(validate_scenario({**raw, AXIS_FILE_KEYS[axis]: v}), axis, v) for v in values]
    target = sys.stdout if args.out is None else args.out
    write_csv(rows, ANALYTIC_CSV_COLUMNS, target)
    if args.out is not None:
        logger.log_file_written("analytic", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.cycles < MIN_CYCLES_FOR_CI:
        raise CliUsageError(f"--cycles must be at least {MIN_CYCLES_FOR_CI}, got {args.cycles}")
    s = load_scenario(args.config)
    models = ModelConfig.load(args.models) if args.models else ModelConfig()
    if args.mode == SimulationMode.SAMPLED and args.models:
        logger.warning("Sampled mode ignores the models file, use `--mode event` to simulate other models")
    logger.info(f"Simulating {args.cycles} cycles in {args.mode} mode ({models.summary()})")

    traces = simulate_cycles(
        s,
        models=models,
        mode=args.mode,
        n_cycles=args.cycles,
        master_seed=args.seed,
        workers=args.workers,
        lp_cap=args.lp_cap,
        optimum_solver=args.optimum_solver,
        progress=args.progress,
    )
    estimate = estimate_from_traces(traces, args.mode, args.seed, s)
    if args.trace:
        header = f"vcoop {__version__} mode={args.mode} seed={args.seed} cycles={args.cycles}"
        write_trace_csv(traces, args.trace, header_comment=header)
    _emit_json("estimate", estimate.dict(), args.out, sort_keys=True)
    return EXIT_OK


def cmd_lp_check(args) -> int:
    base = load_scenario(args.config) if args.config else None
    with exec_timer() as timer:
        reports = run_oracle_suite(
            args.regime,
            trials=args.trials,
            n_max=args.n_max,
            seed=args.seed,
            base=base,
            progress=args.progress,
        )
    logger.info(f"Checked {len(reports)} suite(s) of {args.trials} trials in {timer.time:.2f}s")
    table = pd.DataFrame([r.row() for r in reports])
    _emit(table.to_string(index=False) + "\n")
    failed = [r for r in reports if not r.passed]
    for report in failed:
        for failure in report.failures:
            logger.error(f"Suite `{report.suite}`: {failure}")
    return EXIT_FAILURE if failed else EXIT_OK


def _write_sweep(spec: SweepConfig, args, target) -> None:
    rows = run_sweep(spec, workers=args.workers, progress=args.progress)
    write_results_csv(rows, target, spec)


def cmd_sweep(args) -> int:
    spec = SweepConfig.load(args.config)
    if args.cycles is not None:
        spec.n_cycles = args.cycles
    if args.seed is not None:
        spec.master_seed = args.seed
    _write_sweep(spec, args, sys.stdout if args.out is None else args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    spec = figure_preset(args.preset, n_cycles=args.cycles, master_seed=args.seed)
    logger.info(f"Running preset `{args.preset}`: {spec.description or spec.label}")
    _write_sweep(spec, args, os.path.join(args.out, f"{args.preset}.csv"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    running = _ArgumentParser(add_help=False)
    running.add_argument(
        "--workers", type=_positive_int, default=1, help="Worker processes, results do not depend on it"
    )
    running.add_argument("--progress", action="store_true", help="Show progress bars on stderr")

    parser = _ArgumentParser(prog="vcoop", description="Throughput of infrastructure-assisted cooperative downloads")
    parser.add_argument("--version", action="version", version=f"vcoop {__version__}")
    subparsers = parser.add_subparsers(dest="verb", required=True)

    p = subparsers.add_parser("validate", parents=[common], help="Check a scenario file and print its regime")
    p.add_argument("config", help="Scenario JSON/YAML file")
    p.add_argument("--out", default=None, help="JSON file, stdout if omitted")
    p.set_defaults(func=cmd_validate)

    p = subparsers.add_parser("analytic", parents=[common], help="Closed-form throughput as CSV")
    p.add_argument("config", help="Scenario JSON/YAML file")
    p.add_argument(
        "--sweep", default=None, help="Sweep one axis, `d=2:50:2` (km), `w_I=0.5:8:0.5` (Mb/s) or `rho2=...` (veh/m)"
    )
    p.add_argument("--out", default=None, help="CSV file, stdout if omitted")
    p.set_defaults(func=cmd_analytic)

    p = subparsers.add_parser("simulate", parents=[common, running], help="Monte Carlo throughput estimate as JSON")
    p.add_argument("config", help="Scenario JSON/YAML file")
    p.add_argument("--models", default=None, help="Model config file (mobility, connection, channel)")
    p.add_argument("--mode", default=str(SimulationMode.SAMPLED), choices=SimulationMode.list())
    p.add_argument("--cycles", type=int, default=DEFAULT_N_CYCLES, help="Retained cycles")
    p.add_argument("--seed", type=int, required=True, help="Master seed of every random stream")
    p.add_argument("--trace", default=None, help="Write the per-cycle trace CSV here")
    p.add_argument("--out", default=None, help="JSON file, stdout if omitted")
    p.add_argument("--lp-cap", type=_positive_int, default=DEFAULT_LP_CAP)
    p.add_argument("--optimum-solver", default=str(OptimumSolver.CUT), choices=OptimumSolver.list())
    p.set_defaults(func=cmd_simulate)

    p = subparsers.add_parser("lp-check", parents=[common], help="Check the closed-form schedules against the LP")
    p.add_argument("--trials", type=_positive_int, default=500)
    p.add_argument("--n-max", type=_positive_int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regime", default=str(OracleSuite.ALL), choices=OracleSuite.list())
    p.add_argument("--config", default=None, help="Base scenario, the reference setting if omitted")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_lp_check)

    p = subparsers.add_parser("sweep", parents=[common, running], help="Run a sweep config file")
    p.add_argument("config", help="Sweep YAML/JSON file")
    p.add_argument("--out", default=None, help="CSV file, stdout if omitted")
    p.add_argument("--cycles", type=_positive_int, default=None, help="Override of the cycles per estimate")
    p.add_argument("--seed", type=int, default=None, help="Override of the master seed")
    p.set_defaults(func=cmd_sweep)

    p = subparsers.add_parser("figure", parents=[common, running], help="Run a figure preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--out", default=".", help="Output directory, `<preset>.csv` is written into it")
    p.add_argument("--cycles", type=_positive_int, default=None, help="Override of the cycles per estimate")
    p.add_argument("--seed", type=int, required=True, help="Master seed of every random stream")
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        set_verbosity(args.log_level)
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
