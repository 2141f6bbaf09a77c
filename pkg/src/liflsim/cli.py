"""Command-line front end.

    liflsim latency-curve | stdp-curve | hysteresis | motif | run  [options]

Each subcommand writes CSV files into ``--out`` (created if needed).  Exit
status is 0 on success, 1 when the config or the simulation fails and 2 on
bad command-line usage.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import experiments as ex
from .config import ConfigError, ExperimentConfig, load
from .engine import SimulationError, run as run_engine
from .oracle import run_clocked
from .plasticity import CalibrationError, calibrate

COMMANDS = ("latency-curve", "stdp-curve", "hysteresis", "motif", "run")


def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "none" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    n = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])
            n += 1
    return n


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {value}")
    return value


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _jobs(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment file (see docs/example.toml)")
    common.add_argument("--out", type=Path, default=Path("liflsim-out"),
                        help="output directory (default: ./liflsim-out)")
    common.add_argument("--seed", type=_seed, default=0,
                        help="reserved; every model here is deterministic")
    common.add_argument("--oracle", action="store_true",
                        help="use the clock-driven reference simulator instead of the event engine")
    common.add_argument("--dt-max", type=_positive, metavar="MS",
                        help="memristor integrator step cap (write pulses, or the sine drive for hysteresis)")
    common.add_argument("--jobs", type=_jobs, default=1, help="worker processes for curve sweeps")
    common.add_argument("--dense", type=_positive, metavar="MS",
                        help="also sample neuron states on a regular grid (motif and run)")

    parser = argparse.ArgumentParser(prog="liflsim", description="LIFL network and memristive STDP simulator")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("latency-curve", parents=[common], help="spike latency against input amplitude")
    stdp = sub.add_parser("stdp-curve", parents=[common], help="weight change against pre/post delay")
    stdp.add_argument("--calibrate", action="store_true",
                      help="fit the converter settings to the ideal window first")
    sub.add_parser("hysteresis", parents=[common], help="device I-V loop under a sine drive")
    motif = sub.add_parser("motif", parents=[common], help="three-neuron LTP/LTD demonstration")
    motif.add_argument("--swap", action="store_true", help="exchange the two stimulus trains")
    sub.add_parser("run", parents=[common], help="simulate the network described by --config")
    return parser


def _settings(args) -> ExperimentConfig:
    cfg = load(args.config) if args.config else ExperimentConfig()
    if args.dt_max is not None:
        cfg.pipeline = dataclasses.replace(cfg.pipeline, dt_max=args.dt_max)
        cfg.run = dataclasses.replace(cfg.run, hysteresis_dt_max=args.dt_max)
    if args.dense is not None:
        cfg.run = dataclasses.replace(cfg.run, dense_dt=args.dense)
    return cfg


def _say(msg: str):
    print(msg)


def cmd_latency_curve(args, cfg: ExperimentConfig, out: Path):
    r = cfg.run
    lo = cfg.neuron.s_th if math.isnan(r.input_min) else r.input_min
    amps = np.linspace(lo, r.input_max, r.input_points)
    oracle = r.oracle() if args.oracle else None
    rows = ex.latency_curve(amps, cfg.neuron, oracle, args.jobs)
    n = write_csv(out / "latency.csv", ex.LATENCY_HEADER, rows)
    _say(f"wrote {n} rows to {out / 'latency.csv'}")


def cmd_stdp_curve(args, cfg: ExperimentConfig, out: Path):
    r = cfg.run
    pipeline = cfg.pipeline
    if args.calibrate or r.calibrate:
        report = calibrate(pipeline, cfg.memristor, cfg.stdp, r.probe_x)
        pipeline = report.config
        _say(f"calibrated: V_write_max={pipeline.V_write_max} V_write_min={pipeline.V_write_min} "
             f"tau_conv={pipeline.tau_conv} mitigation_gain={pipeline.mitigation_gain}")
        _say(f"peak ratio {report.peak_ratio:.3f} (target {cfg.stdp.peak_ratio:.3f}), "
             f"decay ratio {report.tau_ratio:.3f} (target {cfg.stdp.tau_ratio:.3f})")
    dts = ex.default_delta_ts(r.delta_t_min, r.delta_t_max, r.delta_t_step)
    oracle = r.oracle() if args.oracle else None
    rows = ex.stdp_curve_rows(dts, pipeline, cfg.memristor, r.probe_x, cfg.stdp, oracle, args.jobs)
    n = write_csv(out / "stdp.csv", ex.STDP_HEADER, rows)
    _say(f"wrote {n} rows to {out / 'stdp.csv'}")


def cmd_hysteresis(args, cfg: ExperimentConfig, out: Path):
    r = cfg.run
    if args.oracle:
        print("note: hysteresis has no clock-driven variant; --oracle ignored", file=sys.stderr)
    settings = ex.HysteresisSettings(r.sine_amplitude, r.sine_period, r.sine_cycles,
                                     r.samples_per_cycle, r.x0, r.hysteresis_dt_max)
    rows = ex.hysteresis(settings, cfg.memristor)
    n = write_csv(out / "hysteresis.csv", ex.HYSTERESIS_HEADER, rows)
    _say(f"wrote {n} rows to {out / 'hysteresis.csv'}; loop area {ex.loop_area(rows):.6g} V*A")


def _write_trace(out: Path, trace, net, t_end: float, dense_dt: float, state_file: str = "states.csv",
                 neurons: Optional[Sequence[int]] = None):
    write_csv(out / "spikes.csv", ex.SPIKE_HEADER, ex.spike_rows(trace))
    write_csv(out / "weights.csv", ex.WEIGHT_HEADER, ex.weight_rows(trace))
    states = ex.state_rows(trace)
    if neurons is not None:
        states = [s for s in states if s[1] in neurons]
    if dense_dt > 0:
        write_csv(out / state_file, ("time_ms", "neuron", "S"),
                  ex.dense_state_rows(trace, net, t_end, dense_dt, neurons))
    else:
        write_csv(out / state_file, ex.STATE_HEADER, states)


def cmd_motif(args, cfg: ExperimentConfig, out: Path):
    r = cfg.run
    oracle = r.oracle() if args.oracle else None
    res = ex.motif(r.cycles, r.period, args.swap or r.swap, r.motif_x0, cfg.pipeline, cfg.neuron,
                   cfg.memristor, oracle)
    _write_trace(out, res.trace, res.network, res.t_end, r.dense_dt, "n3_state.csv", neurons=[2])
    n_spikes = sum(1 for _ in res.trace.of_kind("spike"))
    _say(f"{n_spikes} spikes; final device states S1={res.final_x[0]:.6f} S2={res.final_x[1]:.6f}")


def cmd_run(args, cfg: ExperimentConfig, out: Path):
    if args.config is None:
        raise ValueError("run needs --config <file> describing the network")
    net = cfg.build_network()
    t_end = cfg.run.t_end
    if args.oracle:
        trace, xs = run_clocked(net, cfg.run.oracle())
    else:
        trace = run_engine(net, t_end).trace
    _write_trace(out, trace, net, t_end, cfg.run.dense_dt)
    _say(f"{sum(1 for _ in trace.of_kind('spike'))} spikes; wrote spikes.csv, states.csv, weights.csv to {out}")


HANDLERS = {
    "latency-curve": cmd_latency_curve,
    "stdp-curve": cmd_stdp_curve,
    "hysteresis": cmd_hysteresis,
    "motif": cmd_motif,
    "run": cmd_run,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
        args.out.mkdir(parents=True, exist_ok=True)
        HANDLERS[args.command](args, cfg, args.out)
    except (ConfigError, SimulationError, CalibrationError, ValueError, OSError) as exc:
        print(f"liflsim {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
