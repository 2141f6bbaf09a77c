"""Experiment drivers behind the command-line tools.

Every driver returns plain rows (lists of tuples) plus a header, so the
caller decides how to store them.  Sweeps are made of independent
simulations and can be spread over worker processes with ``jobs > 1``; the
rows always come back in input order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .engine import Network, Trace, dense_states, run
from .memristor import (DEFAULT_PARAMS, MemristorParams, MemristorState, Sine, current,
                        trajectory)
from .neuron import NeuronParams, time_to_fire
from .oracle import OracleConfig, rk4_pulse, run_clocked
from .plasticity import (StdpIdealParams, StdpPipelineConfig, apply_pairing, delta_t_to_voltage,
                         ideal_scale, ideal_stdp)
from .scenarios import motif_duration, motif_network


def sweep(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``[fn(item) for item in items]``, optionally over ``jobs`` processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- latency curve -----------------------------------------------------------

LATENCY_HEADER = ("input", "S_after_input", "t_f_measured", "t_f_ideal")


def default_amplitudes(params: NeuronParams = NeuronParams(), points: int = 100,
                       top: float = 3.0) -> np.ndarray:
    """``points`` inputs from exactly ``S_th`` up to ``top``."""
    return np.linspace(params.s_th, top, points)


def _latency_point(amplitude: float, params: NeuronParams, oracle: Optional[OracleConfig]):
    net = Network()
    net.add_neuron(params)
    net.stimulate(0, 0.0, amplitude)
    horizon = params.t_f_max + 1.0
    if oracle is None:
        trace = run(net, horizon).trace
    else:
        trace, _ = run_clocked(net, replace(oracle, t_end=horizon))
    S = amplitude  # the neuron starts at rest
    spikes = trace.spike_times(0)
    measured = float(spikes[0]) if len(spikes) else None
    ideal = time_to_fire(S, params.d) if S >= params.s_th else None
    return (float(amplitude), float(S), measured, ideal)


def latency_curve(amplitudes: Iterable[float], params: NeuronParams = NeuronParams(),
                  oracle: Optional[OracleConfig] = None, jobs: int = 1) -> list[tuple]:
    """Drive a resting neuron with one input per amplitude and time its spike.

    Inputs that do not reach threshold report ``None`` for both latencies.
    """
    amps = [float(a) for a in amplitudes]
    return sweep(partial(_latency_point, params=params, oracle=oracle), amps, jobs)


# -- STDP window -------------------------------------------------------------

STDP_HEADER = ("delta_t_ms", "delta_x", "ideal_change_scaled")


def default_delta_ts(lo: float = -80.0, hi: float = 80.0, step: float = 2.0) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def _stdp_point(delta_t: float, config: StdpPipelineConfig, mem_params: MemristorParams,
                probe_x: float, oracle: Optional[OracleConfig]):
    if oracle is None:
        return apply_pairing(MemristorState(probe_x), 0.0, delta_t, config, mem_params)[1]
    voltage = delta_t_to_voltage(delta_t, config)
    if voltage is None:
        return 0.0
    return rk4_pulse(probe_x, voltage, config.pulse_width, oracle.mem_dt, mem_params) - probe_x


def stdp_curve_rows(delta_ts: Iterable[float], config: StdpPipelineConfig = StdpPipelineConfig(),
                    mem_params: MemristorParams = DEFAULT_PARAMS, probe_x: float = 0.35,
                    ideal: StdpIdealParams = StdpIdealParams(),
                    oracle: Optional[OracleConfig] = None, jobs: int = 1) -> list[tuple]:
    """One pairing per delta t from a fresh device at ``probe_x``.

    The last column is the ideal window scaled by its least-squares fit to
    the measured changes.
    """
    dts = [float(t) for t in delta_ts]
    for t in dts:
        if abs(t) > config.pairing_window:
            raise ValueError(f"delta t {t} ms lies outside the pairing window of {config.pairing_window} ms")
    fn = partial(_stdp_point, config=config, mem_params=mem_params, probe_x=probe_x, oracle=oracle)
    changes = np.array(sweep(fn, dts, jobs), dtype=float)
    target = ideal_stdp(np.array(dts), ideal)
    scale = ideal_scale(changes, target)
    return [(t, float(dx), float(scale * i)) for t, dx, i in zip(dts, changes, np.atleast_1d(target))]


# -- hysteresis --------------------------------------------------------------

HYSTERESIS_HEADER = ("time_ms", "V", "I", "x")


@dataclass(frozen=True)
class HysteresisSettings:
    amplitude: float = 0.45
    period: float = 1000.0
    cycles: int = 3
    samples_per_cycle: int = 400
    x0: float = 0.5
    dt_max: float = 0.5


def hysteresis(settings: HysteresisSettings = HysteresisSettings(),
               params: MemristorParams = DEFAULT_PARAMS) -> list[tuple]:
    """Sample (V, I, x) under a sine drive.

    Samples fall on exact fractions of the period, so the zero crossings of
    the drive are sampled too.
    """
    n = settings.cycles * settings.samples_per_cycle
    times = settings.period * np.arange(n + 1) / settings.samples_per_cycle
    wave = Sine(settings.amplitude, settings.period)
    xs = trajectory(MemristorState(settings.x0), wave, times, params, settings.dt_max)
    volts = np.array([wave(t) for t in times])
    amps = current(xs, volts, params)
    return [(float(t), float(v), float(i), float(x)) for t, v, i, x in zip(times, volts, amps, xs)]


def loop_area(rows: Sequence[tuple]) -> float:
    """Signed area enclosed by the sampled I-V trajectory (shoelace rule)."""
    v = np.array([r[1] for r in rows])
    i = np.array([r[2] for r in rows])
    return 0.5 * float(np.sum(v[:-1] * i[1:] - v[1:] * i[:-1]))


# -- motif -------------------------------------------------------------------

@dataclass
class MotifOutput:
    network: Network
    trace: Trace
    final_x: list[float]
    t_end: float


def motif(cycles: int = 6, period: float = 250.0, swap: bool = False, x0: float = 0.6,
          pipeline: StdpPipelineConfig = StdpPipelineConfig(), neuron: NeuronParams = NeuronParams(),
          mem_params: MemristorParams = DEFAULT_PARAMS,
          oracle: Optional[OracleConfig] = None) -> MotifOutput:
    """Run the three-neuron motif with the event engine, or the oracle if given."""
    net = motif_network(cycles, period, swap, x0, pipeline, neuron, mem_params)
    t_end = motif_duration(cycles, period)
    if oracle is None:
        res = run(net, t_end)
        return MotifOutput(net, res.trace, [m.x for m in res.memristors], t_end)
    trace, xs = run_clocked(net, replace(oracle, t_end=t_end))
    return MotifOutput(net, trace, list(xs), t_end)


# -- trace tables ------------------------------------------------------------

SPIKE_HEADER = ("time_ms", "neuron")
STATE_HEADER = ("time_ms", "neuron", "S", "mode", "scheduled_fire_ms")
WEIGHT_HEADER = ("time_ms", "synapse", "pre", "post", "x", "weight", "delta_x", "delta_t_ms")
MODE_NAMES = ("passive", "active", "refractory")


def _opt(v: float) -> Optional[float]:
    return None if math.isnan(v) else v


def spike_rows(trace: Trace) -> list[tuple]:
    return [(r.time, r.ids[0]) for r in trace.of_kind("spike")]


def state_rows(trace: Trace) -> list[tuple]:
    return [(r.time, r.ids[0], r.values[0], MODE_NAMES[int(r.values[1])], _opt(r.values[2]))
            for r in trace.of_kind("state")]


def weight_rows(trace: Trace) -> list[tuple]:
    return [(r.time, *r.ids, r.values[0], r.values[1], r.values[2], _opt(r.values[3]))
            for r in trace.of_kind("weight")]


def dense_state_rows(trace: Trace, net: Network, t_end: float, step: float,
                     neurons: Optional[Sequence[int]] = None) -> list[tuple]:
    """Inner states on a regular grid, evaluated in closed form between events."""
    if not step > 0:
        raise ValueError(f"dense step must be > 0, got {step}")
    times = step * np.arange(int(math.floor(t_end / step + 1e-9)) + 1)
    rows = []
    for i in (range(len(net.neurons)) if neurons is None else neurons):
        for t, S in zip(times, dense_states(trace, net, i, times)):
            rows.append((float(t), i, float(S)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows

