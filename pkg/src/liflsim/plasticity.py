"""STDP: the ideal exponential window and the memristive write pipeline.

The pipeline detects spike order, maps ``|dt|`` to a write voltage through an
exponential converter and applies one rectangular pulse across the device,
with the polarity set by the order.  Only the potentiation drive is scaled by
``mitigation_gain``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .memristor import (DEFAULT_PARAMS, MemristorParams, MemristorState, Pulse,
                        integrate)


@dataclass(frozen=True)
class StdpIdealParams:
    tau_plus: float = 16.8
    tau_minus: float = 33.7
    A_plus: float = 0.78
    A_minus: float = -0.27

    def __post_init__(self):
        for name in ("tau_plus", "tau_minus"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.A_plus > 0:
            raise ValueError("A_plus must be positive")
        if not self.A_minus < 0:
            raise ValueError("A_minus must be negative")

    @property
    def peak_ratio(self) -> float:
        return self.A_plus / abs(self.A_minus)

    @property
    def tau_ratio(self) -> float:
        return self.tau_minus / self.tau_plus


@dataclass(frozen=True)
class StdpPipelineConfig:
    """Write-pipeline settings; times in ms, voltages in V.

    The defaults are the output of :func:`calibrate` on the default device
    from a probe state of 0.35.
    """

    V_write_max: float = 0.35
    V_write_min: float = 0.167
    tau_conv: float = 15.0
    pulse_width: float = 0.0005
    mitigation_gain: float = 0.96
    pairing_window: float = 100.0
    dt_max: float = 1e-4

    def __post_init__(self):
        if not self.V_write_min < self.V_write_max:
            raise ValueError("V_write_min must be below V_write_max")
        for name in ("pulse_width", "tau_conv", "pairing_window", "dt_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.mitigation_gain <= 1:
            raise ValueError(f"mitigation_gain must lie in (0, 1], got {self.mitigation_gain}")


class Order(enum.Enum):
    POTENTIATION = "potentiation"
    DEPRESSION = "depression"
    COINCIDENT = "coincident"


def ideal_stdp(delta_t, params: StdpIdealParams = StdpIdealParams()):
    """Exponential STDP window with ``delta_t = t_post - t_pre``; vectorized."""
    dt = np.asarray(delta_t, dtype=float)
    with np.errstate(over="ignore"):
        out = np.where(dt > 0, params.A_plus * np.exp(-dt / params.tau_plus),
                       np.where(dt < 0, params.A_minus * np.exp(dt / params.tau_minus), 0.0))
    return out if out.ndim else float(out)


def detect_order(t_pre: float, t_post: float) -> Order:
    if not (np.isfinite(t_pre) and np.isfinite(t_post)):
        raise ValueError("spike times must be finite")
    if t_post > t_pre:
        return Order.POTENTIATION
    if t_post < t_pre:
        return Order.DEPRESSION
    return Order.COINCIDENT


def delta_t_to_voltage(delta_t: float, config: StdpPipelineConfig = StdpPipelineConfig()) -> Optional[float]:
    """Signed write voltage for a pairing, or None when no update applies.

    Positive voltages potentiate, negative ones depress.
    """
    if delta_t == 0 or abs(delta_t) > config.pairing_window:
        return None
    span = config.V_write_max - config.V_write_min
    magnitude = config.V_write_min + span * np.exp(-abs(delta_t) / config.tau_conv)
    if delta_t > 0:
        return float(config.mitigation_gain * magnitude)
    return float(-magnitude)


def write_pulse(mem: MemristorState, voltage: float, config: StdpPipelineConfig,
                mem_params: MemristorParams = DEFAULT_PARAMS) -> MemristorState:
    return integrate(mem, Pulse(voltage, config.pulse_width), 0.0, config.pulse_width,
                     mem_params, config.dt_max)


def apply_pairing(mem: MemristorState, t_pre: float, t_post: float,
                  config: StdpPipelineConfig = StdpPipelineConfig(),
                  mem_params: MemristorParams = DEFAULT_PARAMS) -> tuple[MemristorState, float]:
    """Run one pre/post pairing through the pipeline.

    Returns the new device state and the weight change, which equals the
    state change because read conductance is linear in ``x``.
    """
    voltage = delta_t_to_voltage(t_post - t_pre, config)
    if voltage is None:
        return mem, 0.0
    new = write_pulse(mem, voltage, config, mem_params)
    return new, new.x - mem.x


def stdp_curve(delta_ts, config: StdpPipelineConfig = StdpPipelineConfig(),
               mem_params: MemristorParams = DEFAULT_PARAMS, probe_x: float = 0.35) -> np.ndarray:
    """State change from ``probe_x`` after a single pairing at each delta t."""
    probe = MemristorState(probe_x)
    return np.array([apply_pairing(probe, 0.0, float(dt), config, mem_params)[1]
                     for dt in np.asarray(delta_ts, dtype=float)])


def fit_decay(delta_ts, changes) -> tuple[float, float]:
    """Fit ``|change| = A exp(-|dt| / tau)`` on one branch by log-linear least squares.

    Returns ``(A, tau)``.  Zero changes are ignored.
    """
    t = np.abs(np.asarray(delta_ts, dtype=float))
    y = np.abs(np.asarray(changes, dtype=float))
    keep = y > 0
    if keep.sum() < 2:
        raise ValueError("need at least two nonzero changes to fit a decay")
    slope, intercept = np.polyfit(t[keep], np.log(y[keep]), 1)
    if slope >= 0:
        return float(np.exp(intercept)), float("inf")
    return float(np.exp(intercept)), float(-1.0 / slope)


@dataclass
class CurveSummary:
    peak_ltp: float
    peak_ltd: float
    tau_ltp: float
    tau_ltd: float

    @property
    def peak_ratio(self) -> float:
        return self.peak_ltp / self.peak_ltd

    @property
    def tau_ratio(self) -> float:
        return self.tau_ltd / self.tau_ltp


def summarize_curve(delta_ts, changes) -> CurveSummary:
    """Peak magnitudes and fitted decay constants of both branches."""
    dt = np.asarray(delta_ts, dtype=float)
    dx = np.asarray(changes, dtype=float)
    pos, neg = dt > 0, dt < 0
    _, tau_p = fit_decay(dt[pos], dx[pos])
    _, tau_n = fit_decay(dt[neg], dx[neg])
    return CurveSummary(float(np.max(np.abs(dx[pos]))), float(np.max(np.abs(dx[neg]))), tau_p, tau_n)


def ideal_scale(changes, ideal) -> float:
    """Least-squares factor mapping the ideal window onto measured changes."""
    ideal = np.asarray(ideal, dtype=float)
    denom = float(ideal @ ideal)
    return float(np.asarray(changes, dtype=float) @ ideal) / denom if denom else 0.0


def shape_error(changes, ideal) -> float:
    """Squared log-magnitude misfit to the ideal window under the best common scale.

    Working on ``log|change|`` weighs the tails of both branches like the
    peaks, so the error tracks the decay constants and, through the shared
    scale, the potentiation/depression amplitude ratio.  Infinite when any
    change is zero.
    """
    dx = np.abs(np.asarray(changes, dtype=float))
    ideal = np.abs(np.asarray(ideal, dtype=float))
    if not (dx > 0).all():
        return float("inf")
    resid = np.log(dx) - np.log(ideal)
    resid -= resid.mean()
    return float(resid @ resid)


@dataclass
class CalibrationReport:
    config: StdpPipelineConfig
    error: float
    scale: float
    summary: CurveSummary
    delta_ts: np.ndarray
    changes: np.ndarray
    evaluated: int
    unmitigated_ratio: float

    @property
    def peak_ratio(self) -> float:
        return self.summary.peak_ratio

    @property
    def tau_ratio(self) -> float:
        return self.summary.tau_ratio


class CalibrationError(RuntimeError):
    pass


DEFAULT_GRID = {
    "V_write_max": tuple(np.round(np.arange(0.20, 0.4501, 0.01), 3)),
    "V_write_min": tuple(np.round(np.arange(0.161, 0.2001, 0.003), 3)),
    "tau_conv": (5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0, 25.0, 30.0, 40.0),
    "mitigation_gain": tuple(np.round(np.arange(0.7, 1.0001, 0.01), 3)),
}


def _response_table(probe_x, config, mem_params, v_lo, v_hi, n):
    """Device state change from ``probe_x`` after one pulse, sampled over voltage."""
    volts = np.linspace(v_lo, v_hi, n)
    probe = MemristorState(probe_x)
    up = np.array([write_pulse(probe, v, config, mem_params).x - probe_x for v in volts])
    down = np.array([write_pulse(probe, -v, config, mem_params).x - probe_x for v in volts])
    return volts, up, down


def calibrate(config: StdpPipelineConfig = StdpPipelineConfig(),
              mem_params: MemristorParams = DEFAULT_PARAMS,
              ideal: StdpIdealParams = StdpIdealParams(),
              probe_x: float = 0.35,
              delta_ts=None,
              grid: Optional[dict] = None,
              table_points: int = 1501) -> CalibrationReport:
    """Grid-search the converter and mitigation settings against the ideal window.

    Searches ``V_write_max``, ``V_write_min``, ``tau_conv`` and
    ``mitigation_gain``; ``pulse_width`` and ``pairing_window`` are kept from
    ``config``.  Points that fail to potentiate for every positive delta t or
    depress for every negative one are skipped.  The device response to one
    pulse depends only on its voltage, so it is tabulated once and
    interpolated; the winner is re-measured with real pairings.

    Pass a ``grid`` entry with a single value to pin a parameter.
    """
    if not 0 < probe_x < 1:
        raise ValueError(f"probe_x must lie in (0, 1), got {probe_x}")
    grid = {**DEFAULT_GRID, **(grid or {})}
    if delta_ts is None:
        delta_ts = np.arange(-80.0, 80.0 + 1e-9, 2.0)
    delta_ts = np.asarray(delta_ts, dtype=float)
    delta_ts = delta_ts[(delta_ts != 0) & (np.abs(delta_ts) <= config.pairing_window)]
    target = ideal_stdp(delta_ts, ideal)
    pos = delta_ts > 0
    lag = np.abs(delta_ts)

    v_hi = max(grid["V_write_max"]) * 1.0001
    v_lo = min(grid["V_write_min"]) * min(min(grid["mitigation_gain"]), 1.0) * 0.9999
    volts, up, down = _response_table(probe_x, config, mem_params, v_lo, v_hi, table_points)

    best = None
    evaluated = 0
    for v_max, v_min, tau_conv in itertools.product(grid["V_write_max"], grid["V_write_min"],
                                                   grid["tau_conv"]):
        if not v_max > v_min:
            continue
        mag = v_min + (v_max - v_min) * np.exp(-lag / tau_conv)
        depress = np.interp(mag[~pos], volts, down)
        if not (depress < 0).all():
            continue
        for gain in grid["mitigation_gain"]:
            evaluated += 1
            dx = np.empty_like(mag)
            dx[~pos] = depress
            dx[pos] = np.interp(gain * mag[pos], volts, up)
            if not (dx[pos] > 0).all():
                continue
            err = shape_error(dx, target)
            if best is None or err < best[0]:
                best = (err, v_max, v_min, tau_conv, gain)
    if best is None:
        raise CalibrationError("no grid point produces both potentiation and depression")

    _, v_max, v_min, tau_conv, gain = best
    fitted = replace(config, V_write_max=float(v_max), V_write_min=float(v_min),
                     tau_conv=float(tau_conv), mitigation_gain=float(gain))
    changes = stdp_curve(delta_ts, fitted, mem_params, probe_x)
    raw = stdp_curve(delta_ts, replace(fitted, mitigation_gain=1.0), mem_params, probe_x)
    return CalibrationReport(fitted, shape_error(changes, target), ideal_scale(changes, target),
                             summarize_curve(delta_ts, changes), delta_ts, changes, evaluated,
                             summarize_curve(delta_ts, raw).peak_ratio)
