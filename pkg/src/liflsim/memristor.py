"""Yakopcic voltage-controlled memristor.

The state ``x`` lives in [0, 1] (1 is the low-resistance state).  Currents are
in amperes, voltages in volts and the state rate is per ms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class MemristorParams:
    """Device fit constants.  ``Vn`` is stored as a positive magnitude."""

    a1: float = 0.17
    a2: float = 0.17
    b: float = 0.05
    Ap: float = 4000.0
    An: float = 4000.0
    Vp: float = 0.16
    Vn: float = 0.15
    xp: float = 0.3
    xn: float = 0.5
    alpha_p: float = 1.0
    alpha_n: float = 5.0
    eta: int = 1

    def __post_init__(self):
        for name in ("Vp", "Vn", "Ap", "An"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("xp", "xn"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        if self.eta not in (1, -1):
            raise ValueError(f"eta must be +1 or -1, got {self.eta}")


@dataclass(frozen=True)
class MemristorState:
    x: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"memristor state must lie in [0, 1], got {self.x}")


DEFAULT_PARAMS = MemristorParams()
DEFAULT_V_READ = 0.1


def current(x, V, params: MemristorParams = DEFAULT_PARAMS):
    """Device current; works on scalars and arrays."""
    V = np.asarray(V, dtype=float)
    amp = np.where(V >= 0, params.a1, params.a2)
    out = amp * np.asarray(x, dtype=float) * np.sinh(params.b * V)
    return out if out.ndim else float(out)


def threshold_g(V: float, params: MemristorParams = DEFAULT_PARAMS) -> float:
    """Thresholded drive; zero on the closed band [-Vn, Vp]."""
    if V > params.Vp:
        return params.Ap * (math.exp(V) - math.exp(params.Vp))
    if V < -params.Vn:
        return -params.An * (math.exp(-V) - math.exp(params.Vn))
    return 0.0


def window_p(x: float, xp: float) -> float:
    return (xp - x) / (1.0 - xp) + 1.0


def window_n(x: float, xn: float) -> float:
    return x / (1.0 - xn)


def drift_f(x: float, params: MemristorParams = DEFAULT_PARAMS, increasing: bool = True) -> float:
    """Nonlinear drift multiplier for motion in the given direction.

    Increasing motion is linear below ``xp``; decreasing motion is linear
    above ``1 - xn``.  Beyond the breakpoints an exponential times the window
    drives the rate to zero at the matching bound.
    """
    if increasing:
        if x < params.xp:
            return 1.0
        return math.exp(-params.alpha_p * (x - params.xp)) * window_p(x, params.xp)
    if x > 1.0 - params.xn:
        return 1.0
    return math.exp(params.alpha_n * (x + params.xn - 1.0)) * window_n(x, params.xn)


def state_rate(x: float, V: float, params: MemristorParams = DEFAULT_PARAMS) -> float:
    g = threshold_g(V, params)
    if g == 0.0:
        return 0.0
    drive = params.eta * g
    return drive * drift_f(x, params, increasing=drive > 0)


# -- waveforms ---------------------------------------------------------------

class Waveform:
    """Voltage as a function of time (ms).

    ``breakpoints`` lists discontinuities; the integrator never steps across
    one.
    """

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        return []


class Constant(Waveform):
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, t):
        return self.value


class PiecewiseConstant(Waveform):
    """``values[i]`` holds on ``[times[i], times[i+1])``; zero before ``times[0]``."""

    def __init__(self, times: Sequence[float], values: Sequence[float]):
        if len(times) != len(values):
            raise ValueError("times and values must have equal length")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("times must be nondecreasing")
        self.times = [float(t) for t in times]
        self.values = [float(v) for v in values]

    def __call__(self, t):
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return 0.0 if i < 0 else self.values[i]

    def breakpoints(self, t0, t1):
        return [t for t in self.times if t0 < t < t1]


class Pulse(PiecewiseConstant):
    """Rectangular pulse of ``amplitude`` volts on ``[start, start + width)``."""

    def __init__(self, amplitude: float, width: float, start: float = 0.0):
        if not width > 0:
            raise ValueError(f"pulse width must be > 0, got {width}")
        super().__init__([start, start + width], [amplitude, 0.0])
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.start = float(start)


class Sine(Waveform):
    def __init__(self, amplitude: float, period: float, phase: float = 0.0):
        self.amplitude = float(amplitude)
        self.period = float(period)
        self.phase = float(phase)

    def __call__(self, t):
        return self.amplitude * math.sin(2.0 * math.pi * t / self.period + self.phase)


# -- integration -------------------------------------------------------------

def _sample(waveform: Callable[[float], float], t: float) -> float:
    V = float(waveform(t))
    if not math.isfinite(V):
        raise ValueError(f"non-finite waveform sample {V} at t={t}")
    return V


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def _integrate_segment(x, waveform, a, b, params, dt_max, dx_max):
    t = a
    h_floor = 1e-6 * dt_max
    while t < b:
        V0 = _sample(waveform, t)
        k1 = state_rate(x, V0, params)
        h = min(dt_max, b - t)
        if k1 != 0.0:
            h = min(h, dx_max / abs(k1))
        while True:
            end = t + h
            # stay on the left side of a breakpoint at b
            t_end = end if end < b else math.nextafter(b, a)
            t_mid = t + 0.5 * h
            V_mid = _sample(waveform, t_mid)
            V_end = _sample(waveform, t_end)
            k2 = state_rate(_clamp(x + 0.5 * h * k1), V_mid, params)
            k3 = state_rate(_clamp(x + 0.5 * h * k2), V_mid, params)
            k4 = state_rate(_clamp(x + h * k3), V_end, params)
            dx = h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            # the drift function has a kink; creep up to it instead of stepping over
            kink = params.xp if dx > 0 else 1.0 - params.xn
            crosses = (x - kink) * (x + dx - kink) < 0
            if (abs(dx) <= dx_max and not crosses) or h <= h_floor:
                break
            h *= 0.5
        x = _clamp(x + dx)
        t = end if end < b else b
    return x


def integrate(state: MemristorState, waveform, t0: float, t1: float,
              params: MemristorParams = DEFAULT_PARAMS, dt_max: float = 0.01,
              dx_max: float = 0.01) -> MemristorState:
    """Advance the state under ``waveform`` from ``t0`` to ``t1`` (ms).

    Explicit RK4 steps no longer than ``dt_max`` and, where the device moves,
    short enough that ``|dx| <= dx_max`` per step.  The state is clamped to
    [0, 1] after every step.  ``waveform`` is a :class:`Waveform` or any
    callable of time.
    """
    if t1 < t0:
        raise ValueError(f"t1={t1} precedes t0={t0}")
    if not dt_max > 0:
        raise ValueError(f"dt_max must be > 0, got {dt_max}")
    if not 0 < dx_max <= 0.01:
        raise ValueError(f"dx_max must lie in (0, 0.01], got {dx_max}")
    cuts = getattr(waveform, "breakpoints", lambda a, b: [])(t0, t1)
    edges = [t0, *sorted(cuts), t1]
    x = state.x
    for a, b in zip(edges, edges[1:]):
        if b > a:
            x = _integrate_segment(x, waveform, a, b, params, dt_max, dx_max)
    return MemristorState(x)


def trajectory(state: MemristorState, waveform, times: Sequence[float],
               params: MemristorParams = DEFAULT_PARAMS, dt_max: float = 0.01):
    """States at each of the increasing sample ``times``; returns an array of x."""
    times = np.asarray(times, dtype=float)
    xs = np.empty(len(times))
    cur = state
    prev = times[0] if len(times) else 0.0
    for i, t in enumerate(times):
        cur = integrate(cur, waveform, prev, t, params, dt_max)
        xs[i] = cur.x
        prev = t
    return xs


# -- readout -----------------------------------------------------------------

def _check_read_voltage(V_read, params):
    if not 0 < V_read <= min(params.Vp, params.Vn):
        raise ValueError(
            f"read voltage {V_read} V is not in the nondestructive range (0, {min(params.Vp, params.Vn)}]")


def read_conductance(state: MemristorState, params: MemristorParams = DEFAULT_PARAMS,
                     V_read: float = DEFAULT_V_READ) -> float:
    """Small-signal conductance ``I(V_read) / V_read`` in siemens."""
    _check_read_voltage(V_read, params)
    return current(state.x, V_read, params) / V_read


def normalized_weight(state: MemristorState, params: MemristorParams = DEFAULT_PARAMS,
                      V_read: float = DEFAULT_V_READ) -> float:
    """Conductance mapped onto [0, 1] between the high- and low-resistance states."""
    g_min = read_conductance(MemristorState(0.0), params, V_read)
    g_max = read_conductance(MemristorState(1.0), params, V_read)
    w = (read_conductance(state, params, V_read) - g_min) / (g_max - g_min)
    return min(1.0, max(0.0, w))


def write_asymmetry(params: MemristorParams = DEFAULT_PARAMS, x0: float = 0.5,
                    amplitude: float = 0.3, width: float = 0.01, dt_max: float = 0.01):
    """State change from equal positive and negative write pulses starting at ``x0``."""
    up = integrate(MemristorState(x0), Pulse(amplitude, width), 0.0, width, params, dt_max).x - x0
    down = integrate(MemristorState(x0), Pulse(-amplitude, width), 0.0, width, params, dt_max).x - x0
    return up, down
