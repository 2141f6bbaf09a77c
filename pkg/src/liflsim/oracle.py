"""Clock-driven reference simulator used to cross-check the event engine.

Time advances on a fixed grid of width ``dt``.  A passive neuron loses
``L_d`` per ms, a suprathreshold neuron counts down ``1/(S-1)`` and fires
once the countdown is spent.  While counting, the state is re-derived from
the remaining countdown as ``1 + 1/remaining`` before an input is added;
the engine's closed-form active update is not used here.  Write pulses are
integrated with fixed-step RK4 at ``mem_dt``.

Two timing modes:

* ``interpolate=True`` (default): inputs act at their own times and a
  neuron fires at the exact instant its countdown reaches zero within the
  step.
* ``interpolate=False``: every time is rounded up to the grid, so each
  spike is late by less than ``dt`` and the lateness accumulates along
  synaptic chains.

Steps without events are skipped; decay and countdown are linear in the
elapsed time, so skipping gives the same state as stepping.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass

from .engine import Network, Trace, TraceRecord
from .memristor import MemristorState, normalized_weight, state_rate
from .plasticity import delta_t_to_voltage

_TOL = 1e-9
# same precedence as the event engine
FIRE, REFRACTORY_END, STIMULUS, DELIVERY = range(4)


@dataclass(frozen=True)
class OracleConfig:
    dt: float = 1e-3
    t_end: float = 100.0
    mem_dt: float = 5e-7
    interpolate: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and self.mem_dt > 0):
            raise ValueError("dt and mem_dt must be positive")

    def check(self, net: Network):
        """Reject networks whose time constants the grid cannot resolve."""
        for p in net.neurons:
            if 0 < p.t_arp < 10 * self.dt:
                raise ValueError(f"dt={self.dt} is not 10x below t_arp={p.t_arp}")
        for s in net.synapses:
            if s.pipeline.tau_conv < 10 * self.dt:
                raise ValueError(f"dt={self.dt} is not 10x below tau_conv={s.pipeline.tau_conv}")
            if s.pipeline.pulse_width < 10 * self.mem_dt:
                raise ValueError(f"mem_dt={self.mem_dt} is not 10x below pulse_width={s.pipeline.pulse_width}")


def rk4_pulse(x: float, voltage: float, width: float, mem_dt: float, params) -> float:
    """Fixed-step RK4 under a constant voltage, clamping to [0, 1] each step."""
    n = max(1, round(width / mem_dt))
    h = width / n
    for _ in range(n):
        k1 = state_rate(x, voltage, params)
        k2 = state_rate(min(1.0, max(0.0, x + 0.5 * h * k1)), voltage, params)
        k3 = state_rate(min(1.0, max(0.0, x + 0.5 * h * k2)), voltage, params)
        k4 = state_rate(min(1.0, max(0.0, x + h * k3)), voltage, params)
        x = min(1.0, max(0.0, x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0))
    return x


class _Cell:
    __slots__ = ("counting", "refractory", "S", "anchor", "countdown", "version")

    def __init__(self, S: float):
        self.counting = False
        self.refractory = False
        self.S = S
        self.anchor = 0.0
        self.countdown = 0.0
        self.version = 0


class _Clock:
    def __init__(self, net: Network, config: OracleConfig):
        self.net = net
        self.cfg = config
        self.dt = config.dt
        self.params = net.neurons
        self.cells = [_Cell(s.S) for s in net.initial]
        self.xs = [s.x0 for s in net.synapses]
        n = len(self.xs)
        self.last_pre, self.pre_used = [None] * n, [False] * n
        self.last_post, self.post_used = [None] * n, [False] * n
        self.outgoing = defaultdict(list)
        self.incoming = defaultdict(list)
        for k, s in enumerate(net.synapses):
            self.outgoing[s.pre].append(k)
            self.incoming[s.post].append(k)
        self.buckets = defaultdict(list)
        self.seq = 0
        self.trace = Trace()

    # -- time grid -----------------------------------------------------------

    def step_of(self, t: float) -> int:
        return max(0, math.ceil(t / self.dt - _TOL))

    def snap(self, t: float) -> float:
        return t if self.cfg.interpolate else self.step_of(t) * self.dt

    def post(self, t: float, kind: int, target: int, payload=None):
        self.seq += 1
        heapq.heappush(self.buckets[self.step_of(t)], (t, kind, target, self.seq, payload))

    # -- neuron bookkeeping --------------------------------------------------

    def level(self, i: int, t: float) -> float:
        c = self.cells[i]
        if c.refractory:
            return 0.0
        if c.counting:
            return 1.0 + 1.0 / (c.countdown - (t - c.anchor))
        return max(0.0, c.S - self.params[i].L_d * (t - c.anchor))

    def start_countdown(self, i: int, t: float, S: float):
        c = self.cells[i]
        d = self.params[i].d
        c.counting, c.anchor = True, t
        c.countdown = 1.0 / d if S == 1.0 + d else 1.0 / (S - 1.0)
        c.version += 1
        if self.cfg.interpolate:
            when = t + c.countdown
        else:
            # first grid point at which the countdown is spent
            when = t + max(1, math.ceil((c.countdown - _TOL) / self.dt)) * self.dt
        self.post(when, FIRE, i, c.version)
        return when

    def record(self, i: int, t: float, S: float, mode: int, fire_at: float = math.nan):
        self.trace.append(TraceRecord(t, "state", (i,), (S, mode, fire_at)))

    # -- plasticity ----------------------------------------------------------

    def pair(self, j: int, t_pre: float, t_post: float, t: float):
        s = self.net.synapses[j]
        v = delta_t_to_voltage(t_post - t_pre, s.pipeline)
        old = self.xs[j]
        if v is not None:
            self.xs[j] = rk4_pulse(old, v, s.pipeline.pulse_width, self.cfg.mem_dt, s.mem_params)
        self.trace.append(TraceRecord(t, "weight", (j, s.pre, s.post),
                                      (self.xs[j], self.xs[j], self.xs[j] - old, t_post - t_pre)))

    def in_window(self, j: int, t: float, other) -> bool:
        return other is not None and t - other <= self.net.synapses[j].pipeline.pairing_window

    # -- handlers ------------------------------------------------------------

    def fire(self, i: int, t: float, version: int):
        c = self.cells[i]
        if not c.counting or version != c.version:
            return
        c.counting, c.refractory, c.S, c.anchor = False, True, 0.0, t
        self.trace.append(TraceRecord(t, "spike", (i,), ()))
        self.record(i, t, 0.0, 2)
        self.post(self.snap(t + self.params[i].t_arp), REFRACTORY_END, i)
        for j in self.outgoing[i]:
            s = self.net.synapses[j]
            self.post(self.snap(t + s.delay), DELIVERY, s.post, j)
        latest = self.net.pairing == "latest"
        for j in self.incoming[i]:
            if not self.net.synapses[j].plastic:
                continue
            if self.in_window(j, t, self.last_pre[j]) and (latest or not self.pre_used[j]):
                self.pre_used[j] = True
                self.pair(j, self.last_pre[j], t, t)
            self.last_post[j], self.post_used[j] = t, False

    def release(self, i: int, t: float):
        c = self.cells[i]
        if c.refractory:
            c.refractory, c.S, c.anchor = False, 0.0, t
            self.record(i, t, 0.0, 0)

    def deliver(self, i: int, t: float, value: float, j=None):
        c = self.cells[i]
        if c.refractory:
            self.trace.append(TraceRecord(t, "drop", (i, -1 if j is None else j), (value,)))
            return
        if j is not None:
            value *= normalized_weight(MemristorState(self.xs[j]), self.net.synapses[j].mem_params,
                                       self.net.v_read)
        S = self.level(i, t) + value
        if c.counting or S >= 1.0 + self.params[i].d:
            self.record(i, t, S, 1, self.start_countdown(i, t, S))
        else:
            c.S, c.anchor = S, t
            self.record(i, t, S, 0)
        if j is not None and self.net.synapses[j].plastic:
            latest = self.net.pairing == "latest"
            if self.in_window(j, t, self.last_post[j]) and (latest or not self.post_used[j]):
                self.post_used[j] = True
                self.pair(j, t, self.last_post[j], t)
            self.last_pre[j], self.pre_used[j] = t, False

    def run(self) -> Trace:
        for j, s in enumerate(self.net.synapses):
            self.trace.append(TraceRecord(0.0, "weight", (j, s.pre, s.post), (s.x0, s.x0, 0.0, math.nan)))
        for s in self.net.stimuli:
            self.post(self.snap(s.time), STIMULUS, s.target, s.amplitude)
        t_end = self.cfg.t_end
        while self.buckets:
            k = min(self.buckets)
            bucket = self.buckets[k]
            while bucket:
                t, kind, target, _, payload = heapq.heappop(bucket)
                if t > t_end:
                    return self.trace
                if kind == FIRE:
                    self.fire(target, t, payload)
                elif kind == REFRACTORY_END:
                    self.release(target, t)
                elif kind == STIMULUS:
                    self.deliver(target, t, payload)
                else:
                    self.deliver(target, t, 1.0, payload)
            del self.buckets[k]
        return self.trace


def run_clocked(net: Network, config: OracleConfig = OracleConfig()) -> tuple[Trace, list[float]]:
    """Simulate ``net`` on the grid.  Returns the trace and the final device states."""
    net.validate()
    config.check(net)
    for i, s in enumerate(net.initial):
        if s.mode.value != "passive" or s.S >= net.neurons[i].s_th or s.last_update != 0:
            raise ValueError(f"neuron {i}: the oracle only starts from subthreshold passive states at t=0")
    clock = _Clock(net, config)
    trace = clock.run()
    return trace, clock.xs
