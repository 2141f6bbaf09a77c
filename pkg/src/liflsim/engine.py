"""Discrete-event simulation of LIFL networks with memristive STDP synapses.

Events are ordered by ``(time, kind, target, seq)`` with kind priority
fire < refractory end < external spike < synaptic delivery, so a neuron
scheduled to fire at ``t`` does so before any input arriving at ``t``.
Superseded fire events are left in the queue and dropped on pop by comparing
schedule versions.
"""
from __future__ import annotations

import copy
import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import neuron as nrn
from .memristor import DEFAULT_PARAMS, DEFAULT_V_READ, MemristorParams, MemristorState, normalized_weight
from .neuron import Mode, NeuronParams, NeuronState
from .plasticity import StdpPipelineConfig, apply_pairing

PAIRING_POLICIES = ("nearest", "latest")


class EventKind(enum.IntEnum):
    NEURON_FIRE = 0
    REFRACTORY_END = 1
    EXTERNAL_SPIKE = 2
    SYNAPTIC_DELIVERY = 3


@dataclass(frozen=True, order=True)
class Event:
    time: float
    kind: EventKind
    target: int
    seq: int
    payload: object = field(default=None, compare=False)


class EventQueue:
    """Min-heap of events; FIFO among fully tied events."""

    def __init__(self):
        self._heap: list[Event] = []
        self._seq = itertools.count()
        self.now = -math.inf

    def __len__(self):
        return len(self._heap)

    def schedule(self, time: float, kind: EventKind, target: int, payload=None) -> Event:
        if not math.isfinite(time):
            raise ValueError(f"event time must be finite, got {time}")
        if time < self.now:
            raise ValueError(f"cannot schedule {kind.name} at t={time} before current time {self.now}")
        ev = Event(time, kind, target, next(self._seq), payload)
        heapq.heappush(self._heap, ev)
        return ev

    def peek(self) -> Optional[Event]:
        return self._heap[0] if self._heap else None

    def pop_next(self) -> Event:
        ev = heapq.heappop(self._heap)
        self.now = ev.time
        return ev


@dataclass
class Synapse:
    pre: int
    post: int
    x0: float = 0.5
    plastic: bool = True
    delay: float = 0.0
    mem_params: MemristorParams = DEFAULT_PARAMS
    pipeline: StdpPipelineConfig = field(default_factory=StdpPipelineConfig)


@dataclass(frozen=True)
class Stimulus:
    target: int
    time: float
    amplitude: float = 1.0


@dataclass
class Network:
    """Neurons, synapses and external stimuli.

    ``neurons[i]`` holds the parameters of neuron ``i``; ``initial[i]`` its
    state at time 0.
    """

    neurons: list[NeuronParams] = field(default_factory=list)
    synapses: list[Synapse] = field(default_factory=list)
    stimuli: list[Stimulus] = field(default_factory=list)
    initial: list[NeuronState] = field(default_factory=list)
    pairing: str = "nearest"
    v_read: float = DEFAULT_V_READ

    def add_neuron(self, params: NeuronParams = NeuronParams(), state: Optional[NeuronState] = None) -> int:
        self.neurons.append(params)
        self.initial.append(state if state is not None else NeuronState())
        return len(self.neurons) - 1

    def connect(self, pre: int, post: int, **kwargs) -> int:
        self.synapses.append(Synapse(pre, post, **kwargs))
        return len(self.synapses) - 1

    def stimulate(self, target: int, time: float, amplitude: float = 1.0):
        self.stimuli.append(Stimulus(target, float(time), float(amplitude)))

    def validate(self):
        n = len(self.neurons)
        if len(self.initial) != n:
            raise ValueError("every neuron needs an initial state")
        if self.pairing not in PAIRING_POLICIES:
            raise ValueError(f"unknown pairing policy {self.pairing!r}; expected one of {PAIRING_POLICIES}")
        for k, s in enumerate(self.synapses):
            limit = min(s.mem_params.Vp, s.mem_params.Vn)
            if not 0 < self.v_read <= limit:
                raise ValueError(f"v_read={self.v_read} V would disturb synapse {k}; it must lie in (0, {limit}]")
        for k, s in enumerate(self.synapses):
            if not (0 <= s.pre < n and 0 <= s.post < n):
                raise ValueError(f"synapse {k} references a missing neuron ({s.pre} -> {s.post})")
            if s.pre == s.post:
                raise ValueError(f"synapse {k} is a self-loop on neuron {s.pre}")
            if not 0.0 <= s.x0 <= 1.0:
                raise ValueError(f"synapse {k} initial state {s.x0} outside [0, 1]")
            if not s.delay >= 0:
                raise ValueError(f"synapse {k} has negative delay")
        for s in self.stimuli:
            if not 0 <= s.target < n:
                raise ValueError(f"stimulus targets missing neuron {s.target}")
            if not (math.isfinite(s.time) and s.time >= 0):
                raise ValueError(f"stimulus time must be finite and nonnegative, got {s.time}")
            if not s.amplitude >= 0:
                raise ValueError(f"stimulus amplitude must be nonnegative, got {s.amplitude}")


MODE_CODE = {Mode.PASSIVE: 0, Mode.ACTIVE: 1, Mode.REFRACTORY: 2}


@dataclass(frozen=True)
class TraceRecord:
    """One output row.

    kinds and payloads:
      spike  ids=(neuron,)             values=()
      state  ids=(neuron,)             values=(S, mode code, scheduled fire or nan)
      weight ids=(synapse, pre, post)  values=(x, weight, delta x, delta t or nan)
      drop   ids=(neuron, source)      values=(amplitude,)   source is -1 for stimuli
    """

    time: float
    kind: str
    ids: tuple
    values: tuple


class Trace(list):
    def of_kind(self, kind: str) -> Iterator[TraceRecord]:
        return (r for r in self if r.kind == kind)

    def spikes(self) -> list[tuple[float, int]]:
        return [(r.time, r.ids[0]) for r in self.of_kind("spike")]

    def spike_times(self, neuron: int) -> np.ndarray:
        return np.array([t for t, i in self.spikes() if i == neuron])

    def weights(self, synapse: int) -> tuple[np.ndarray, np.ndarray]:
        rows = [(r.time, r.values[1]) for r in self.of_kind("weight") if r.ids[0] == synapse]
        t, w = zip(*rows) if rows else ((), ())
        return np.array(t), np.array(w)

    def pairings(self, synapse: int) -> list[TraceRecord]:
        return [r for r in self.of_kind("weight") if r.ids[0] == synapse and not math.isnan(r.values[3])]


class SimulationError(RuntimeError):
    pass


@dataclass
class _SynapseRuntime:
    mem: MemristorState
    last_pre: Optional[float] = None
    pre_used: bool = False
    last_post: Optional[float] = None
    post_used: bool = False


@dataclass
class Result:
    trace: Trace
    neurons: list[NeuronState]
    memristors: list[MemristorState]
    stale_fires: int

    def weight(self, synapse: int, params: MemristorParams = DEFAULT_PARAMS) -> float:
        return normalized_weight(self.memristors[synapse], params)


class Simulation:
    """One run over a :class:`Network`; the network itself is never mutated."""

    def __init__(self, net: Network):
        net.validate()
        self.net = net
        self.states = [copy.copy(s) for s in net.initial]
        self.syn = [_SynapseRuntime(MemristorState(s.x0)) for s in net.synapses]
        self.versions = [0] * len(net.neurons)
        self.outgoing = [[] for _ in net.neurons]
        self.incoming = [[] for _ in net.neurons]
        for k, s in enumerate(net.synapses):
            self.outgoing[s.pre].append(k)
            self.incoming[s.post].append(k)
        self.queue = EventQueue()
        self.trace = Trace()
        self.stale_fires = 0

    def _weight(self, k: int) -> float:
        s = self.net.synapses[k]
        return normalized_weight(self.syn[k].mem, s.mem_params, self.net.v_read)

    def _record_state(self, i: int, now: float):
        st = self.states[i]
        fire_at = st.scheduled_fire if st.scheduled_fire is not None else math.nan
        self.trace.append(TraceRecord(now, "state", (i,), (st.S, MODE_CODE[st.mode], fire_at)))

    def _record_weight(self, k: int, now: float, dx: float, delta_t: float):
        s = self.net.synapses[k]
        self.trace.append(TraceRecord(now, "weight", (k, s.pre, s.post),
                                      (self.syn[k].mem.x, self._weight(k), dx, delta_t)))

    def _pair(self, k: int, t_pre: float, t_post: float, now: float):
        s = self.net.synapses[k]
        rt = self.syn[k]
        rt.mem, dx = apply_pairing(rt.mem, t_pre, t_post, s.pipeline, s.mem_params)
        self._record_weight(k, now, dx, t_post - t_pre)

    def _schedule_fire(self, i: int):
        self.versions[i] += 1
        self.queue.schedule(self.states[i].scheduled_fire, EventKind.NEURON_FIRE, i, self.versions[i])

    def deliver(self, i: int, amplitude: float, now: float, synapse: Optional[int] = None):
        st = self.states[i]
        if st.mode is Mode.REFRACTORY:
            if nrn.is_refractory(st, now):
                source = -1 if synapse is None else synapse
                self.trace.append(TraceRecord(now, "drop", (i, source), (amplitude,)))
                return
            st = self.states[i] = nrn.release(st, now)
        value = amplitude if synapse is None else amplitude * self._weight(synapse)
        new = nrn.update(st, self.net.neurons[i], value, now)
        self.states[i] = new
        if new.mode is Mode.ACTIVE:
            self._schedule_fire(i)
        self._record_state(i, now)
        if synapse is not None and self.net.synapses[synapse].plastic:
            self._on_pre(synapse, now)

    def _on_pre(self, k: int, now: float):
        rt = self.syn[k]
        window = self.net.synapses[k].pipeline.pairing_window
        fresh = self.net.pairing == "latest" or not rt.post_used
        if rt.last_post is not None and fresh and now - rt.last_post <= window:
            rt.post_used = True
            self._pair(k, now, rt.last_post, now)
        rt.last_pre, rt.pre_used = now, False

    def _on_post(self, k: int, now: float):
        rt = self.syn[k]
        window = self.net.synapses[k].pipeline.pairing_window
        fresh = self.net.pairing == "latest" or not rt.pre_used
        if rt.last_pre is not None and fresh and now - rt.last_pre <= window:
            rt.pre_used = True
            self._pair(k, rt.last_pre, now, now)
        rt.last_post, rt.post_used = now, False

    def handle_fire(self, i: int, now: float, version: int):
        if version != self.versions[i]:
            self.stale_fires += 1
            return
        st, amplitude = nrn.fire(self.states[i], self.net.neurons[i], now)
        self.states[i] = st
        self.trace.append(TraceRecord(now, "spike", (i,), ()))
        self._record_state(i, now)
        self.queue.schedule(st.refractory_until, EventKind.REFRACTORY_END, i)
        for k in self.outgoing[i]:
            s = self.net.synapses[k]
            self.queue.schedule(now + s.delay, EventKind.SYNAPTIC_DELIVERY, s.post, (k, amplitude))
        for k in self.incoming[i]:
            if self.net.synapses[k].plastic:
                self._on_post(k, now)

    def handle_refractory_end(self, i: int, now: float):
        st = self.states[i]
        if st.mode is Mode.REFRACTORY and now >= st.refractory_until:
            self.states[i] = nrn.release(st, now)
            self._record_state(i, now)

    def _dispatch(self, ev: Event):
        if ev.kind is EventKind.NEURON_FIRE:
            self.handle_fire(ev.target, ev.time, ev.payload)
        elif ev.kind is EventKind.REFRACTORY_END:
            self.handle_refractory_end(ev.target, ev.time)
        elif ev.kind is EventKind.EXTERNAL_SPIKE:
            self.deliver(ev.target, ev.payload, ev.time)
        else:
            k, amplitude = ev.payload
            self.deliver(ev.target, amplitude, ev.time, synapse=k)

    def run(self, t_end: float) -> Result:
        if not t_end >= 0:
            raise ValueError(f"t_end must be >= 0, got {t_end}")
        for k in range(len(self.net.synapses)):
            self._record_weight(k, 0.0, 0.0, math.nan)
        for s in self.net.stimuli:
            self.queue.schedule(s.time, EventKind.EXTERNAL_SPIKE, s.target, s.amplitude)
        while self.queue and self.queue.peek().time <= t_end:
            ev = self.queue.pop_next()
            try:
                self._dispatch(ev)
            except Exception as exc:
                raise SimulationError(
                    f"{ev.kind.name.lower()} event at t={ev.time} on neuron {ev.target} failed: {exc}") from exc
        return Result(self.trace, list(self.states), [rt.mem for rt in self.syn], self.stale_fires)


def run(net: Network, t_end: float) -> Result:
    return Simulation(net).run(t_end)


def dense_states(trace: Trace, net: Network, neuron: int, times) -> np.ndarray:
    """Inner state of ``neuron`` at arbitrary ``times`` within the run.

    Between recorded events the state is evaluated in closed form; at an
    event time the post-event value is returned.
    """
    rows = [r for r in trace.of_kind("state") if r.ids[0] == neuron]
    params = net.neurons[neuron]
    anchors = [r.time for r in rows]
    out = np.empty(len(times))
    for j, t in enumerate(np.asarray(times, dtype=float)):
        idx = int(np.searchsorted(anchors, t, side="right")) - 1
        if idx < 0:
            st = net.initial[neuron]
        else:
            S, code, fire_at = rows[idx].values
            mode = [Mode.PASSIVE, Mode.ACTIVE, Mode.REFRACTORY][int(code)]
            st = NeuronState(S=S, last_update=rows[idx].time, mode=mode,
                             scheduled_fire=None if math.isnan(fire_at) else fire_at,
                             refractory_until=math.inf if mode is Mode.REFRACTORY else None)
        out[j] = nrn.state_at(st, params, t)
    return out
