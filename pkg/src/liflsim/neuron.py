"""LIF-with-latency neuron: passive integration, active countdown, firing.

State is evaluated lazily: ``S`` is only made current when an event touches
the neuron, using the elapsed time since ``last_update``.  Time is in ms and
the inner state is dimensionless.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional


class Mode(enum.Enum):
    PASSIVE = "passive"
    ACTIVE = "active"
    REFRACTORY = "refractory"


class CausalityError(ValueError):
    """An update was requested at a time the neuron cannot accept."""


@dataclass(frozen=True)
class NeuronParams:
    """Neuron constants.

    Parameters
    ----------
    d : threshold offset, ``S_th = 1 + d``; the longest latency is ``1/d``.
    L_d : linear subthreshold decay per ms (0 gives a perfect integrator).
    t_arp : absolute refractory period in ms.
    """

    d: float = 0.04
    L_d: float = 0.01
    t_arp: float = 2.0

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"d must be > 0, got {self.d}")
        if not self.L_d >= 0:
            raise ValueError(f"L_d must be >= 0, got {self.L_d}")
        if not self.t_arp >= 0:
            raise ValueError(f"t_arp must be >= 0, got {self.t_arp}")

    @property
    def s_th(self) -> float:
        return 1.0 + self.d

    @property
    def t_f_max(self) -> float:
        return 1.0 / self.d


@dataclass(frozen=True)
class NeuronState:
    S: float = 0.0
    last_update: float = 0.0
    mode: Mode = Mode.PASSIVE
    scheduled_fire: Optional[float] = None
    refractory_until: Optional[float] = None


def time_to_fire(S: float, d: Optional[float] = None) -> float:
    """Latency ``1/(S-1)`` of a suprathreshold state.

    When ``d`` is given, states below ``1 + d`` are rejected and the
    threshold state itself returns exactly ``1/d``.
    """
    if not S > 1.0:
        raise ValueError(f"time-to-fire undefined for S={S} <= 1")
    if d is not None:
        s_th = 1.0 + d
        if S < s_th:
            raise ValueError(f"S={S} is below threshold {s_th}; passive states have no latency")
        if S == s_th:
            # (1 + d) - 1 != d in floating point
            return 1.0 / d
    return 1.0 / (S - 1.0)


def _check_input(value: float):
    if not value >= 0:
        raise ValueError(f"inputs must be nonnegative, got {value}")


def passive_update(state: NeuronState, params: NeuronParams, value: float, now: float) -> NeuronState:
    """Leaky integration of one input; may switch the neuron to active mode."""
    if state.mode is not Mode.PASSIVE:
        raise ValueError(f"passive_update on a {state.mode.value} neuron")
    if now < state.last_update:
        raise CausalityError(f"update at t={now} precedes last update t={state.last_update}")
    _check_input(value)
    elapsed = now - state.last_update
    S = max(0.0, state.S - params.L_d * elapsed) + value
    if S >= params.s_th:
        return NeuronState(S=S, last_update=now, mode=Mode.ACTIVE,
                           scheduled_fire=now + time_to_fire(S, params.d))
    return NeuronState(S=S, last_update=now)


def active_update(state: NeuronState, params: NeuronParams, value: float, now: float) -> NeuronState:
    """Advance a suprathreshold neuron to ``now`` and add an input.

    The state grows along the latency hyperbola so that, without input, the
    rescheduled fire time equals the previous one.
    """
    if state.mode is not Mode.ACTIVE:
        raise ValueError(f"active_update on a {state.mode.value} neuron")
    if now < state.last_update:
        raise CausalityError(f"update at t={now} precedes last update t={state.last_update}")
    if now >= state.scheduled_fire:
        raise CausalityError(f"input at t={now} does not precede the scheduled fire at {state.scheduled_fire}")
    _check_input(value)
    elapsed = now - state.last_update
    excess = state.S - 1.0
    S = state.S + value + excess * excess * elapsed / (1.0 - excess * elapsed)
    return replace(state, S=S, last_update=now, scheduled_fire=now + time_to_fire(S, params.d))


def update(state: NeuronState, params: NeuronParams, value: float, now: float) -> NeuronState:
    """Dispatch an input to the passive or active rule."""
    if state.mode is Mode.ACTIVE:
        return active_update(state, params, value, now)
    return passive_update(state, params, value, now)


def fire(state: NeuronState, params: NeuronParams, now: float) -> tuple[NeuronState, float]:
    """Emit a spike; returns the refractory state and the unit pulse amplitude."""
    if state.mode is not Mode.ACTIVE:
        raise ValueError(f"fire on a {state.mode.value} neuron")
    if now != state.scheduled_fire:
        raise CausalityError(f"fire at t={now} but scheduled for {state.scheduled_fire}")
    out = NeuronState(S=0.0, last_update=now, mode=Mode.REFRACTORY,
                      refractory_until=now + params.t_arp)
    return out, 1.0


def is_refractory(state: NeuronState, now: float) -> bool:
    return state.mode is Mode.REFRACTORY and now < state.refractory_until


def release(state: NeuronState, now: float) -> NeuronState:
    """End the refractory period; the neuron restarts at rest."""
    if state.mode is not Mode.REFRACTORY:
        return state
    if now < state.refractory_until:
        raise CausalityError(f"release at t={now} before refractory end {state.refractory_until}")
    return NeuronState(S=0.0, last_update=state.refractory_until)


def state_at(state: NeuronState, params: NeuronParams, t: float) -> float:
    """Inner state at ``t`` without input, evaluated analytically."""
    if t < state.last_update:
        raise CausalityError(f"t={t} precedes last update t={state.last_update}")
    if state.mode is Mode.REFRACTORY:
        return 0.0
    if state.mode is Mode.ACTIVE:
        if t >= state.scheduled_fire:
            return float("inf")
        return 1.0 + 1.0 / (state.scheduled_fire - t)
    return max(0.0, state.S - params.L_d * (t - state.last_update))
