import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liflsim.neuron import (CausalityError, Mode, NeuronParams, NeuronState, active_update, fire,
                            is_refractory, passive_update, release, state_at, time_to_fire, update)


def test_params_validation():
    with pytest.raises(ValueError, match="d must be"):
        NeuronParams(d=0.0)
    with pytest.raises(ValueError, match="L_d"):
        NeuronParams(L_d=-0.1)
    with pytest.raises(ValueError, match="t_arp"):
        NeuronParams(t_arp=-1)
    p = NeuronParams()
    assert p.s_th == 1.04 and p.t_f_max == 25.0


# -- time to fire -----------------------------------------------------------

@pytest.mark.parametrize("S, expected", [(1.2, 5.0), (2.0, 1.0)])
def test_time_to_fire_values(S, expected):
    assert time_to_fire(S, 0.04) == pytest.approx(expected, rel=1e-15)


def test_time_to_fire_at_threshold_is_exactly_one_over_d():
    for d in (0.04, 0.1, 0.3, 0.07):
        assert time_to_fire(1.0 + d, d) == 1.0 / d


def test_time_to_fire_rejects_bad_states():
    with pytest.raises(ValueError, match="undefined"):
        time_to_fire(1.0)
    with pytest.raises(ValueError, match="undefined"):
        time_to_fire(0.5)
    with pytest.raises(ValueError, match="below threshold"):
        time_to_fire(1.02, 0.04)


@given(st.floats(1.04, 50.0), st.floats(1e-6, 5.0))
def test_time_to_fire_positive_and_decreasing(S, bump):
    a, b = time_to_fire(S, 0.04), time_to_fire(S + bump, 0.04)
    assert a > 0 and b > 0
    assert b < a


# -- passive mode -----------------------------------------------------------

def test_passive_decay():
    s = passive_update(NeuronState(S=0.5), NeuronParams(L_d=0.01), 0.0, 10.0)
    assert s.S == pytest.approx(0.4, abs=1e-15)
    assert s.mode is Mode.PASSIVE and s.scheduled_fire is None and s.last_update == 10.0


def test_passive_clamps_at_rest():
    s = passive_update(NeuronState(S=0.2), NeuronParams(L_d=0.05), 0.0, 100.0)
    assert s.S == 0.0


def test_passive_decay_happens_before_input():
    # a clamped state plus input gives the input, not input minus the overshoot
    s = passive_update(NeuronState(S=0.2), NeuronParams(L_d=0.05), 0.3, 100.0)
    assert s.S == pytest.approx(0.3, abs=1e-15)


def test_passive_crossing_schedules_fire():
    s = passive_update(NeuronState(S=0.9, last_update=3.0), NeuronParams(L_d=0.0), 0.3, 7.0)
    assert s.mode is Mode.ACTIVE
    assert s.S == pytest.approx(1.2, abs=1e-15)
    assert s.scheduled_fire == pytest.approx(7.0 + 1.0 / (1.2 - 1.0), abs=1e-12)


@given(st.floats(0, 1.03), st.floats(0, 1e4))
def test_perfect_integrator_holds_state(S, dt):
    s = passive_update(NeuronState(S=S), NeuronParams(L_d=0.0), 0.0, dt)
    assert s.S == S


def test_passive_rejects_causality_and_negative_input():
    with pytest.raises(CausalityError):
        passive_update(NeuronState(S=0.1, last_update=5.0), NeuronParams(), 0.0, 4.0)
    with pytest.raises(ValueError, match="nonnegative"):
        passive_update(NeuronState(), NeuronParams(), -0.1, 1.0)


def test_two_inputs_reach_threshold_and_fire_five_ms_later():
    p = NeuronParams(L_d=0.0)
    s = passive_update(NeuronState(), p, 0.6, 1.0)
    assert s.mode is Mode.PASSIVE
    s = passive_update(s, p, 0.6, 4.0)
    assert s.mode is Mode.ACTIVE
    assert s.scheduled_fire - 4.0 == pytest.approx(5.0, rel=1e-12)


# -- active mode ------------------------------------------------------------

def _active(S, t=0.0, d=0.04):
    return NeuronState(S=S, last_update=t, mode=Mode.ACTIVE, scheduled_fire=t + time_to_fire(S, d))


def test_active_update_doubling_example():
    s = active_update(_active(1.5), NeuronParams(), 0.0, 1.0)
    assert s.S == pytest.approx(2.0, rel=1e-15)
    assert s.scheduled_fire - 1.0 == pytest.approx(1.0, rel=1e-12)


def test_active_update_zero_elapsed_identity():
    s0 = _active(1.04)
    s = active_update(s0, NeuronParams(), 0.0, 0.0)
    assert s.S == s0.S


def test_active_update_with_input():
    # 1.2 + 0.1 + 0.04*2/(1 - 0.4)
    s = active_update(_active(1.2), NeuronParams(), 0.1, 2.0)
    assert s.S == pytest.approx(1.4333333333333333, abs=1e-12)
    assert s.scheduled_fire - 2.0 == pytest.approx(2.3076923076923075, abs=1e-12)
    assert s.scheduled_fire < _active(1.2).scheduled_fire


@settings(max_examples=300)
@given(st.floats(1.04, 20.0), st.floats(0.0, 1.0))
def test_zero_input_keeps_fire_time(S, frac):
    s0 = _active(S, t=10.0)
    now = 10.0 + frac * 0.999 * (s0.scheduled_fire - 10.0)
    s = active_update(s0, NeuronParams(), 0.0, now)
    assert abs(s.scheduled_fire - s0.scheduled_fire) <= 1e-9


def test_active_update_rejects_at_or_after_fire():
    s0 = _active(1.2)
    with pytest.raises(CausalityError):
        active_update(s0, NeuronParams(), 0.1, s0.scheduled_fire)
    with pytest.raises(ValueError, match="passive"):
        active_update(NeuronState(), NeuronParams(), 0.1, 1.0)


def test_update_dispatches_by_mode():
    assert update(NeuronState(), NeuronParams(), 0.3, 1.0).S == 0.3
    assert update(_active(1.5), NeuronParams(), 0.0, 1.0).S == pytest.approx(2.0)


# -- firing and refractoriness ------------------------------------------------

def test_fire_resets_and_starts_refractory():
    p = NeuronParams(t_arp=3.0)
    s0 = _active(1.1, t=0.0)
    s, amp = fire(s0, p, s0.scheduled_fire)
    assert amp == 1.0
    assert s.S == 0.0 and s.mode is Mode.REFRACTORY and s.scheduled_fire is None
    assert s.refractory_until == s0.scheduled_fire + 3.0


def test_refractory_window_is_half_open():
    p = NeuronParams(t_arp=3.0)
    s, _ = fire(NeuronState(S=2.0, last_update=9.0, mode=Mode.ACTIVE, scheduled_fire=10.0), p, 10.0)
    assert is_refractory(s, 10.0) and is_refractory(s, 12.999)
    assert not is_refractory(s, 13.0)
    with pytest.raises(CausalityError):
        release(s, 12.5)
    r = release(s, 13.0)
    assert r.mode is Mode.PASSIVE and r.S == 0.0 and r.last_update == 13.0


def test_fire_preconditions():
    with pytest.raises(ValueError):
        fire(NeuronState(), NeuronParams(), 1.0)
    with pytest.raises(CausalityError):
        fire(_active(1.2), NeuronParams(), 1.0)


def test_state_at():
    p = NeuronParams(L_d=0.01)
    assert state_at(NeuronState(S=0.5), p, 10.0) == pytest.approx(0.4)
    a = _active(1.5)
    assert state_at(a, p, 1.0) == pytest.approx(2.0)
    assert math.isinf(state_at(a, p, a.scheduled_fire))
    with pytest.raises(CausalityError):
        state_at(NeuronState(last_update=2.0), p, 1.0)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(0, 30), st.floats(0, 0.9)), min_size=1, max_size=20),
       st.floats(0, 0.1))
def test_state_never_negative(steps, L_d):
    p = NeuronParams(L_d=L_d)
    s, t = NeuronState(), 0.0
    for gap, value in steps:
        t += gap
        if s.mode is Mode.ACTIVE:
            if t >= s.scheduled_fire:
                s, _ = fire(s, p, s.scheduled_fire)
        if s.mode is Mode.REFRACTORY:
            if t < s.refractory_until:
                continue
            s = release(s, t)
        s = update(s, p, value, t)
        assert s.S >= 0
        assert (s.mode is Mode.ACTIVE) == (s.S >= p.s_th)
