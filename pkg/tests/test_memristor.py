"""Device model tests.

Reference numbers below were produced by a standalone scalar implementation
of the device equations (plain ``math``, no package code) and, for pulses,
by scipy's DOP853 at rtol 1e-12.  They are frozen here as literals.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liflsim.memristor import (DEFAULT_PARAMS, Constant, MemristorParams, MemristorState,
                               PiecewiseConstant, Pulse, Sine, current, drift_f, integrate,
                               normalized_weight, read_conductance, state_rate, threshold_g,
                               trajectory, write_asymmetry)

P = DEFAULT_PARAMS

# frozen reference values
G_AT_0_3 = 705.3917463367716        # threshold_g(0.3)
RATE_0_5_AT_0_3 = 412.5185112094983  # state_rate(0.5, 0.3)
I_X1_V0_1 = 0.000850003541671094    # current(1, 0.1)
PULSES = [  # (x0, V, width ms, x1 from the fine reference)
    (0.3, 0.4, 1.0, 1.0),
    (0.35, 0.3, 5e-4, 0.5746625387817912),
    (0.6, -0.3, 5e-4, 0.3485078340696403),
    (0.2, 0.25, 2e-3, 0.7096542940202684),
    (0.82, -0.29, 5e-4, 0.47345467529518803),
    (0.35, -0.2, 0.01, 0.11863850451412047),
]


def test_table_defaults():
    assert (P.Ap, P.An, P.xp, P.xn, P.alpha_p, P.alpha_n) == (4000, 4000, 0.3, 0.5, 1, 5)
    assert (P.a1, P.a2, P.b, P.Vp, P.Vn, P.eta) == (0.17, 0.17, 0.05, 0.16, 0.15, 1)


@pytest.mark.parametrize("kw", [{"Vp": 0}, {"Vn": -0.15}, {"xp": 1.0}, {"xn": 0.0},
                                {"Ap": 0}, {"An": -1}, {"eta": 0}])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        MemristorParams(**kw)


def test_state_bounds_validated():
    with pytest.raises(ValueError):
        MemristorState(1.01)
    with pytest.raises(ValueError):
        MemristorState(-0.01)


# -- current --------------------------------------------------------------------

def test_current_pinched_and_proportional():
    assert current(0.7, 0.0) == 0.0
    assert current(0.0, 0.3) == 0.0
    assert current(1.0, 0.1) == pytest.approx(I_X1_V0_1, rel=1e-14)
    assert current(0.5, -0.2) == pytest.approx(-0.5 * 0.17 * math.sinh(0.01), rel=1e-14)


def test_current_vectorized_uses_branch_amplitudes():
    p = MemristorParams(a1=0.2, a2=0.1)
    out = current(np.array([1.0, 1.0]), np.array([0.1, -0.1]), p)
    assert out[0] == pytest.approx(0.2 * math.sinh(0.005))
    assert out[1] == pytest.approx(-0.1 * math.sinh(0.005))


# -- threshold and drift --------------------------------------------------------

def test_threshold_function():
    assert threshold_g(0.1) == 0.0
    assert threshold_g(P.Vp) == 0.0
    assert threshold_g(-P.Vn) == 0.0
    assert threshold_g(0.3) == pytest.approx(G_AT_0_3, rel=1e-13)
    assert threshold_g(-0.3) == pytest.approx(-4000 * (math.exp(0.3) - math.exp(0.15)), rel=1e-13)


@given(st.floats(-0.15, 0.16))
def test_threshold_zero_band(V):
    assert threshold_g(V) == 0.0


def test_drift_function_boundaries():
    assert drift_f(P.xp, P, increasing=True) == 1.0
    assert drift_f(0.1, P, increasing=True) == 1.0
    assert drift_f(1.0, P, increasing=True) == 0.0
    assert drift_f(0.0, P, increasing=False) == 0.0
    assert drift_f(0.8, P, increasing=False) == 1.0
    # the decreasing branch meets its linear region continuously at 1 - xn
    assert drift_f(1 - P.xn, P, increasing=False) == pytest.approx(1.0)


def test_state_rate():
    assert state_rate(0.5, 0.1) == 0.0
    assert state_rate(1.0, 0.4) == 0.0
    assert state_rate(0.0, -0.4) == 0.0
    assert state_rate(0.5, 0.3) == pytest.approx(RATE_0_5_AT_0_3, rel=1e-13)


def test_eta_flips_direction():
    flipped = MemristorParams(eta=-1)
    assert state_rate(0.5, 0.3, flipped) < 0
    assert state_rate(0.5, -0.3, flipped) > 0


# -- integration ------------------------------------------------------------------

def test_zero_and_subthreshold_waveforms_leave_state():
    for wave in (Constant(0.0), Sine(0.15, 7.0), Constant(0.16), Constant(-0.15)):
        assert integrate(MemristorState(0.37), wave, 0.0, 50.0).x == 0.37


@pytest.mark.parametrize("x0, V, width, expected", PULSES)
def test_pulse_matches_reference(x0, V, width, expected):
    got = integrate(MemristorState(x0), Pulse(V, width), 0.0, width, dt_max=width / 5).x
    assert abs(got - expected) <= 1e-6


def test_integrate_validation():
    with pytest.raises(ValueError, match="precedes"):
        integrate(MemristorState(0.5), Constant(0.0), 1.0, 0.0)
    with pytest.raises(ValueError, match="dt_max"):
        integrate(MemristorState(0.5), Constant(0.0), 0.0, 1.0, dt_max=0)
    with pytest.raises(ValueError, match="non-finite"):
        integrate(MemristorState(0.5), lambda t: float("nan"), 0.0, 1.0)


def test_breakpoints_are_respected():
    # a pulse shorter than dt_max must not leak past its end
    wave = PiecewiseConstant([0.0, 1e-4, 5.0], [0.3, 0.0, 0.3])
    assert wave.breakpoints(0.0, 10.0) == [1e-4, 5.0]
    x_short = integrate(MemristorState(0.35), wave, 0.0, 4.0, dt_max=1.0).x
    x_pulse = integrate(MemristorState(0.35), Pulse(0.3, 1e-4), 0.0, 1e-4, dt_max=1e-5).x
    assert x_short == pytest.approx(x_pulse, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-0.6, 0.6), st.floats(1e-4, 0.05), st.floats(1e-5, 0.05))
def test_state_bounded_and_monotone(x0, V, width, dt_max):
    x1 = integrate(MemristorState(x0), Pulse(V, width), 0.0, width, dt_max=dt_max).x
    assert 0.0 <= x1 <= 1.0
    if V > P.Vp:
        assert x1 >= x0
    elif V < -P.Vn:
        assert x1 <= x0
    else:
        assert x1 == x0


def test_trajectory_matches_stepwise_integration():
    wave = Sine(0.3, 10.0)
    times = np.linspace(0, 20, 41)
    xs = trajectory(MemristorState(0.5), wave, times, dt_max=0.01)
    assert xs[0] == 0.5
    assert xs[-1] == pytest.approx(integrate(MemristorState(0.5), wave, 0, 20, dt_max=0.01).x, abs=1e-6)


# -- readout ---------------------------------------------------------------------

def test_read_conductance():
    assert read_conductance(MemristorState(0.0)) == 0.0
    assert read_conductance(MemristorState(1.0)) == pytest.approx(I_X1_V0_1 / 0.1, rel=1e-14)
    g1 = read_conductance(MemristorState(1.0))
    for x in (0.1, 0.37, 0.9):
        assert read_conductance(MemristorState(x)) == pytest.approx(x * g1, rel=1e-14)
    with pytest.raises(ValueError, match="nondestructive"):
        read_conductance(MemristorState(0.5), V_read=0.2)
    with pytest.raises(ValueError, match="nondestructive"):
        read_conductance(MemristorState(0.5), V_read=0.0)


@given(st.floats(0.0, 1.0))
def test_normalized_weight_equals_state(x):
    assert normalized_weight(MemristorState(x)) == pytest.approx(x, abs=1e-12)


def test_write_asymmetry_is_measured():
    up, down = write_asymmetry(amplitude=0.3, width=5e-4)
    assert up > 0 > down
    assert abs(up) != pytest.approx(abs(down), rel=1e-3)
