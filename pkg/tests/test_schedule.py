import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opentag.errors import ConfigError
from opentag.numerics import LrSchedule, lr_at


def sgdr_closed_form(eta_min, eta_max, t_cur, t_i):
    return eta_min + 0.5 * (eta_max - eta_min) * (1 + math.cos(math.pi * t_cur / t_i))


def test_initial_rate_is_eta_max():
    s = LrSchedule(eta_max=1e-3, t0=100)
    assert lr_at(s, 0) == 1e-3


def test_midpoint_is_half():
    s = LrSchedule(eta_max=2.0, t0=100, eta_min=0.0)
    assert abs(lr_at(s, 50) - 1.0) < 1e-12


def test_restart_resets_to_eta_max():
    s = LrSchedule(eta_max=1e-3, t0=100, t_mult=1.0)
    assert abs(lr_at(s, 100) - 1e-3) < 1e-15
    assert abs(lr_at(s, 200) - 1e-3) < 1e-15


@pytest.mark.parametrize("step,t_cur", [(0, 0), (25, 25), (50, 50), (99, 99), (100, 0), (200, 0)])
def test_closed_form_within_first_cycles(step, t_cur):
    s = LrSchedule(eta_max=1e-3, t0=100, eta_min=1e-5)
    assert abs(lr_at(s, step) - sgdr_closed_form(1e-5, 1e-3, t_cur, 100)) < 1e-9


def test_growing_cycles_with_t_mult():
    s = LrSchedule(eta_max=1.0, t0=10, t_mult=2.0)
    # cycles: [0,10), [10,30), [30,70)
    assert abs(lr_at(s, 10) - 1.0) < 1e-12
    assert abs(lr_at(s, 30) - 1.0) < 1e-12
    assert abs(lr_at(s, 20) - sgdr_closed_form(0.0, 1.0, 10, 20)) < 1e-12


def test_zero_t0_rejected():
    with pytest.raises(ConfigError):
        LrSchedule(eta_max=1e-3, t0=0)


def test_negative_step_rejected():
    with pytest.raises(ConfigError):
        lr_at(LrSchedule(eta_max=1e-3, t0=100), -1)


@settings(max_examples=200, deadline=None)
@given(
    step=st.integers(0, 5000),
    t0=st.integers(1, 300),
    t_mult=st.sampled_from([1.0, 1.5, 2.0]),
)
def test_rate_stays_within_bounds(step, t0, t_mult):
    s = LrSchedule(eta_max=3e-3, t0=t0, eta_min=1e-6, t_mult=t_mult)
    lr = lr_at(s, step)
    assert 1e-6 - 1e-15 <= lr <= 3e-3 + 1e-15
