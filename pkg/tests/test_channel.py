import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavasym.channel import (
    SPEED_OF_LIGHT,
    LinkBudget,
    LosEnvParams,
    los_probability_breakpoint,
    los_probability_exact,
    path_gain,
    sample_fading,
)
from uavasym.config import SystemConfig

ENV = LosEnvParams()


def test_exact_empty_product_is_one():
    # m = floor(r*sqrt(delta*beta) - 1) < 0 for r below ~81.6 m
    assert los_probability_exact(60.0, 50.0, ENV) == 1.0
    assert los_probability_exact(60.0, 0.0, ENV) == 1.0


def test_exact_in_unit_interval_and_non_increasing():
    assert 0.0 < los_probability_exact(60.0, 500.0, ENV) < 1.0
    r = np.linspace(0, 2000, 401)
    p = np.array([los_probability_exact(60.0, x, ENV) for x in r])
    assert np.all((p >= 0) & (p <= 1))
    assert np.all(np.diff(p) <= 1e-15)


def test_exact_tends_to_one_at_high_altitude():
    assert los_probability_exact(1e6, 500.0, ENV) == pytest.approx(1.0, abs=1e-9)


def test_exact_hand_evaluation():
    # r = 100 gives m = 0: single factor with height h/2
    h = 60.0
    expected = 1 - math.exp(-((h / 2) ** 2) / (2 * 15.0**2))
    assert los_probability_exact(h, 100.0, ENV) == pytest.approx(expected, rel=1e-14)


def test_exact_rejects_bad_altitude():
    with pytest.raises(ValueError):
        los_probability_exact(0.0, 10.0, ENV)


def test_breakpoint_examples():
    h = 60.0
    assert los_probability_breakpoint(1.38 * h, h, ENV) == 1.0
    assert los_probability_breakpoint(50.0, h, ENV) == 1.0
    assert los_probability_breakpoint(165.6, h, ENV) == pytest.approx(0.422105498392165494, rel=1e-13)
    with pytest.raises(ValueError):
        los_probability_breakpoint(10.0, h, ENV, R0=20.0)


@given(h=st.floats(1, 500), R1=st.floats(1, 5000), R2=st.floats(1, 5000))
def test_breakpoint_monotone_in_distance(h, R1, R2):
    lo, hi = sorted((R1, R2))
    assert los_probability_breakpoint(hi, h, ENV) <= los_probability_breakpoint(lo, h, ENV)


@given(R=st.floats(1, 5000), h1=st.floats(1, 500), h2=st.floats(1, 500))
def test_breakpoint_non_decreasing_in_altitude(R, h1, h2):
    lo, hi = sorted((h1, h2))
    assert los_probability_breakpoint(R, hi, ENV) >= los_probability_breakpoint(R, lo, ENV) - 1e-15


@pytest.mark.parametrize("h", [30.0, 60.0, 120.0])
def test_breakpoint_shape_against_exact(h):
    """Coarse shape agreement of the two LoS models over [R0, 10*kappa*h].

    With the ITU-R urban defaults the exact curve first falls below 0.5 at
    about 2.1x the break-point distance, just outside the factor-2 band.
    """
    R0 = math.hypot(h, 20.0)
    R = np.linspace(R0, 10 * ENV.kappa_fit * h, 4000)
    exact = np.array([los_probability_exact(h, math.sqrt(x * x - h * h), ENV) for x in R])
    approx = los_probability_breakpoint(R, h, ENV)
    assert np.all(np.diff(exact) <= 1e-15) and np.all(np.diff(approx) <= 1e-15)
    first_below_half = R[np.argmax(exact < 0.5)]
    ratio = first_below_half / (ENV.kappa_fit * h)
    assert 0.5 <= ratio <= 2.0, f"exact drops below 0.5 at {ratio:.3f} x kappa*h"


def _unit_budget(**kw):
    return LinkBudget(p_tx=1.0, g_tx=1.0, g_rx=1.0, freq=3.5e9, **kw)


def test_path_gain_unit_kernel_and_scaling():
    b = _unit_budget()
    kernel = SPEED_OF_LIGHT**2 / ((4 * math.pi) ** 2 * 3.5e9**2)
    assert path_gain(1.0, 2.0, b) == pytest.approx(kernel, rel=1e-15)
    assert path_gain(20.0, 2.0, b) == pytest.approx(path_gain(10.0, 2.0, b) / 4, rel=1e-15)
    with pytest.raises(ValueError):
        path_gain(0.0, 2.0, b)


def test_path_gain_matches_db_budget(defaults):
    g = path_gain(100.0, 3.0, defaults.ul_budget)
    assert g == pytest.approx(defaults.beta_ul / (2 * math.pi) * 100.0**-3, rel=1e-14)
    # 20 dBm + 3 dBi + 6 dBi - FSPL(1 m) - 30*log10(100), evaluated in dB with mpmath
    assert g == pytest.approx(3.69050322443193356e-11, rel=1e-12)


@given(R=st.floats(0.1, 1e5), eta=st.sampled_from([2.0, 2.5, 3.0, 4.0]))
def test_path_gain_times_r_eta_constant(R, eta):
    b = _unit_budget()
    assert path_gain(R, eta, b) * R**eta == pytest.approx(b.kernel, rel=1e-12)


def test_link_budget_exponent_constraints():
    with pytest.raises(ValueError):
        _unit_budget(eta_los_ul=2.5)
    with pytest.raises(ValueError):
        _unit_budget(eta_nlos_dl=2.0)


def test_fading_moments():
    rng = np.random.default_rng(5)
    h = sample_fading(rng, 1_000_000)
    n = h.size
    assert abs(h.mean() - 1) <= 3 * h.std(ddof=1) / math.sqrt(n)
    h2 = h * h
    assert abs(h2.mean() - 2) <= 3 * h2.std(ddof=1) / math.sqrt(n)
    below = (h <= math.log(2)).astype(float)
    assert abs(below.mean() - 0.5) <= 3 * below.std(ddof=1) / math.sqrt(n)


def test_config_gains_are_linear(defaults):
    assert defaults.ul_budget.g_tx == pytest.approx(10**0.3)
    assert defaults.ul_budget.g_rx == pytest.approx(10**0.6)
    assert isinstance(defaults, SystemConfig)
