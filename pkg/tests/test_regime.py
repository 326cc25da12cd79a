import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import N0, physical, theta
from oracles import bisect_scalar, g_ref
from zfee.core import NormalizedParams, mud_power, normalize
from zfee.optimizer import optimize_integer
from zfee.regime import (
    Regime, c_theta_and_rmax, c_theta_target, check_conditions, classify, antenna_thresholds, k_max,
    mud_bounded_by_rf, nonmassive_condition, nonmassive_ee_bracket, nonmassive_zeta_bracket,
    pilot_witness, solve_c,
)
from zfee.special import g


def _crossover_db(R=8.0, **kw):
    # the left side is linear in the gain and the right side does not depend on it
    c = nonmassive_condition(R, theta(-100.0, **kw))
    return -100.0 + 10 * math.log10(c.rhs / c.lhs)


def test_witness_pilot_length():
    assert pilot_witness(400.0) == 20
    assert pilot_witness(399.999) == 19
    assert pilot_witness(2.0) == 1
    assert pilot_witness(10 ** 12 + 0.0) == 10 ** 6


def test_nonmassive_crossover_gain():
    assert _crossover_db() == pytest.approx(-102.600, abs=1e-3)
    assert nonmassive_condition(8, theta(-102.5)).satisfied
    assert not nonmassive_condition(8, theta(-102.7)).satisfied


def test_nonmassive_crossover_antenna_power():
    # fixed ratios p_d = p_r, p_s = 10 p_r, C0 B = 0.02 p_r at -100 dB
    def cond(p_r):
        return nonmassive_condition(8, theta(-100.0, p_r=p_r, p_d=p_r, p_s=10 * p_r, C0=0.02 * p_r / 2e5))
    c = cond(1e-3)
    p_star = 1e-3 * c.rhs / c.lhs
    assert p_star == pytest.approx(5.5e-3, rel=0.01)
    assert cond(p_star * 1.001).satisfied and not cond(p_star * 0.999).satisfied


def test_nonmassive_low_rate_limit():
    th = theta(-100.0)
    assert nonmassive_condition(1e-12, th).rhs == pytest.approx(2 / 21, rel=1e-9)


def test_bracket_value_and_gain_independence():
    brs = [nonmassive_ee_bracket(8, physical(gc)) for gc in (-80.0, -95.0, -130.0)]
    assert brs[0].upper == pytest.approx(8 * 2e5 / (0.02 + 0.01 + 0.1 + 8e-4 + 32 / 3 * 5e-7), rel=1e-12)
    assert brs[0].upper == pytest.approx(1.223e7, rel=1e-3)
    assert all(b.upper == brs[0].upper and b.lower == brs[0].lower for b in brs)
    assert brs[0].valid and not brs[2].valid


def test_bracket_holds_at_minus_90_db():
    p = physical(-90.0)
    opt = optimize_integer(8, normalize(p), physical=p)
    assert opt.eta in nonmassive_ee_bracket(8, p)


def test_zeta_bracket_matches_physical():
    p = physical(-93.0)
    zb, eb = nonmassive_zeta_bracket(8, normalize(p)), nonmassive_ee_bracket(8, p)
    assert zb.upper * p.Gc / N0 == pytest.approx(eb.upper, rel=1e-12)


def test_k_max_values():
    assert k_max(theta(-100.0, p_r=0.1, p_d=0.1, p_s=0.1)) == 100.0
    assert k_max(theta(-100.0)) == pytest.approx(16.6667, rel=1e-5)
    assert k_max(theta(-100.0, C0=1e-30)) == 100.0


def test_footnote_fixed_power_ratio():
    r = check_conditions(8, theta(-120.0, alpha=20.0))
    assert r.fixed_power.lhs == pytest.approx(6.28, abs=0.005)
    assert r.fixed_power.satisfied


def test_d_window_edges():
    r = check_conditions(8, theta(-120.0))
    lower = max(r.antenna_floor.rhs, r.rate_headroom.rhs)
    assert lower == pytest.approx(0.1, rel=1e-9)
    assert r.multiuser.rhs == pytest.approx(2.66e3, rel=0.01)
    unit = N0 * 2e5 / 0.01
    assert 10 * math.log10(lower * unit) == pytest.approx(-141, abs=0.5)
    assert 10 * math.log10(r.multiuser.rhs * unit) == pytest.approx(-97, abs=0.5)


def test_mud_bounded_reference_constants():
    p = physical(p_r=0.1, p_d=0.1, p_s=0.1)
    for M in (21, 100, 10_000):
        assert mud_power(M, 20, p).total <= M * p.p_r + 20 * p.p_d
    assert mud_bounded_by_rf(normalize(p))


def test_c_theta_matches_oracle():
    th = theta(-120.0)
    thr = c_theta_and_rmax(th)
    target = c_theta_target(th)
    ref = bisect_scalar(lambda x: g_ref(x) / math.sqrt(x), target, 1e-6, 1.0)
    assert thr.c == pytest.approx(ref, rel=1e-12)
    assert abs(g(thr.c) / math.sqrt(thr.c) - target) <= 1e-10 * target
    assert thr.r_max == thr.c * k_max(th)
    rep = check_conditions(8, th)
    assert rep.rate_headroom.satisfied == rep.rate_headroom_via_rmax


def test_c_theta_grows_with_antenna_power():
    cs = [c_theta_and_rmax(theta(gc)).c for gc in (-140.0, -130.0, -120.0, -110.0)]
    assert all(a < b for a, b in zip(cs, cs[1:]))


def test_c_theta_unit_fixed_point():
    # K_max = T/4 = 10, beta = 1, and rho_r chosen so the target is g(1)
    rho_r = 2.0 * g(1.0) ** 2 / 40.0
    th = NormalizedParams(2.0, rho_r, rho_r, 1.0, rho_r / 1e3, 40.0)
    assert k_max(th) == 10.0
    assert c_theta_target(th) == pytest.approx(g(1.0), rel=1e-15)
    assert c_theta_and_rmax(th).c == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("gc,expected", [(-90.0, Regime.NON_MASSIVE), (-120.0, Regime.MASSIVE),
                                         (-150.0, Regime.INDETERMINATE)])
def test_classification(gc, expected):
    assert classify(8, theta(gc)) is expected
    assert str(expected) in ("NonMassive", "Massive", "Indeterminate")


def test_single_user_takes_precedence_in_overlap():
    # between the single-user crossover (-102.6 dB) and the multiuser edge (-96.7 dB) both hold
    rep = check_conditions(8, theta(-99.0))
    assert rep.nonmassive.satisfied and rep.multiuser.satisfied and rep.hardware_ok
    assert rep.classification is Regime.NON_MASSIVE


@st.composite
def single_user_cases(draw):
    T = float(draw(st.integers(4, 2000)))
    R = draw(st.floats(0.1, 6.0))
    alpha = draw(st.floats(1.1, 20.0))
    frac = draw(st.floats(0.0, 1.0))
    th = NormalizedParams(alpha, 1.0, draw(st.floats(1e-3, 1e4)), draw(st.floats(1e-3, 1e5)),
                          1e-6, T)
    need = nonmassive_condition(R, th).rhs * (1 + 1e-9)
    if not math.isfinite(need) or need > 1e12:
        need = 1e6
    # split the required left side between the antenna and computation terms
    rho_0 = frac * need / 2.0
    rho_r = need - 2.0 * rho_0 + 1e-9
    return R, th.replace(rho_r=rho_r, rho_0=max(rho_0, 1e-9))


@settings(max_examples=40, deadline=None)
@given(single_user_cases())
def test_single_user_optimal_when_condition_holds(case):
    R, th = case
    if not nonmassive_condition(R, th).satisfied:
        return
    opt = optimize_integer(R, th)
    assert (opt.design.M, opt.design.K) == (2, 1)
    assert opt.zeta in nonmassive_zeta_bracket(R, th)


def test_rate_threshold_equivalence_vectorized():
    rng = np.random.default_rng(3)
    n = 5000
    kmax = rng.uniform(10.5, 500, n)
    rho_r = 10 ** rng.uniform(-2, 4, n)
    beta = 10 ** rng.uniform(-2, 2, n)
    R = 10 ** rng.uniform(-1, 2.5, n)
    _, rate_headroom, _ = antenna_thresholds(R, 2.0, beta, 1.0, kmax)
    c = solve_c((1 + beta) * np.sqrt(kmax * rho_r / 2.0))
    assert np.array_equal(rho_r > rate_headroom, R < 0.75 * c * kmax)
