"""Analytical conditions separating the single-user and massive-MIMO regimes.

The single-user test is a sufficient condition for ``(M, K) = (2, 1)``
being EE-optimal. The massive-regime tests need ``K_max`` (the largest
user count for which computation never dominates RF plus circuit power)
and the rate threshold ``R_max = c * K_max``. Points satisfying neither
set of hypotheses are reported as indeterminate rather than guessed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import NormalizedParams, PhysicalParams, mud_normalized, normalize
from .roots import bisect_increasing
from .special import g, g_over_sqrt


class Regime(str, enum.Enum):
    NON_MASSIVE = "NonMassive"
    MASSIVE = "Massive"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Condition:
    """One inequality with both sides exposed so sweeps can interpolate crossovers."""

    lhs: float
    rhs: float
    satisfied: bool

    @property
    def margin(self) -> float:
        """``lhs - rhs``; the sign convention depends on the inequality."""
        return self.lhs - self.rhs


@dataclass(frozen=True)
class RatioParams:
    """PCPs relative to the antenna power; independent of the channel gain."""

    beta: float   # rho_d / rho_r
    delta: float  # rho_s / rho_r
    mu: float     # rho_0 / rho_r

    @classmethod
    def of(cls, theta: NormalizedParams) -> "RatioParams":
        return cls(theta.rho_d / theta.rho_r, theta.rho_s / theta.rho_r,
                   theta.rho_0 / theta.rho_r)


def pilot_witness(T: float) -> int:
    """``floor(sqrt(T))``, exact for perfect squares."""
    if float(T).is_integer():
        return math.isqrt(int(T))
    return math.floor(math.sqrt(T))


def _excess(x):
    # 2**x - 1, saturating to inf instead of raising
    return math.inf if x > 1024 else math.expm1(x * math.log(2.0))


def nonmassive_condition(R: float, theta: NormalizedParams) -> Condition:
    """Sufficient condition for the single-user design to be optimal.

    ``rho_r + 2 rho_0 >= alpha/(1+s) + alpha (1+s)/s (2^(R/(1-s/T)) - 1)``
    with ``s = floor(sqrt(T))``.
    """
    sw = pilot_witness(theta.T)
    a = theta.alpha
    if sw >= theta.T:
        rhs = math.inf
    else:
        rhs = a / (1 + sw) + a * (1 + sw) / sw * _excess(R / (1 - sw / theta.T))
    lhs = theta.rho_r + 2 * theta.rho_0
    return Condition(lhs, rhs, lhs >= rhs)


@dataclass(frozen=True)
class EEBracket:
    """Interval ``(lower, upper)`` in bits/J holding the optimal EE.

    ``valid`` is False when the single-user condition fails, in which case
    the numbers carry no guarantee.
    """

    lower: float
    upper: float
    valid: bool

    def __contains__(self, eta: float) -> bool:
        return self.lower < eta < self.upper


def nonmassive_ee_bracket(R: float, physical: PhysicalParams) -> EEBracket:
    """``((2/3) e, e)`` with ``e = R B / (2p_r + p_d + p_s + 4 C0 B + (32/3) C0 / Tc)``.

    ``e`` does not depend on the channel gain.
    """
    p = physical
    e = R * p.B / (2 * p.p_r + p.p_d + p.p_s + 4 * p.C0 * p.B + (32.0 / 3.0) * p.C0 / p.Tc)
    ok = nonmassive_condition(R, normalize(p)).satisfied
    return EEBracket(2.0 * e / 3.0, e, ok)


def nonmassive_zeta_bracket(R: float, theta: NormalizedParams) -> EEBracket:
    """The same bracket for the normalized EE ``zeta``."""
    t = theta
    e = R / (2 * t.rho_r + t.rho_d + t.rho_s + 4 * t.rho_0 + (32.0 / 3.0) * t.rho_0 / t.T)
    return EEBracket(2.0 * e / 3.0, e, nonmassive_condition(R, t).satisfied)


def k_max(theta: NormalizedParams) -> float:
    """``min(T/4, rho_r/(3 rho_0), 3 rho_d/(2 rho_0))``."""
    return min(theta.T / 4.0, theta.rho_r / (3.0 * theta.rho_0),
               1.5 * theta.rho_d / theta.rho_0)


def c_theta_target(theta: NormalizedParams, kmax: float | None = None) -> float:
    """Right-hand side ``(1+beta) sqrt(K_max rho_r / alpha)`` of the rate-threshold equation."""
    kmax = k_max(theta) if kmax is None else kmax
    beta = theta.rho_d / theta.rho_r
    return (1.0 + beta) * math.sqrt(kmax * theta.rho_r / theta.alpha)


def solve_c(target):
    """Solve ``g(c)/sqrt(c) = target``; vectorized over ``target``."""
    return bisect_increasing(g_over_sqrt, target, 1e-6, 1.0)


@dataclass(frozen=True)
class RateThreshold:
    c: float
    r_max: float


def c_theta_and_rmax(theta: NormalizedParams) -> RateThreshold:
    """The generator ``c`` and the rate threshold ``R_max = c K_max``."""
    km = k_max(theta)
    c = solve_c(c_theta_target(theta, km))
    return RateThreshold(c, c * km)


def antenna_thresholds(R, alpha, beta, delta, kmax):
    """Thresholds of the three antenna-power inequalities on ``rho_r``; array friendly.

    Returns ``(floor, headroom, multiuser)``; the conditions hold when
    ``rho_r > floor``, ``rho_r > headroom`` and ``rho_r < multiuser``.
    The headroom test is equivalent to ``R < (3/4) R_max`` and the
    multiuser test to the ideal optimum using more than one user.
    """
    R = np.asarray(R, dtype=float)
    b2 = (1.0 + beta) ** 2
    antenna_floor = alpha / (2.0 * delta)
    gq = g(4.0 * R / (3.0 * kmax))
    rate_headroom = 3.0 * alpha / (4.0 * b2 * R) * np.asarray(gq) ** 2
    multiuser = alpha * np.asarray(g(R)) ** 2 / (b2 * R)
    return antenna_floor, rate_headroom, multiuser


@dataclass(frozen=True)
class RegimeReport:
    """Every condition evaluated at one ``(R, theta)``.

    ``user_cap`` compares ``K_max`` against 10 and ``fixed_power``
    compares ``rho_s / alpha`` against 1/2 (together ``hardware_ok``).
    ``antenna_floor``, ``rate_headroom`` and ``multiuser`` compare
    ``rho_r`` (lhs) with their thresholds (rhs). ``rate_headroom_via_rmax``
    is the same test as ``rate_headroom`` routed through
    ``R < (3/4) R_max``.
    """

    R: float
    nonmassive: Condition
    user_cap: Condition
    fixed_power: Condition
    antenna_floor: Condition
    rate_headroom: Condition
    multiuser: Condition
    k_max: float
    c_theta: float
    r_max: float
    rate_headroom_via_rmax: bool
    mud_bounded: bool
    classification: Regime

    @property
    def hardware_ok(self) -> bool:
        return self.user_cap.satisfied and self.fixed_power.satisfied

    @property
    def antenna_window_ok(self) -> bool:
        return (self.antenna_floor.satisfied and self.rate_headroom.satisfied
                and self.multiuser.satisfied)


def mud_bounded_by_rf(theta: NormalizedParams, m_samples=(1, 2, 10, 100, 10_000)) -> bool:
    """Check ``p_mud <= M rho_r + K rho_d`` for every integer ``K <= K_max``.

    ``M`` ranges over ``K + m`` for ``m`` in ``m_samples``.
    """
    kf = math.floor(k_max(theta))
    if kf < 1:
        return True
    K = np.arange(1, kf + 1, dtype=float)[:, None]
    M = K + np.asarray(m_samples, dtype=float)[None, :]
    return bool(np.all(mud_normalized(M, K, theta) <= M * theta.rho_r + K * theta.rho_d))


def check_conditions(R: float, theta: NormalizedParams) -> RegimeReport:
    """Evaluate the single-user, hardware and antenna-power conditions and classify."""
    nm = nonmassive_condition(R, theta)
    km = k_max(theta)
    thr = c_theta_and_rmax(theta)
    rat = RatioParams.of(theta)
    user_cap = Condition(km, 10.0, km > 10.0)
    fixed_ratio = theta.rho_s / theta.alpha
    fixed_power = Condition(fixed_ratio, 0.5, fixed_ratio > 0.5)
    floor_thr, headroom_thr, multiuser_thr = (
        float(v) for v in antenna_thresholds(R, theta.alpha, rat.beta, rat.delta, km))
    rr = theta.rho_r
    antenna_floor = Condition(rr, floor_thr, rr > floor_thr)
    rate_headroom = Condition(rr, headroom_thr, rr > headroom_thr)
    multiuser = Condition(rr, multiuser_thr, rr < multiuser_thr)
    if nm.satisfied:
        cls = Regime.NON_MASSIVE
    elif (user_cap.satisfied and fixed_power.satisfied and rate_headroom.satisfied
          and multiuser.satisfied):
        cls = Regime.MASSIVE
    else:
        cls = Regime.INDETERMINATE
    return RegimeReport(
        R=R, nonmassive=nm, user_cap=user_cap, fixed_power=fixed_power,
        antenna_floor=antenna_floor, rate_headroom=rate_headroom, multiuser=multiuser, k_max=km,
        c_theta=thr.c, r_max=thr.r_max, rate_headroom_via_rmax=bool(R < 0.75 * thr.r_max),
        mud_bounded=mud_bounded_by_rf(theta), classification=cls,
    )


def classify(R: float, theta: NormalizedParams) -> Regime:
    return check_conditions(R, theta).classification
