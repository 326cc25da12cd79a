"""Parameter types and the closed-form physics of the ZF uplink.

Everything here is a pure function of its arguments. Functions that take
``M, K, tau`` accept scalars or broadcastable numpy arrays; scalar inputs
return Python floats.

Units: physical quantities are SI (W, J, Hz, s). The normalized
quantities divide every power by ``N0 * B / Gc`` so that the per-user
transmit SNR ``gamma_u`` and the normalized power consumption parameters
(PCPs) live on the same scale.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

LN2 = math.log(2.0)

#: Noise PSD used throughout the reference scenarios (-204 dBW/Hz).
N0_REFERENCE = 10.0 ** -20.4

#: Largest admissible per-user rate exponent ``R / (K (1 - tau/T))``.
MAX_EXPONENT = 1024.0

_INT_SNAP_RTOL = 1e-12


class DomainError(ValueError):
    """An input lies outside the domain where the model is defined."""


def db_to_linear(db):
    """Power ratio from decibels, ``10 ** (db / 10)``."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0) if np.ndim(db) else 10.0 ** (db / 10.0)


def linear_to_db(x):
    """Decibels from a power ratio, ``10 log10(x)``."""
    return 10.0 * np.log10(x) if np.ndim(x) else 10.0 * math.log10(x)


def _positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def _snap_integer(x):
    r = round(x)
    return float(r) if r > 0 and abs(x - r) <= _INT_SNAP_RTOL * abs(x) else x


@dataclass(frozen=True)
class PhysicalParams:
    """Unnormalized hardware and channel constants.

    Attributes
    ----------
    N0 : float
        Noise power spectral density (W/Hz).
    B : float
        Bandwidth (Hz).
    Tc : float
        Coherence time (s).
    Gc : float
        Linear channel power gain (geometric attenuation and shadowing).
    alpha : float
        PA inefficiency, consumed over radiated power (> 1).
    p_r : float
        Power per BS receive antenna chain (W).
    p_d : float
        Per-user transmitter circuit plus decoder power ``p_t + p_dec`` (W).
    p_s : float
        Fixed overhead power (W).
    C0 : float
        Energy per complex operation (J).
    """

    N0: float
    B: float
    Tc: float
    Gc: float
    alpha: float
    p_r: float
    p_d: float
    p_s: float
    C0: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _positive(f.name, getattr(self, f.name))
        if self.alpha <= 1:
            raise DomainError(f"alpha must exceed 1, got {self.alpha!r}")
        if self.B * self.Tc <= 1:
            raise DomainError("B * Tc must exceed one channel use")

    @property
    def T(self) -> float:
        """Channel uses per coherence interval, ``B * Tc``."""
        return _snap_integer(self.B * self.Tc)

    @property
    def Gc_dB(self) -> float:
        return linear_to_db(self.Gc)

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class NormalizedParams:
    """The tuple ``(alpha, rho_r, rho_d, rho_s, rho_0, T)`` driving the analysis."""

    alpha: float
    rho_r: float
    rho_d: float
    rho_s: float
    rho_0: float
    T: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _positive(f.name, getattr(self, f.name))
        if self.T <= 1:
            raise DomainError(f"T must exceed 1, got {self.T!r}")

    def scaled(self, factor: float) -> "NormalizedParams":
        """All four normalized PCPs multiplied by ``factor`` (a change of Gc)."""
        return dataclasses.replace(
            self, rho_r=self.rho_r * factor, rho_d=self.rho_d * factor,
            rho_s=self.rho_s * factor, rho_0=self.rho_0 * factor)

    def replace(self, **changes) -> "NormalizedParams":
        return dataclasses.replace(self, **changes)


def normalize(p: PhysicalParams) -> NormalizedParams:
    """Normalized PCPs: ``rho_x = Gc p_x / (N0 B)``, ``rho_0 = Gc C0 / N0``."""
    scale = p.Gc / (p.N0 * p.B)
    return NormalizedParams(
        alpha=p.alpha,
        rho_r=p.p_r * scale,
        rho_d=p.p_d * scale,
        rho_s=p.p_s * scale,
        rho_0=p.Gc * p.C0 / p.N0,
        T=p.T,
    )


def denormalize(theta: NormalizedParams, N0: float, B: float, Gc: float) -> PhysicalParams:
    """Inverse of :func:`normalize` at fixed ``(N0, B, Gc)``."""
    scale = N0 * B / Gc
    return PhysicalParams(
        N0=N0, B=B, Tc=theta.T / B, Gc=Gc, alpha=theta.alpha,
        p_r=theta.rho_r * scale, p_d=theta.rho_d * scale,
        p_s=theta.rho_s * scale, C0=theta.rho_0 * N0 / Gc,
    )


@dataclass(frozen=True)
class DesignPoint:
    """A candidate configuration: ``M`` BS antennas, ``K`` users, pilot length ``tau``."""

    M: int
    K: int
    tau: int

    def __post_init__(self):
        for name in ("M", "K", "tau"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if self.M < self.K + 1:
            raise DomainError(f"need M >= K + 1, got M={self.M}, K={self.K}")
        if self.tau < self.K:
            raise DomainError(f"need tau >= K, got tau={self.tau}, K={self.K}")

    def check(self, T: float) -> "DesignPoint":
        if not self.tau < T:
            raise DomainError(f"need tau < T, got tau={self.tau}, T={T}")
        return self

    def __iter__(self) -> Iterator[int]:
        return iter((self.M, self.K, self.tau))


# ---------------------------------------------------------------------------
# rate and required SNR

def _expm1_2(x):
    # 2**x - 1 without cancellation; math.expm1 keeps scalar and array paths bit-identical
    if np.ndim(x) == 0:
        return math.expm1(float(x) * LN2)
    return _VEXPM1(np.asarray(x, dtype=float) * LN2).astype(float)


_VEXPM1 = np.frompyfunc(math.expm1, 1, 1)


def _check_domain(M, K, tau, T):
    M, K, tau, T = (np.asarray(v, dtype=float) for v in (M, K, tau, T))
    if np.any(K < 1) or np.any(M <= K) or np.any(tau < K) or np.any(tau >= T) or not np.all(T > 1):
        raise DomainError("need M > K >= 1 and K <= tau < T")


def rate_exponent(K, tau, R, T):
    """Per-user spectral efficiency over the data phase, ``R / (K (1 - tau/T))``."""
    x = R / (np.asarray(K, dtype=float) * (1.0 - np.asarray(tau, dtype=float) / T))
    if np.any(x > MAX_EXPONENT):
        raise DomainError(f"rate exponent exceeds {MAX_EXPONENT:g} bits")
    return float(x) if np.ndim(x) == 0 else x


def gamma_from_excess(M, K, tau, excess):
    """Positive root of ``a1 g^2 - a2 g - a3 = 0`` given ``excess = 2**x - 1``.

    Two algebraically equal forms are used so neither the squared
    ``excess`` (huge rates) nor ``4 a1 / excess`` (tiny rates) overflows.
    """
    a1 = tau * (M - K)
    s = K + tau
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = 4.0 * a1 / (excess * s * s)
        big = excess * s / (2.0 * a1) * (1.0 + np.sqrt(1.0 + v))
        small = (excess * s + np.sqrt(excess) * np.sqrt(excess * s * s + 4.0 * a1)) / (2.0 * a1)
        g = np.where(v <= 1.0, big, small)
    return float(g) if np.ndim(g) == 0 else g


def required_gamma_u(M, K, tau, R, T):
    """Per-user SNR ``Gc p_u / (N0 B)`` needed to reach sum rate ``R``.

    Closed form of the inverse of :func:`achievable_rate`.

    Raises
    ------
    DomainError
        If ``M <= K``, ``tau`` is outside ``[K, T)``, ``R <= 0`` or the
        rate exponent exceeds :data:`MAX_EXPONENT`.
    """
    _check_domain(M, K, tau, T)
    if np.any(np.asarray(R) <= 0):
        raise DomainError("R must be positive")
    x = rate_exponent(K, tau, R, T)
    return gamma_from_excess(np.asarray(M, float) if np.ndim(M) else float(M),
                             np.asarray(K, float) if np.ndim(K) else float(K),
                             np.asarray(tau, float) if np.ndim(tau) else float(tau),
                             _expm1_2(x))


def gamma_u_upper_bound(M, K, tau, R, T):
    """Upper bound ``(K+tau)(2^x - 1)/(tau (M-K)) + 1/(K+tau)`` on the required SNR."""
    _check_domain(M, K, tau, T)
    if np.any(np.asarray(R) <= 0):
        raise DomainError("R must be positive")
    a = _expm1_2(rate_exponent(K, tau, R, T))
    M, K, tau = (np.asarray(v, dtype=float) for v in (M, K, tau))
    out = (K + tau) * a / (tau * (M - K)) + 1.0 / (K + tau)
    return float(out) if out.ndim == 0 else out


def gamma_u_bound_gap(M, K, tau, R, T):
    """``gamma_u_upper_bound - required_gamma_u`` without cancellation.

    Equals ``1 / ((K+tau) (sqrt(q) + sqrt(1+q))^2)`` with
    ``q = (K+tau)^2 (2^x-1) / (4 tau (M-K))``, so it stays positive and
    accurate where the two quantities round to the same float.
    """
    _check_domain(M, K, tau, T)
    if np.any(np.asarray(R) <= 0):
        raise DomainError("R must be positive")
    a = _expm1_2(rate_exponent(K, tau, R, T))
    M, K, tau = (np.asarray(v, dtype=float) for v in (M, K, tau))
    s = K + tau
    q = a * s * s / (4.0 * tau * (M - K))
    out = 1.0 / (s * (np.sqrt(q) + np.sqrt(1.0 + q)) ** 2)
    return float(out) if out.ndim == 0 else out


def sqrt_expansion_v(M, K, tau, R, T):
    """The ratio ``v = 4 tau (M-K) / ((K+tau)^2 (2^x - 1))``.

    ``required_gamma_u = (K+tau)(2^x-1)/(2 tau (M-K)) * (1 + sqrt(1+v))``;
    the upper bound replaces ``sqrt(1+v)`` by ``1 + v/2``, so small ``v``
    means a tight bound.
    """
    _check_domain(M, K, tau, T)
    a = _expm1_2(rate_exponent(K, tau, R, T))
    M, K, tau = (np.asarray(v, dtype=float) for v in (M, K, tau))
    out = 4.0 * tau * (M - K) / ((K + tau) ** 2 * a)
    return float(out) if out.ndim == 0 else out


def achievable_rate(gamma_u, M, K, tau, T):
    """Sum spectral efficiency (bits/s/Hz) of ZF with MMSE channel estimates."""
    _check_domain(M, K, tau, T)
    g = np.asarray(gamma_u, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma_u must be nonnegative")
    M, K, tau = (np.asarray(v, dtype=float) for v in (M, K, tau))
    # tau (M-K) g^2 / ((K+tau) g + 1), arranged so g^2 cannot overflow
    with np.errstate(divide="ignore"):
        sinr = np.where(g > 0, tau * (M - K) * g / ((K + tau) + 1.0 / g), 0.0)
    out = K * (1.0 - tau / T) * np.log1p(sinr) / LN2
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# power consumption

@dataclass(frozen=True)
class OpCount:
    """Complex operations per coherence interval for estimation and ZF detection."""

    estimate: float      # A.1  M x tau by tau x K product
    gram: float          # A.2.1
    inverse: float       # A.2.2
    apply: float         # A.2.3
    data: float          # B    one K x M by M x 1 product per data channel use

    @property
    def pinv(self) -> float:            # A.2
        return self.gram + self.inverse + self.apply

    @property
    def training(self) -> float:        # A
        return self.estimate + self.pinv

    @property
    def total(self) -> float:           # C = A + B
        return self.training + self.data


def op_count(M, K, tau, T) -> OpCount:
    """Operation counts per row of the complexity table."""
    _check_domain(M, K, tau, T)
    M, K, tau = float(M), float(K), float(tau)
    return OpCount(
        estimate=2 * M * K * tau,
        gram=2 * M * K * K,
        inverse=8 * K ** 3 / 3,
        apply=2 * M * K * K,
        data=2 * M * K * (T - tau),
    )


@dataclass(frozen=True)
class MudPower:
    """Average channel-estimation plus detection power (W), split by term."""

    linear: float     # 2 M K C0 B: estimate + per-channel-use detection
    pinv: float       # 4 M K^2 C0 / Tc: Gram matrix and its application
    inverse: float    # 8 K^3 C0 / (3 Tc)

    @property
    def total(self) -> float:
        return self.linear + self.pinv + self.inverse


def mud_power(M, K, physical: PhysicalParams) -> MudPower:
    """``p_mud = 2MK C0 B + 4MK^2 C0/Tc + 8K^3 C0/(3 Tc)``."""
    if K < 1 or M < K + 1:
        raise DomainError("need M >= K + 1 and K >= 1")
    c0, b, tc = physical.C0, physical.B, physical.Tc
    return MudPower(
        linear=2 * M * K * c0 * b,
        pinv=4 * M * K * K * c0 / tc,
        inverse=8 * K ** 3 * c0 / (3 * tc),
    )


def mud_normalized(M, K, theta: NormalizedParams):
    """``Gc p_mud / (N0 B)`` expressed in normalized parameters."""
    r0, T = theta.rho_0, theta.T
    return M * (2 * K * r0 + 4 * K * K * r0 / T) + 8 * K ** 3 * r0 / (3 * T)


def inverse_zeta_from_gamma(M, K, gamma_u, theta: NormalizedParams):
    """Normalized total power ``Gc P / (N0 B)`` for a given SNR."""
    a, rr, rd, rs, r0, T = (theta.alpha, theta.rho_r, theta.rho_d,
                            theta.rho_s, theta.rho_0, theta.T)
    return (a * K * gamma_u + rs + K * (rd + (8.0 / 3.0) * K * K * r0 / T)
            + M * (rr + 2 * K * r0 + 4 * K * K * r0 / T))


def inverse_zeta(M, K, tau, R, theta: NormalizedParams):
    """``R / zeta``: normalized total power needed to deliver sum rate ``R``."""
    g = required_gamma_u(M, K, tau, R, theta.T)
    return inverse_zeta_from_gamma(M, K, g, theta)


@dataclass(frozen=True)
class PowerBreakdown:
    pa: float
    bs_rf: float
    mud: float
    circuit: float
    fixed: float

    @property
    def total(self) -> float:
        return self.pa + self.bs_rf + self.mud + self.circuit + self.fixed

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class EEResult:
    """Energy efficiency of one design point.

    ``breakdown`` is normalized (multiples of ``N0 B / Gc``); the physical
    fields are ``None`` unless :class:`PhysicalParams` were supplied.
    """

    design: DesignPoint
    R: float
    gamma_u: float
    zeta: float
    breakdown: PowerBreakdown
    p_u: Optional[float] = None
    eta: Optional[float] = None
    breakdown_w: Optional[PowerBreakdown] = None

    @property
    def P_total(self) -> Optional[float]:
        return None if self.breakdown_w is None else self.breakdown_w.total


def evaluate_ee(design: DesignPoint, R: float, theta: Optional[NormalizedParams] = None,
                physical: Optional[PhysicalParams] = None) -> EEResult:
    """Required SNR, power breakdown and energy efficiency at ``design``.

    ``zeta = eta N0 / Gc`` is the normalized EE; ``eta`` (bits/J) and the
    breakdown in watts are filled in only when ``physical`` is given. If
    ``theta`` is omitted it is derived from ``physical``.
    """
    if theta is None:
        if physical is None:
            raise DomainError("need theta or physical parameters")
        theta = normalize(physical)
    M, K, tau = design
    design.check(theta.T)
    g = required_gamma_u(M, K, tau, R, theta.T)
    inv = inverse_zeta_from_gamma(M, K, g, theta)
    zeta = R / inv
    bd = PowerBreakdown(
        pa=theta.alpha * K * g,
        bs_rf=M * theta.rho_r,
        mud=mud_normalized(M, K, theta),
        circuit=K * theta.rho_d,
        fixed=theta.rho_s,
    )
    if physical is None:
        return EEResult(design, R, g, zeta, bd)
    unit = physical.N0 * physical.B / physical.Gc
    p_u = g * unit
    bd_w = PowerBreakdown(
        pa=physical.alpha * K * p_u,
        bs_rf=M * physical.p_r,
        mud=mud_power(M, K, physical).total,
        circuit=K * physical.p_d,
        fixed=physical.p_s,
    )
    eta = physical.Gc * zeta / physical.N0
    return EEResult(design, R, g, zeta, bd, p_u=p_u, eta=eta, breakdown_w=bd_w)
