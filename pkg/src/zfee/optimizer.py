"""Energy-efficiency maximization over the design ``(M, K, tau)``.

The integer search loops over ``K``, vectorizes over every pilot length
and binary-searches ``M``: for fixed ``(K, tau)`` the normalized power
``R / zeta`` is a convex function of ``M`` (a convex decreasing SNR term
plus a linear hardware term), so the first ``M`` where the forward
difference turns nonnegative is the minimizer. A neighbor check guards
against floating-point non-unimodality and falls back to a full scan.

Ties (values within ``1e-12`` relative of the minimum) go to the smallest
``K``, then ``M``, then ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize

from .core import (
    LN2, MAX_EXPONENT, DesignPoint, DomainError, EEResult, NormalizedParams,
    PhysicalParams, evaluate_ee, gamma_from_excess, inverse_zeta,
    inverse_zeta_from_gamma,
)
from .ideal_csi import csi_optimum
from .regime import k_max

TIE_RTOL = 1e-12
_VEXPM1 = np.frompyfunc(math.expm1, 1, 1)


@dataclass(frozen=True)
class SearchCaps:
    """Artificial bounds on the otherwise unbounded integer search.

    ``k_cap=None`` means the natural bound: ``floor(K_max)`` in capped
    mode, otherwise the largest pilot length ``ceil(T) - 1``.
    """

    m_cap: int = 4096
    k_cap: Optional[int] = None


@dataclass(frozen=True)
class CapHits:
    m: bool = False
    k: bool = False

    def __bool__(self):
        return self.m or self.k


@dataclass(frozen=True)
class RelaxedDesign:
    """Real-valued ``(M, K, tau)``."""

    M: float
    K: float
    tau: float

    def __iter__(self):
        return iter((self.M, self.K, self.tau))


@dataclass(frozen=True)
class Optimum:
    """Result of an EE maximization.

    ``zeta`` is recomputed at ``design`` through :func:`evaluate_ee` in
    integer mode. ``eta`` is filled in when physical parameters are given.
    """

    design: Union[DesignPoint, RelaxedDesign]
    R: float
    zeta: float
    eta: Optional[float] = None
    cap_hit: CapHits = field(default_factory=CapHits)
    evaluations: int = 0
    fallbacks: int = 0
    converged: bool = True
    ties: int = 1
    result: Optional[EEResult] = None


def tau_max(T: float) -> int:
    """Largest integer pilot length strictly below ``T``."""
    return math.ceil(T) - 1


def pilot_excess(K: int, taus: np.ndarray, R: float, T: float) -> np.ndarray:
    """``2**x - 1`` for every pilot length; ``inf`` where ``x`` exceeds the guard."""
    x = R / (K * (1.0 - taus / T))
    out = np.full(taus.shape, np.inf)
    ok = x <= MAX_EXPONENT
    if ok.any():
        out[ok] = _VEXPM1(x[ok] * LN2).astype(float)
    return out


def _objective(M, K, taus, a, theta):
    with np.errstate(invalid="ignore", over="ignore"):
        g = gamma_from_excess(M, float(K), taus, a)
        return inverse_zeta_from_gamma(M, float(K), g, theta)


def select(values, K, M, tau, rtol=TIE_RTOL):
    """Index of the preferred minimizer and the number of near-ties."""
    values = np.asarray(values)
    best = values.min()
    near = np.flatnonzero(values <= best * (1.0 + rtol))
    order = np.lexsort((np.asarray(tau)[near], np.asarray(M)[near], np.asarray(K)[near]))
    return int(near[order[0]]), len(near)


def _scan_k(K, R, theta, m_cap):
    """Candidate ``(value, M, tau)`` arrays for one user count.

    Returns the minimizer over ``M`` for each pilot length plus its two
    neighbors so that near-ties are resolved exactly as a full scan would.
    """
    taus = np.arange(K, tau_max(theta.T) + 1, dtype=float)
    if taus.size == 0 or K + 1 > m_cap:
        return None
    a = pilot_excess(K, taus, R, theta.T)
    live = np.isfinite(a)
    if not live.any():
        return None
    taus, a = taus[live], a[live]

    lo = np.full(taus.shape, K + 1, dtype=np.int64)
    hi = np.full(taus.shape, m_cap, dtype=np.int64)
    evals = 0
    while np.any(lo < hi):
        mid = (lo + hi) // 2
        with np.errstate(invalid="ignore"):
            # inf - inf (SNR overflow at both points) gives nan, which steers toward larger M
            d = (_objective(mid + 1.0, K, taus, a, theta)
                 - _objective(mid.astype(float), K, taus, a, theta))
        evals += 2 * taus.size
        up = d >= 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid + 1)
    m_star = lo

    f0 = _objective(m_star.astype(float), K, taus, a, theta)
    fl = np.where(m_star > K + 1, _objective(m_star - 1.0, K, taus, a, theta), np.inf)
    fr = np.where(m_star < m_cap, _objective(m_star + 1.0, K, taus, a, theta), np.inf)
    evals += 3 * taus.size

    # convexity guard: the binary-search answer must be a local minimum
    bad = (f0 > fl * (1 + TIE_RTOL)) | (f0 > fr * (1 + TIE_RTOL))
    fallbacks = int(bad.sum())
    if fallbacks:
        ms = np.arange(K + 1, m_cap + 1, dtype=float)
        for i in np.flatnonzero(bad):
            row = _objective(ms, K, taus[i], a[i], theta)
            evals += ms.size
            j = int(np.argmin(row))
            m_star[i] = int(ms[j])
            f0[i] = row[j]
            fl[i] = row[j - 1] if j > 0 else np.inf
            fr[i] = row[j + 1] if j + 1 < ms.size else np.inf

    vals = np.concatenate([f0, fl, fr])
    Ms = np.concatenate([m_star, m_star - 1, m_star + 1])
    ts = np.concatenate([taus, taus, taus]).astype(np.int64)
    keep = np.isfinite(vals)
    return vals[keep], Ms[keep], ts[keep], evals, fallbacks


def _lower_bound(K, theta):
    # every term of R/zeta except the PA term, at the smallest M = K + 1
    r0, T = theta.rho_0, theta.T
    return (theta.rho_s + K * theta.rho_d + 8 * K ** 3 * r0 / (3 * T)
            + (K + 1) * (theta.rho_r + 2 * K * r0 + 4 * K * K * r0 / T))


def _finish(M, K, tau, R, theta, physical, cap_hit, evals, fallbacks, ties):
    design = DesignPoint(int(M), int(K), int(tau))
    res = evaluate_ee(design, R, theta, physical)
    return Optimum(design=design, R=R, zeta=res.zeta, eta=res.eta, cap_hit=cap_hit,
                   evaluations=evals, fallbacks=fallbacks, ties=ties, result=res)


def _search(ks, R, theta, caps, natural_k, physical):
    m_cap = caps.m_cap
    best = math.inf
    parts = []
    evals = fallbacks = 0
    for K in ks:
        if _lower_bound(K, theta) > best:
            break
        out = _scan_k(K, R, theta, m_cap)
        if out is None:
            continue
        vals, Ms, ts, e, fb = out
        evals += e
        fallbacks += fb
        parts.append((vals, np.full(vals.shape, K), Ms, ts))
        best = min(best, float(vals.min()))
    if not parts:
        raise DomainError("empty feasible set")
    vals, Ks, Ms, ts = (np.concatenate(c) for c in zip(*parts))
    i, ties = select(vals, Ks, Ms, ts)
    hits = CapHits(m=bool(Ms[i] >= m_cap), k=bool(Ks[i] >= ks[-1] and ks[-1] < natural_k))
    return _finish(Ms[i], Ks[i], ts[i], R, theta, physical, hits, evals, fallbacks, ties)


def _natural_k(theta, capped_k):
    if capped_k:
        return math.floor(k_max(theta))
    return tau_max(theta.T)


def optimize_integer(R: float, theta: NormalizedParams, caps: SearchCaps = SearchCaps(),
                     capped_k: bool = False,
                     physical: Optional[PhysicalParams] = None) -> Optimum:
    """Globally optimal integer design.

    Parameters
    ----------
    R : float
        Sum spectral efficiency (bits/s/Hz).
    theta : NormalizedParams
    caps : SearchCaps
        ``m_cap`` bounds the antenna count; ``k_cap`` optionally tightens
        the user bound.
    capped_k : bool
        Restrict to ``K <= floor(K_max)``.
    physical : PhysicalParams, optional
        Adds ``eta`` in bits/J to the result.

    Raises
    ------
    DomainError
        If no design is feasible.
    """
    if R <= 0:
        raise DomainError("R must be positive")
    natural = _natural_k(theta, capped_k)
    k_cap = natural if caps.k_cap is None else min(caps.k_cap, natural)
    if k_cap < 1:
        raise DomainError("empty feasible set: no admissible user count")
    if caps.m_cap <= k_cap + 1:
        raise DomainError(f"m_cap = {caps.m_cap} must exceed k_cap + 1 = {k_cap + 1}")
    return _search(list(range(1, k_cap + 1)), R, theta, caps, natural, physical)


def optimize_fixed_k(K: int, R: float, theta: NormalizedParams, caps: SearchCaps = SearchCaps(),
                     physical: Optional[PhysicalParams] = None) -> Optimum:
    """Best ``(M, tau)`` with the user count held at ``K``."""
    if K < 1 or not K < theta.T:
        raise DomainError("need 1 <= K < T")
    return _search([int(K)], R, theta, caps, int(K), physical)


def optimize_fixed_mk(M: int, K: int, R: float, theta: NormalizedParams,
                      physical: Optional[PhysicalParams] = None) -> Optimum:
    """Best pilot length for a fixed ``(M, K)``; full scan, ties to the smaller ``tau``."""
    if M < K + 1 or K < 1:
        raise DomainError("need M >= K + 1 and K >= 1")
    taus = np.arange(K, tau_max(theta.T) + 1, dtype=float)
    if taus.size == 0:
        raise DomainError("need K < T")
    a = pilot_excess(K, taus, R, theta.T)
    vals = _objective(float(M), K, taus, a, theta)
    if not np.isfinite(vals).any():
        raise DomainError("rate exponent exceeds the overflow guard for every pilot length")
    n = taus.size
    i, ties = select(vals, np.full(n, K), np.full(n, M), taus)
    return _finish(M, K, taus[i], R, theta, physical, CapHits(), n, 0, ties)


# ---------------------------------------------------------------------------
# relaxed problem

_LOG_DM = (math.log(1e-9), math.log(1e9))


def _tau_hi(K, R, T):
    return min(T * (1 - 1e-9), T * (1 - R / (0.68 * MAX_EXPONENT * K)))


def _unpack(u, R, T):
    K, t, m = u
    hi = _tau_hi(K, R, T)
    return K + math.exp(m), K, K + t * (hi - K)


def _pack(M, K, tau, R, T):
    hi = _tau_hi(K, R, T)
    t = 0.0 if hi <= K else min(max((tau - K) / (hi - K), 0.0), 1.0)
    m = min(max(math.log(max(M - K, 1e-9)), _LOG_DM[0]), _LOG_DM[1])
    return np.array([K, t, m])


def optimize_relaxed(R: float, theta: NormalizedParams, start: Optional[Optimum] = None,
                     physical: Optional[PhysicalParams] = None, max_restarts: int = 25) -> Optimum:
    """Local optimum of the real-valued problem with ``1 <= K <= K_max``.

    Multi-start L-BFGS-B from the capped integer optimum and from the
    ideal-CSI optima at ``R`` and ``4R/3`` (pilot length ``K_max``). Each
    start is restarted until the relative improvement drops below
    ``1e-10``. The result is never worse than the integer start.
    """
    if R <= 0:
        raise DomainError("R must be positive")
    T = theta.T
    km = k_max(theta)
    k_lo, k_hi = 1.0, km
    if _tau_hi(k_lo, R, T) <= k_lo:
        raise DomainError("no admissible pilot length at K = 1")
    # largest K that still leaves room for a pilot length
    while _tau_hi(k_hi, R, T) <= k_hi * (1 + 1e-9):
        k_hi = 0.5 * (k_lo + k_hi)

    if start is None:
        start = optimize_integer(R, theta, capped_k=True)
    starts = [tuple(float(v) for v in start.design)]
    for rate in (R, 4.0 * R / 3.0):
        c = csi_optimum(rate, theta, check=False)
        tau = min(km, _tau_hi(c.k_opt, R, T))
        starts.append((c.m_opt, c.k_opt, tau))

    def f(u):
        M, K, tau = _unpack(u, R, T)
        return math.log(inverse_zeta(M, K, tau, R, theta))

    bounds = [(k_lo, k_hi), (0.0, 1.0), _LOG_DM]
    best_u, best_f, evals, converged = None, math.inf, 0, True
    for M0, K0, t0 in starts:
        K0 = min(max(K0, k_lo), k_hi)
        u = _pack(M0, K0, t0, R, T)
        fu = f(u)
        for _ in range(max_restarts):
            res = minimize(f, u, method="L-BFGS-B", bounds=bounds,
                           options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 2000})
            evals += res.nfev
            if res.fun < fu:
                gain = -math.expm1(res.fun - fu)
                u, fu = res.x, res.fun
                if gain < 1e-10:
                    break
            else:
                break
        else:
            converged = False
        if fu < best_f:
            best_u, best_f = u, fu

    M, K, tau = _unpack(best_u, R, T)
    zeta = R / inverse_zeta(M, K, tau, R, theta)
    if zeta < start.zeta:
        M, K, tau = (float(v) for v in start.design)
        zeta = start.zeta
    eta = None if physical is None else physical.Gc * zeta / physical.N0
    return Optimum(design=RelaxedDesign(M, K, tau), R=R, zeta=zeta, eta=eta,
                   evaluations=evals, converged=converged)
