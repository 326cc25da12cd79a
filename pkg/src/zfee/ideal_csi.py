"""Closed-form optimum of the idealized system: perfect CSI, no compute power.

With the computational term removed and the pilot overhead ignored the
EE depends only on ``(M, K)``. For fixed ``K`` the best ``M`` is explicit,
and the remaining one-dimensional objective in ``K`` is strictly convex
with its stationary point at ``R / x'``, where ``x'`` solves
``g(x') = (1 + beta) sqrt(R rho_r / alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, NormalizedParams
from .regime import k_max
from .roots import bisect_increasing
from .special import g

LN2 = math.log(2.0)


def _excess(x):
    return np.expm1(np.asarray(x, dtype=float) * LN2)


def x_prime_target(R, theta: NormalizedParams):
    R = np.asarray(R, float)
    return (1.0 + theta.rho_d / theta.rho_r) * np.sqrt(R * theta.rho_r / theta.alpha)


def x_prime(R, theta: NormalizedParams):
    """Unique positive root of ``g(x) = (1 + rho_d/rho_r) sqrt(R rho_r / alpha)``."""
    if np.any(np.asarray(R) <= 0):
        raise DomainError("R must be positive")
    return bisect_increasing(g, x_prime_target(R, theta), 1e-6, 1.0)


def zeta_csi(M, K, R, theta: NormalizedParams):
    """Normalized EE of the ideal system at real-valued ``(M, K)``.

    ``R/zeta = alpha K (2^(R/K) - 1)/(M - K) + M rho_r + K rho_d + rho_s``.
    """
    M = np.asarray(M, dtype=float)
    K = np.asarray(K, dtype=float)
    if np.any(M <= K) or np.any(K <= 0):
        raise DomainError("need M > K > 0")
    inv = (theta.alpha * K * _excess(R / K) / (M - K) + M * theta.rho_r
           + K * theta.rho_d + theta.rho_s)
    out = R / inv
    return float(out) if out.ndim == 0 else out


def best_m(K, R, theta: NormalizedParams):
    """Optimal antenna count for a given user count, ``K + sqrt(K alpha (2^(R/K)-1) / rho_r)``."""
    K = np.asarray(K, dtype=float)
    out = K + np.sqrt(K) * np.sqrt(theta.alpha * _excess(R / K) / theta.rho_r)
    return float(out) if out.ndim == 0 else out


def reduced_inverse_zeta(K, R, theta: NormalizedParams):
    """``R/zeta`` with ``M`` already optimized: a strictly convex function of ``K``.

    ``K (rho_d + rho_r) + 2 sqrt(alpha rho_r K (2^(R/K) - 1)) + rho_s``.
    """
    K = np.asarray(K, dtype=float)
    out = (K * (theta.rho_d + theta.rho_r)
           + 2.0 * np.sqrt(theta.alpha * theta.rho_r * K * _excess(R / K)) + theta.rho_s)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CsiOptimum:
    """Relaxed optimum of the ideal system.

    ``clamped`` is ``"interior"`` when ``k_opt = R / x_prime``, ``"lower"``
    when pinned at one user and ``"upper"`` when pinned at ``K_max``.
    """

    R: float
    x_prime: float
    k_opt: float
    m_opt: float
    zeta_csi: float
    clamped: str
    k_max: float


def _hardware_conditions(theta):
    km = k_max(theta)
    failed = []
    if not km > 10:
        failed.append(f"K_max = {km:.6g} is not above 10")
    if not theta.rho_s / theta.alpha > 0.5:
        failed.append(f"rho_s/alpha = {theta.rho_s / theta.alpha:.6g} is not above 1/2")
    return km, failed


def csi_optimum(R: float, theta: NormalizedParams, check: bool = True) -> CsiOptimum:
    """Optimal real ``(M, K)`` of the ideal system with ``1 <= K <= K_max``.

    Parameters
    ----------
    R : float
        Sum spectral efficiency (bits/s/Hz).
    theta : NormalizedParams
    check : bool
        Enforce the hypotheses (``K_max > 10`` and ``rho_s/alpha > 1/2``)
        under which the closed form is an optimum. Sweeps that only want
        the curve pass ``False``.

    Raises
    ------
    DomainError
        If ``check`` is set and a hypothesis fails.
    """
    if R <= 0:
        raise DomainError("R must be positive")
    km, failed = _hardware_conditions(theta)
    if check and failed:
        raise DomainError("; ".join(failed))
    xp = x_prime(R, theta)
    k_star = R / xp
    k = max(min(k_star, km), 1.0)
    if k == k_star:
        where = "interior"
    elif k == km:
        where = "upper"
    else:
        where = "lower"
    m = best_m(k, R, theta)
    z = R / reduced_inverse_zeta(k, R, theta)
    return CsiOptimum(R=R, x_prime=xp, k_opt=k, m_opt=m, zeta_csi=z, clamped=where, k_max=km)


def fixed_k_penalty_bound(K: int, R: float, theta: NormalizedParams) -> float:
    """Upper bound ``2K / k_opt`` on the EE loss from fixing the user count.

    Valid when ``K_max > 10``, ``rho_s/alpha > 1/2``,
    ``k_opt < (3/4) K_max`` and ``(4/3) k_opt < K < K_max``.

    Raises
    ------
    DomainError
        Naming every hypothesis that fails.
    """
    km, failed = _hardware_conditions(theta)
    opt = csi_optimum(R, theta, check=False)
    k0 = opt.k_opt
    if not k0 < 0.75 * km:
        failed.append(f"k_opt = {k0:.6g} is not below (3/4) K_max = {0.75 * km:.6g}")
    if not 4.0 * k0 / 3.0 < K:
        failed.append(f"K = {K} is not above (4/3) k_opt = {4 * k0 / 3:.6g}")
    if not K < km:
        failed.append(f"K = {K} is not below K_max = {km:.6g}")
    if failed:
        raise DomainError("; ".join(failed))
    return 2.0 * K / k0
