"""Independent reference computations used only by the tests.

Nothing here calls the closed forms under test; each oracle is a direct
transcription of the defining equation solved by brute force.
"""

import math

import numpy as np

from zfee.core import inverse_zeta

N0 = 10.0 ** -20.4


def rate(g, M, K, tau, T):
    """Sum rate of ZF with MMSE estimates, straight from its definition."""
    sinr = tau * (M - K) * g * g / ((K + tau) * g + 1)
    return K * (1 - tau / T) * math.log2(1 + sinr)


def gamma_by_bisection(M, K, tau, R, T, iters=400):
    lo, hi = 0.0, 1.0
    while rate(hi, M, K, tau, T) < R:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if rate(mid, M, K, tau, T) < R:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17 * hi:
            break
    return 0.5 * (lo + hi)


def mud_watts(M, K, C0, B, Tc):
    # three terms: per-use products, Gram plus apply, inversion
    return 2 * M * K * C0 * B + 4 * M * K * K * C0 / Tc + 8 * K ** 3 * C0 / (3 * Tc)


def bisect_scalar(f, target, lo, hi, iters=400):
    """Plain bisection of an increasing scalar function."""
    while f(lo) > target:
        lo /= 2
    while f(hi) < target:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def g_ref(x):
    t = 2.0 ** x
    return math.sqrt(x / (t - 1)) * (t * x * math.log(2) - t + 1)


def exhaustive(R, theta, k_cap, m_cap, rtol=1e-12):
    """Full triple enumeration; ties to smallest K, then M, then tau."""
    T = theta.T
    tau_hi = math.ceil(T) - 1
    grids = []
    for K in range(1, k_cap + 1):
        if K > tau_hi or K + 1 > m_cap:
            break
        taus = np.arange(K, tau_hi + 1)
        x = R / (K * (1 - taus / T))
        taus = taus[x <= 1024]
        if taus.size == 0:
            continue
        MM, TT = np.meshgrid(np.arange(K + 1, m_cap + 1), taus, indexing="ij")
        v = inverse_zeta(MM.astype(float), float(K), TT.astype(float), R, theta)
        grids.append((K, MM, TT, v))
    vmin = min(float(v.min()) for _, _, _, v in grids)
    for K, MM, TT, v in grids:
        near = v <= vmin * (1 + rtol)
        if near.any():
            # lexicographic (M, tau) among the near-ties of this K
            cand = sorted(zip(MM[near].tolist(), TT[near].tolist()))
            m, t = cand[0]
            return float(v[(MM == m) & (TT == t)][0]), K, int(m), int(t)
    raise AssertionError("unreachable")


def reduced_objective_grid_argmin(R, theta, kmax, step=1e-3):
    """Minimizer over a uniform K grid of the ideal system's objective with M optimized."""
    K = np.arange(1.0, kmax + step / 2, step)
    K = K[K <= kmax]
    ex = np.array([2.0 ** (R / k) - 1 for k in K])
    f = (K * (theta.rho_d + theta.rho_r) + 2 * np.sqrt(theta.alpha * theta.rho_r * K * ex)
         + theta.rho_s)
    return float(K[int(np.argmin(f))])
