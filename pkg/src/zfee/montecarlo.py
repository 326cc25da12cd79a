"""Monte-Carlo check of the analytical ZF rate with MMSE channel estimates.

Everything is in normalized units: unit channel gain and unit noise, so
the per-user transmit SNR is ``gamma_u``. Each replicate draws an i.i.d.
Rayleigh channel, sends orthonormal pilots of length ``tau`` at SNR
``gamma_u`` per channel use, forms the MMSE estimate and applies the
pseudo-inverse of the estimate.

The effective SINR of user ``k`` conditions on the estimate and treats the
estimation-error leakage and noise as uncorrelated noise:

    SINR_k = gamma / ((1 + gamma K s2) ||a_k||^2)

with ``a_k`` the k-th row of the pseudo-inverse and ``s2`` the per-entry
error variance. The analytical rate replaces ``||a_k||^2`` by its mean,
so by Jensen's inequality the simulated rate can only be larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DesignPoint, DomainError, achievable_rate

#: Below this many replicates no pass/fail judgement is made.
MIN_REPLICATES = 100

_COND_LIMIT = 1e10


@dataclass(frozen=True)
class SimConfig:
    M: int
    K: int
    tau: int
    gamma_u: float
    T: float
    replicates: int = 2000
    seed: int = 0

    def __post_init__(self):
        DesignPoint(self.M, self.K, self.tau).check(self.T)
        if not (math.isfinite(self.gamma_u) and self.gamma_u > 0):
            raise DomainError("gamma_u must be positive and finite")
        if self.replicates < 1:
            raise DomainError("need at least one replicate")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimOutcome:
    """Aggregates over all replicates.

    ``stderr`` fields are ``nan`` with a single replicate. ``estimate_var``
    is the mean per-entry power of the channel estimate, ``channel_mse``
    the mean per-entry squared estimation error and ``error_correlation``
    the normalized correlation between estimate and error entries.
    """

    empirical_rate: float
    stderr: float
    analytical_bound: float
    per_user_sinr: float
    perfect_csi_sinr: float
    channel_mse: float
    estimate_var: float
    estimate_var_stderr: float
    error_correlation: float
    replicates: int
    redraws: int

    @property
    def judged(self) -> bool:
        return self.replicates >= MIN_REPLICATES

    @property
    def lower_bound_holds(self) -> bool | None:
        """Bound within two standard errors of the simulation; None when too few replicates."""
        if not self.judged:
            return None
        return self.empirical_rate >= self.analytical_bound - 2.0 * self.stderr


def pilot_matrix(K: int, tau: int) -> np.ndarray:
    """First ``K`` rows of the unitary ``tau``-point DFT; ``Phi Phi^H = I_K``."""
    k = np.arange(K)[:, None]
    t = np.arange(tau)[None, :]
    return np.exp(-2j * np.pi * k * t / tau) / math.sqrt(tau)


def _cgauss(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def replicate_rng(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index, attempt)))


def draw_replicate(cfg: SimConfig, index: int):
    """Channel, its MMSE estimate and the number of redraws for replicate ``index``."""
    M, K, tau, g = cfg.M, cfg.K, cfg.tau, cfg.gamma_u
    phi = pilot_matrix(K, tau)
    scale = math.sqrt(tau * g)
    attempt = 0
    while True:
        rng = replicate_rng(cfg.seed, index, attempt)
        G = _cgauss(rng, (M, K))
        noise = _cgauss(rng, (M, tau))
        Yp = scale * G @ phi + noise
        G_hat = scale / (1.0 + tau * g) * (Yp @ phi.conj().T)
        if np.linalg.cond(G_hat) < _COND_LIMIT:
            return G, G_hat, attempt
        attempt += 1


def _se(samples):
    n = len(samples)
    if n < 2:
        return math.nan
    return float(np.std(samples, ddof=1) / math.sqrt(n))


def simulate(cfg: SimConfig) -> SimOutcome:
    """Run ``cfg.replicates`` independent channel realizations.

    Replicate ``i`` draws from its own stream seeded by ``(seed, i)``, so
    the outcome is bit-identical for identical configs and independent
    of evaluation order. Ill-conditioned estimates are redrawn and counted.
    """
    M, K, tau, g, T = cfg.M, cfg.K, cfg.tau, cfg.gamma_u, cfg.T
    err_var = 1.0 / (1.0 + tau * g)
    leak = 1.0 + g * K * err_var
    pre = K * (1.0 - tau / T)

    rates, sinrs, perfect, mses, evars, cross = [], [], [], [], [], []
    redraws = 0
    for i in range(cfg.replicates):
        G, G_hat, extra = draw_replicate(cfg, i)
        redraws += extra
        E = G - G_hat
        A = np.linalg.pinv(G_hat)
        row_pow = np.sum(np.abs(A) ** 2, axis=1)
        sinr = g / (leak * row_pow)
        rates.append(pre * math.fsum(np.log2(1.0 + sinr)) / K)
        sinrs.append(math.fsum(sinr) / K)
        perfect.append(math.fsum(g / np.sum(np.abs(np.linalg.pinv(G)) ** 2, axis=1)) / K)
        mses.append(float(np.mean(np.abs(E) ** 2)))
        evars.append(float(np.mean(np.abs(G_hat) ** 2)))
        cross.append(complex(np.mean(G_hat * E.conj())))

    n = cfg.replicates
    mse = math.fsum(mses) / n
    evar = math.fsum(evars) / n
    c = complex(math.fsum(z.real for z in cross), math.fsum(z.imag for z in cross)) / n
    return SimOutcome(
        empirical_rate=math.fsum(rates) / n,
        stderr=_se(rates),
        analytical_bound=achievable_rate(g, M, K, tau, T),
        per_user_sinr=math.fsum(sinrs) / n,
        perfect_csi_sinr=math.fsum(perfect) / n,
        channel_mse=mse,
        estimate_var=evar,
        estimate_var_stderr=_se(evars),
        error_correlation=abs(c) / math.sqrt(mse * evar),
        replicates=n,
        redraws=redraws,
    )
