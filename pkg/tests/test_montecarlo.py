import math

import numpy as np
import pytest

from zfee.core import DomainError, achievable_rate
from zfee.montecarlo import (
    MIN_REPLICATES, SimConfig, draw_replicate, pilot_matrix, replicate_rng, simulate,
)


def test_pilots_orthonormal():
    phi = pilot_matrix(4, 8)
    np.testing.assert_allclose(phi @ phi.conj().T, np.eye(4), atol=1e-14)


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(4, 4, 8, 1.0, 400.0)
    with pytest.raises(DomainError):
        SimConfig(8, 4, 3, 1.0, 400.0)
    with pytest.raises(DomainError):
        SimConfig(8, 4, 8, -1.0, 400.0)
    with pytest.raises(DomainError):
        SimConfig(8, 4, 8, 1.0, 400.0, replicates=0)
    with pytest.raises(DomainError):
        SimConfig(8, 4, 8, 1.0, 400.0, seed=2 ** 64)


def test_deterministic_and_order_free():
    cfg = SimConfig(8, 2, 4, 3.0, 400.0, replicates=150, seed=42)
    assert simulate(cfg) == simulate(cfg)
    # replicate 7 does not depend on which replicates were drawn before it
    a = draw_replicate(cfg, 7)[1]
    draw_replicate(cfg, 3)
    np.testing.assert_array_equal(a, draw_replicate(cfg, 7)[1])
    assert simulate(cfg).empirical_rate != simulate(SimConfig(8, 2, 4, 3.0, 400.0, 150, 43)).empirical_rate


def test_streams_differ_per_replicate():
    x = replicate_rng(0, 0).standard_normal(4)
    y = replicate_rng(0, 1).standard_normal(4)
    z = replicate_rng(0, 0, attempt=1).standard_normal(4)
    assert not np.array_equal(x, y) and not np.array_equal(x, z)


def test_single_user_hand_check():
    # with K = 1 the pseudo-inverse row norm is 1/||g_hat||^2
    cfg = SimConfig(2, 1, 3, 5.0, 400.0, replicates=1, seed=9)
    G, G_hat, _ = draw_replicate(cfg, 0)
    gam, tau = 5.0, 3
    sinr = gam * np.sum(np.abs(G_hat) ** 2) / (1 + gam / (1 + tau * gam))
    out = simulate(cfg)
    assert out.per_user_sinr == pytest.approx(float(sinr), rel=1e-12)
    assert out.empirical_rate == pytest.approx((1 - 3 / 400) * math.log2(1 + sinr), rel=1e-12)


def test_single_replicate_not_judged():
    out = simulate(SimConfig(8, 2, 4, 3.0, 400.0, replicates=1))
    assert math.isnan(out.stderr)
    assert out.lower_bound_holds is None and not out.judged
    assert MIN_REPLICATES == 100


def test_estimate_statistics():
    tau, gam = 6, 2.0
    out = simulate(SimConfig(6, 3, tau, gam, 200.0, replicates=600, seed=5))
    expected_var = tau * gam / (1 + tau * gam)
    assert abs(out.estimate_var - expected_var) < 3 * out.estimate_var_stderr
    assert out.channel_mse == pytest.approx(1 / (1 + tau * gam), rel=0.05)
    assert out.error_correlation < 3 / math.sqrt(600)


def test_high_snr_limit():
    # leakage tends to K/tau of the noise, so the SINR settles at tau/(tau+K) of perfect CSI
    M, K, tau = 8, 2, 8
    out = simulate(SimConfig(M, K, tau, 1e6, 400.0, replicates=200, seed=1))
    assert out.channel_mse == pytest.approx(1 / (1 + tau * 1e6), rel=0.05)
    assert out.per_user_sinr / out.perfect_csi_sinr == pytest.approx(tau / (tau + K), rel=1e-4)


@pytest.mark.parametrize("M,K,tau,gam", [(4, 2, 2, 0.5), (8, 4, 4, 1.0), (16, 4, 12, 10.0),
                                         (32, 8, 8, 0.1), (12, 1, 1, 100.0)])
def test_analytical_rate_is_lower_bound(M, K, tau, gam):
    out = simulate(SimConfig(M, K, tau, gam, 100.0, replicates=300, seed=M + K))
    assert out.analytical_bound == achievable_rate(gam, M, K, tau, 100.0)
    assert out.lower_bound_holds
    assert out.empirical_rate > out.analytical_bound
