import math

import numpy as np
import pytest

from fama_wpcn import specfun
from fama_wpcn.channel import (BlockStructure, ChannelDraw, SystemConfig, db_to_linear,
                               derive_blocks, derived_params, jakes_matrix, metrics,
                               sample_draw, sample_draw_jakes)
from fama_wpcn.errors import ConfigError


def rng(seed=0):
    return np.random.default_rng(seed)


def test_config_defaults_and_orientation():
    cfg = SystemConfig()
    assert cfg.t2 == pytest.approx(0.2)
    assert cfg.omega == pytest.approx(1e3 * 12.0 ** 2.2, rel=1e-14)
    assert cfg.pathloss_gain * cfg.omega == pytest.approx(1.0, rel=1e-14)
    assert cfg.pt == pytest.approx(0.1)
    assert cfg.noise == pytest.approx(1e-12)
    assert cfg.kappa2 == pytest.approx(0.97 / 0.03)


@pytest.mark.parametrize("bad", [dict(N=0), dict(W=0.0), dict(mu2=1.0), dict(mu2=0.0),
                                 dict(eta=0.0), dict(rho=1.0), dict(t1=1.0), dict(d=-1.0),
                                 dict(zeta=0.0), dict(pathloss_ref=0.0), dict(M=2.5),
                                 dict(pt_dbm=float("nan"))])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        SystemConfig(**bad)


def test_derived_params_identity():
    cfg = SystemConfig(mu2=0.9, d=15.0)
    g = db_to_linear(7.0)
    dp = derived_params(cfg, g)
    expected = g * cfg.t2 * cfg.noise * cfg.omega ** 2 / (
        cfg.eta * (1 - cfg.rho) * cfg.pt * cfg.t1 * (1 - cfg.mu2) ** 2)
    assert dp.gamma_tilde == pytest.approx(expected, rel=1e-14)
    assert dp.gamma_hat == pytest.approx(dp.gamma_tilde * (1 - cfg.mu2) ** 2 / 4, rel=1e-14)


def test_uplink_snr_dimensional_consistency():
    # the SNR must scale as Pt / (noise * Omega^2): doubling d^zeta quarters it
    cfg = SystemConfig()
    draw = sample_draw(cfg, derive_blocks(cfg.N, cfg.W), rng(1), 50)
    far = cfg.with_(d=cfg.d * 2 ** (1 / cfg.zeta))
    ratio = metrics(cfg, draw).ul_snr / metrics(far, draw).ul_snr
    assert np.allclose(ratio, 4.0, rtol=1e-12)


def test_jakes_matrix():
    J = jakes_matrix(8, 2.0)
    assert np.allclose(np.diag(J), 1.0)
    assert np.allclose(J, J.T)
    assert jakes_matrix(2, 0.5)[0, 1] == pytest.approx(specfun.bessel_j0(math.pi), rel=1e-14)
    assert jakes_matrix(2, 0.5)[0, 1] == pytest.approx(-0.3042, abs=1e-4)
    assert np.linalg.eigvalsh(jakes_matrix(60, 3.0)).min() >= -1e-8
    with pytest.raises(ConfigError):
        jakes_matrix(1, 1.0)
    with pytest.raises(ConfigError):
        jakes_matrix(5, 0.0)


def test_derive_blocks_default():
    blocks = derive_blocks(50, 3.0, 0.97, 1.0)
    assert abs(blocks.B - 2 * 3.0 * 50 / 49) <= 2
    assert blocks.N == 50 and blocks.B <= 50
    assert derive_blocks(50, 3.0, 0.97, 1.0) == blocks


def test_derive_blocks_decorrelated_pair():
    # J0(2 pi W) = 0 makes both eigenvalues 1
    W = 2.404825557695773 / (2 * math.pi)
    assert derive_blocks(2, W, 0.97, 0.99).sizes == (1, 1)


def test_derive_blocks_eigenvalue_fit():
    blocks = derive_blocks(50, 3.0, 0.97, 1.0)
    jakes = np.sort(np.linalg.eigvalsh(jakes_matrix(50, 3.0)))[::-1][:blocks.B]
    model = blocks.eigenvalues(0.97)[:blocks.B]
    assert np.abs(model - jakes).sum() / jakes.sum() <= 0.10
    ev = blocks.eigenvalues(0.97)
    assert ev.size == 50 and ev.sum() == pytest.approx(50.0)


@pytest.mark.parametrize("eps", [0.0, -1.0, 49 / 3.0, 100.0])
def test_derive_blocks_eps_range(eps):
    with pytest.raises(ConfigError):
        derive_blocks(50, 3.0, 0.97, eps)


def test_block_structure_validation():
    with pytest.raises(ConfigError):
        BlockStructure(())
    with pytest.raises(ConfigError):
        BlockStructure((3, 0))
    b = BlockStructure((2, 3))
    assert b.port_block.tolist() == [0, 0, 1, 1, 1]


def test_sample_draw_shapes_and_block_mismatch():
    cfg = SystemConfig(M=3, N=6)
    blocks = BlockStructure((2, 4))
    d = sample_draw(cfg, blocks, rng(), 11)
    assert d.g.shape == (11, 6, 3) and d.h.shape == (11, 6)
    assert d.common_g.shape == (11, 2, 3) and d.common_h.shape == (11, 2)
    with pytest.raises(ConfigError):
        sample_draw(cfg, BlockStructure((2, 3)), rng(), 1)


def test_full_correlation_limit():
    cfg = SystemConfig(M=2, N=6, mu2=1 - 1e-12)
    blocks = BlockStructure((3, 3))
    d = sample_draw(cfg, blocks, rng(2), 100)
    for start, stop in ((0, 3), (3, 6)):
        g = d.g[:, start:stop]
        # relative to the RMS gain sqrt(E|g|^2) = sqrt(2)
        assert np.abs(g - g[:, :1]).max() <= 1e-5 * math.sqrt(2.0)


def test_gain_moments():
    cfg = SystemConfig(M=1, N=4, mu2=0.8)
    blocks = BlockStructure((2, 2))
    d = sample_draw(cfg, blocks, rng(3), 100_000)
    p = np.abs(d.g[..., 0]) ** 2
    # |g|^2 is exponential with mean 2 (variance 4)
    se = 2.0 / math.sqrt(p.shape[0])
    assert abs(p[:, 0].mean() - 2.0) <= 3 * se
    assert abs((np.abs(d.h) ** 2)[:, 1].mean() - 2.0) <= 3 * se
    n = p.shape[0]
    within = np.corrcoef(p[:, 0], p[:, 1])[0, 1]
    assert abs(within - 0.8 ** 2) <= 3 * (1 - 0.64 ** 2) / math.sqrt(n)
    across = np.corrcoef(p[:, 0], p[:, 2])[0, 1]
    assert abs(across) <= 3 / math.sqrt(n)


def test_reproducible_draws():
    cfg = SystemConfig()
    blocks = derive_blocks(cfg.N, cfg.W)
    a = sample_draw(cfg, blocks, np.random.Generator(np.random.Philox(5)), 20)
    b = sample_draw(cfg, blocks, np.random.Generator(np.random.Philox(5)), 20)
    assert np.array_equal(a.g, b.g) and np.array_equal(a.h, b.h)


def test_jakes_draw_covariance():
    cfg = SystemConfig(M=1, N=5, W=1.0)
    d = sample_draw_jakes(cfg, rng(4), 200_000)
    g = d.g[..., 0]
    emp = (g.conj().T @ g).real / g.shape[0] / 2.0
    assert np.allclose(emp, jakes_matrix(5, 1.0), atol=0.02)


def _draw_from(g, h):
    t, n, _ = g.shape
    return ChannelDraw(g=g, h=h, common_g=np.zeros((t, 0, g.shape[2])),
                       common_h=np.zeros((t, 0)), port_block=np.zeros(n, dtype=int))


def test_metrics_equal_gains_and_zero_interference():
    cfg = SystemConfig(M=2, N=2)
    g = np.array([[[1 + 1j, 1 - 1j], [2.0, 0.0]]])
    h = np.array([[1.0, 1.0]])
    m = metrics(cfg, _draw_from(g, h))
    assert m.sir[0, 0] == 1.0
    assert m.sir[0, 1] == np.inf
    assert not np.any(np.isnan(m.sir))


def test_metrics_linearity_and_identities():
    cfg = SystemConfig()
    blocks = derive_blocks(cfg.N, cfg.W)
    d = sample_draw(cfg, blocks, rng(6), 200)
    m = metrics(cfg, d)
    m2 = metrics(cfg.with_(pt_dbm=cfg.pt_dbm + 10 * math.log10(2)), d)
    assert np.allclose(m2.ehp / m.ehp, 2.0, rtol=1e-12)
    # SIR computed directly from the gains
    power = np.abs(d.g) ** 2
    assert np.allclose(m.sir, power[..., 0] / power[..., 1:].sum(-1), rtol=1e-12)
    assert np.allclose(m.alpha, m.X + m.Y, rtol=1e-14)
    # harvested power is port-independent multiple of sum |g|^2
    ratio = m.ehp / power.sum(-1)
    assert np.allclose(ratio, ratio.flat[0], rtol=1e-12)
    assert np.array_equal(np.argmax(m.ehp, -1), np.argmax(power.sum(-1), -1))
    # uplink SNR two ways: link budget versus the normalized product
    gt = derived_params(cfg, 1.0).gamma_tilde
    assert np.allclose(m.ul_snr, m.alpha * m.beta / gt, rtol=1e-10)


def test_metrics_outage_indicators():
    cfg = SystemConfig()
    d = sample_draw(cfg, derive_blocks(cfg.N, cfg.W), rng(8), 10)
    m = metrics(cfg, d, dl_threshold=1.0, ul_threshold=10.0)
    assert np.array_equal(m.dl_outage, m.sir < 1.0)
    assert np.array_equal(m.ul_outage, m.ul_snr < 10.0)
