import numpy as np
import pytest

from fama_wpcn.analytic import single_port_downlink
from fama_wpcn.channel import SystemConfig, derive_blocks, metrics, sample_draw
from fama_wpcn.errors import ConfigError
from fama_wpcn.strategy import (FA_STRATEGIES, Link, Strategy, StrategyKind, fpa_antennas,
                                fpa_sc_baseline, select_port, take_selected)


def _metrics(seed=0, trials=500, **kw):
    cfg = SystemConfig(**kw)
    d = sample_draw(cfg, derive_blocks(cfg.N, cfg.W, cfg.mu2), np.random.default_rng(seed),
                    trials)
    return cfg, d, metrics(cfg, d)


def test_tokens():
    assert [k.value for k in StrategyKind] == ["dsps", "deps", "ucps", "usps", "fpa-sc"]
    assert StrategyKind.parse(" USPS ") is StrategyKind.USPS
    assert Link.parse("ul") is Link.UPLINK and Link.parse("downlink") is Link.DOWNLINK
    with pytest.raises(ConfigError, match="bogus"):
        StrategyKind.parse("bogus")
    with pytest.raises(ConfigError):
        Link.parse("sidelink")


@pytest.mark.parametrize("W,K", [(1, 3), (3, 7), (4, 9)])
def test_fpa_antenna_rule(W, K):
    assert fpa_antennas(W) == K


def test_fpa_strategy_bounds():
    cfg = SystemConfig(W=3.0)
    assert Strategy.for_config("fpa-sc", cfg).K == 7
    assert Strategy.for_config("fpa-sc", cfg, 5).K == 5
    with pytest.raises(ConfigError):
        Strategy.for_config("fpa-sc", cfg, 8)
    assert Strategy.for_config("dsps", cfg).K is None


def test_select_single_port():
    _, _, m = _metrics(N=2, W=0.3)
    one = type(m)(**{f: (None if getattr(m, f) is None else getattr(m, f)[:, :1])
                     for f in m.__dataclass_fields__})
    for kind in FA_STRATEGIES:
        assert np.all(select_port(kind, one) == 0)


def test_select_constructed_sir():
    m = type("M", (), {"sir": np.array([1.0, 5.0, 2.0])})()
    assert select_port("dsps", m) == 1


def test_tie_breaks_to_lowest_index():
    m = type("M", (), {"ehp": np.array([[3.0, 3.0, 1.0]])})()
    assert select_port("deps", m).tolist() == [0]


def test_selection_identities():
    _, d, m = _metrics(seed=1)
    assert np.array_equal(select_port("usps", m), np.argmax(m.alpha * m.beta, -1))
    assert np.array_equal(select_port("deps", m),
                          np.argmax((np.abs(d.g) ** 2).sum(-1), -1))
    assert np.array_equal(select_port("ucps", m), np.argmax(np.abs(d.h) ** 2, -1))
    port = select_port("dsps", m)
    assert np.array_equal(take_selected(m.sir, port), m.sir.max(-1))


def test_selection_scale_invariance():
    cfg, d, m = _metrics(seed=2)
    scaled = type(d)(g=3.7 * d.g, h=3.7 * d.h, common_g=d.common_g, common_h=d.common_h,
                     port_block=d.port_block)
    m2 = metrics(cfg, scaled)
    for kind in FA_STRATEGIES:
        assert np.array_equal(select_port(kind, m), select_port(kind, m2))


def test_fpa_sc_single_antenna_matches_closed_form():
    cfg = SystemConfig(M=4)
    sir = fpa_sc_baseline(cfg, 1, "downlink", np.random.default_rng(9), 100_000)
    p = np.mean(sir < 1.0)
    exact = single_port_downlink(4, 0.0)
    ci = 1.96 * np.sqrt(exact * (1 - exact) / sir.size)
    assert abs(p - exact) <= max(3 * ci, 0.01)


def test_fpa_sc_selects_best_antenna():
    cfg = SystemConfig(M=3)
    one = fpa_sc_baseline(cfg, 1, "uplink", np.random.default_rng(0), 20_000)
    seven = fpa_sc_baseline(cfg, 7, "uplink", np.random.default_rng(0), 20_000)
    assert np.median(seven) > np.median(one)
    with pytest.raises(ConfigError):
        fpa_sc_baseline(cfg, 0, "uplink", np.random.default_rng(0))
