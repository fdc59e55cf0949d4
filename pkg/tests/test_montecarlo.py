import math

import numpy as np
import pytest

from fama_wpcn import montecarlo as mc
from fama_wpcn.channel import SystemConfig, derive_blocks
from fama_wpcn.errors import ConfigError, DomainError
from fama_wpcn.montecarlo import OutageEstimate, estimate_many, estimate_outage, sweep


@pytest.fixture(scope="module")
def setup():
    cfg = SystemConfig()
    return cfg, derive_blocks(cfg.N, cfg.W, cfg.mu2)


def test_estimate_from_count():
    e = OutageEstimate.from_count(25, 100)
    assert e.probability == 0.25 and e.trials == 100
    assert e.ci_half_width == pytest.approx(1.96 * math.sqrt(0.25 * 0.75 / 100))
    with pytest.raises(DomainError):
        OutageEstimate(1.5)


def test_zero_threshold(setup):
    cfg, blocks = setup
    e = estimate_outage(cfg, blocks, "dsps", "downlink", -math.inf, 2000, 1)
    assert e.probability == 0.0


def test_argument_errors(setup):
    cfg, blocks = setup
    with pytest.raises(ConfigError):
        estimate_outage(cfg, blocks, "dsps", "downlink", 0.0, 0, 1)
    with pytest.raises(DomainError):
        estimate_outage(cfg, blocks, "dsps", "downlink", math.nan, 10, 1)
    with pytest.raises(DomainError):
        estimate_outage(cfg, blocks, "dsps", "uplink", math.inf, 10, 1)
    with pytest.raises(ConfigError):
        sweep(cfg, "dsps", "downlink", [], 10, 1)


def test_deps_downlink_closed(setup):
    cfg, blocks = setup
    e = estimate_outage(cfg, blocks, "deps", "downlink", 0.0, 100_000, 3)
    assert abs(e.probability - 0.875) <= max(3 * e.ci_half_width, 0.02)


def test_determinism_and_chunk_invariance(setup):
    cfg, blocks = setup
    a = estimate_outage(cfg, blocks, "usps", "uplink", 5.0, 25_000, 42)
    b = estimate_outage(cfg, blocks, "usps", "uplink", 5.0, 25_000, 42)
    c = estimate_outage(cfg, blocks, "usps", "uplink", 5.0, 25_000, 42, workers=3)
    assert a == b == c


def test_shared_draws_across_strategies(setup):
    cfg, blocks = setup
    many = estimate_many(cfg, blocks, ["dsps", "usps"], 0.0, 5.0, 12_000, 4)
    single = estimate_outage(cfg, blocks, "usps", "uplink", 5.0, 12_000, 4)
    assert many[(mc.StrategyKind.USPS, mc.Link.UPLINK)] == single
    assert len(many) == 4


def test_chunk_streams_differ():
    a = mc.chunk_rng(1, 0, 0).standard_normal(4)
    b = mc.chunk_rng(1, 0, 1).standard_normal(4)
    c = mc.chunk_rng(1, 1, 0).standard_normal(4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_sweep_single_point_equals_estimate(setup):
    cfg, blocks = setup
    (pt, est), = sweep(cfg, "dsps", "downlink", [2.0], 5000, 9, blocks=blocks)
    assert pt == 2.0
    assert est == estimate_outage(cfg, blocks, "dsps", "downlink", 2.0, 5000, 9, point=0)


def test_sweep_pt_monotone():
    cfg = SystemConfig(d=18.0, W=4.0)
    grid = [dict(pt_dbm=p, threshold_db=10.0) for p in (10.0, 15.0, 20.0, 25.0)]
    res = sweep(cfg, "deps", "uplink", grid, 20_000, 5)
    vals = [e.probability for _, e in res]
    ci = [e.ci_half_width for _, e in res]
    for i in range(len(vals) - 1):
        assert vals[i + 1] <= vals[i] + 3 * (ci[i] + ci[i + 1])
    with pytest.raises(ConfigError):
        sweep(cfg, "deps", "uplink", [dict(pt_dbm=1.0)], 10, 1)


def test_uplink_ordering():
    cfg = SystemConfig(pt_dbm=20.0, N=50, M=4, W=4.0, d=12.0)
    blocks = derive_blocks(cfg.N, cfg.W)
    res = estimate_many(cfg, blocks, ["usps", "ucps", "deps", "dsps"], None, 10.0, 30_000, 2)
    p = [res[(mc.StrategyKind.parse(k), mc.Link.UPLINK)] for k in ("usps", "ucps", "deps", "dsps")]
    for lo, hi in zip(p[:-1], p[1:]):
        assert lo.probability <= hi.probability + lo.ci_half_width + hi.ci_half_width


def test_fpa_sc_in_mc(setup):
    cfg, blocks = setup
    e = estimate_outage(cfg, blocks, "fpa-sc", "downlink", 0.0, 20_000, 1)
    assert 0.0 < e.probability < 1.0
    with pytest.raises(ConfigError):
        estimate_outage(cfg, blocks, "fpa-sc", "downlink", 0.0, 10, 1, fpa_k=99)


def test_jakes_model_runs(setup):
    cfg, blocks = setup
    e = estimate_outage(cfg, blocks, "dsps", "downlink", 0.0, 5000, 1, model="jakes")
    b = estimate_outage(cfg, blocks, "dsps", "downlink", 0.0, 5000, 1, model="block")
    assert abs(e.probability - b.probability) < 0.1
    with pytest.raises(ConfigError):
        estimate_outage(cfg, blocks, "dsps", "downlink", 0.0, 10, 1, model="rice")
