"""Monte Carlo outage estimation.

Trials are split into fixed-size chunks. Chunk ``c`` of grid point ``i``
draws from a Philox stream seeded by ``SeedSequence(seed, spawn_key=(i, c))``,
so the estimate does not depend on how chunks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (BlockStructure, SystemConfig, db_to_linear, derive_blocks,
                      jakes_root, metrics, sample_draw, sample_draw_jakes)
from .errors import ConfigError, DomainError
from .strategy import (FA_STRATEGIES, Link, Strategy, StrategyKind, fpa_antennas,
                       fpa_sc_config, select_port, take_selected)

CHUNK = 10_000
METHODS = ("mc", "glq", "sfa", "sfa2", "closed", "lb", "lb-closed", "nested")

# stream ids inside one chunk
_FA_STREAM = 0
_SC_STREAM = 1


@dataclass(frozen=True)
class OutageEstimate:
    probability: float
    trials: int = 0
    ci_half_width: float = 0.0
    method: str = "mc"

    def __post_init__(self):
        p = self.probability
        if not (math.isfinite(p) and -1e-12 <= p <= 1 + 1e-12):
            raise DomainError(f"outage probability out of [0, 1]: {p!r}")
        object.__setattr__(self, "probability", float(min(max(p, 0.0), 1.0)))

    @classmethod
    def from_count(cls, outages: int, trials: int) -> "OutageEstimate":
        p = outages / trials
        return cls(p, int(trials), 1.96 * math.sqrt(p * (1.0 - p) / trials), "mc")


def chunk_rng(seed: int, point: int, chunk: int, stream: int = _FA_STREAM):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(point), int(chunk), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def _chunk_sizes(trials: int):
    full, rest = divmod(int(trials), CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _check_trials(trials):
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ConfigError(f"trials must be a positive integer, got {trials!r}")
    return int(trials)


def _threshold(threshold_db):
    t = float(threshold_db)
    if math.isnan(t) or t == math.inf:
        raise DomainError(f"threshold must be finite or -inf, got {threshold_db!r}")
    return 0.0 if t == -math.inf else float(db_to_linear(t))


def selected_metrics(cfg: SystemConfig, blocks: BlockStructure, kinds, trials: int,
                     seed: int, point: int = 0, chunk: int = 0, model: str = "block",
                     fpa_k: int | None = None) -> dict:
    """SIR and uplink SNR at the selected port, per strategy, for one chunk.

    Returns ``{kind: (sir, ul_snr)}`` with arrays of length ``trials``. All
    FA strategies share the same channel draws; FPA-SC uses its own stream.
    """
    out = {}
    fa = [k for k in kinds if k is not StrategyKind.FPA_SC]
    if fa:
        rng = chunk_rng(seed, point, chunk, _FA_STREAM)
        if model == "block":
            draw = sample_draw(cfg, blocks, rng, trials)
        elif model == "jakes":
            draw = sample_draw_jakes(cfg, rng, trials, root=jakes_root(cfg.N, cfg.W))
        else:
            raise ConfigError(f"unknown channel model {model!r}")
        m = metrics(cfg, draw)
        for k in fa:
            port = select_port(k, m)
            out[k] = (take_selected(m.sir, port), take_selected(m.ul_snr, port))
    if StrategyKind.FPA_SC in kinds:
        K = fpa_antennas(cfg.W) if fpa_k is None else int(fpa_k)
        sc_cfg, sc_blocks = fpa_sc_config(cfg, K)
        rng = chunk_rng(seed, point, chunk, _SC_STREAM)
        m = metrics(sc_cfg, sample_draw(sc_cfg, sc_blocks, rng, trials))
        # selection combining picks the antenna that is best for the link
        out[StrategyKind.FPA_SC] = (m.sir.max(axis=-1), m.ul_snr.max(axis=-1))
    return out


def estimate_many(cfg: SystemConfig, blocks: BlockStructure, kinds, dl_db, ul_db,
                  trials: int, seed: int, point: int = 0, workers: int = 1,
                  model: str = "block", fpa_k: int | None = None) -> dict:
    """Downlink and uplink estimates for several strategies from one run.

    Returns ``{(kind, link): OutageEstimate}``; a link whose threshold is
    ``None`` is skipped.
    """
    trials = _check_trials(trials)
    kinds = [StrategyKind.parse(k) for k in kinds]
    dl = None if dl_db is None else _threshold(dl_db)
    ul = None if ul_db is None else _threshold(ul_db)

    def run(job):
        c, n = job
        sel = selected_metrics(cfg, blocks, kinds, n, seed, point, c, model, fpa_k)
        counts = {}
        for k, (sir, snr) in sel.items():
            if dl is not None:
                counts[(k, Link.DOWNLINK)] = int(np.count_nonzero(sir < dl))
            if ul is not None:
                counts[(k, Link.UPLINK)] = int(np.count_nonzero(snr < ul))
        return counts

    jobs = list(enumerate(_chunk_sizes(trials)))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = {}
    for part in parts:
        for key, n in part.items():
            total[key] = total.get(key, 0) + n
    return {key: OutageEstimate.from_count(n, trials) for key, n in total.items()}


def estimate_outage(cfg: SystemConfig, blocks: BlockStructure, kind, link,
                    threshold_db: float, trials: int, seed: int, point: int = 0,
                    workers: int = 1, model: str = "block",
                    fpa_k: int | None = None) -> OutageEstimate:
    """Fraction of draws whose selected-port SIR/SNR is below the threshold."""
    kind = StrategyKind.parse(kind)
    link = Link.parse(link)
    if kind is StrategyKind.FPA_SC and fpa_k is not None:
        Strategy.for_config(kind, cfg, fpa_k)
    dl = threshold_db if link is Link.DOWNLINK else None
    ul = threshold_db if link is Link.UPLINK else None
    res = estimate_many(cfg, blocks, [kind], dl, ul, trials, seed, point, workers,
                        model, fpa_k)
    return res[(kind, link)]


def sweep(cfg: SystemConfig, kind, link, grid, trials: int, seed: int,
          blocks: BlockStructure | None = None, eps: float = 1.0,
          workers: int = 1, model: str = "block") -> list:
    """Estimate outage at every grid point.

    A grid entry is either a threshold in dB or a mapping of SystemConfig
    overrides plus ``threshold_db``. Point ``i`` uses seed stream ``i``.
    Blocks are re-derived when a point changes N, W or mu2.
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("sweep grid is empty")
    results = []
    for i, entry in enumerate(grid):
        if isinstance(entry, dict):
            entry = dict(entry)
            if "threshold_db" not in entry:
                raise ConfigError(f"grid point {i} lacks threshold_db")
            thr = entry.pop("threshold_db")
            point_cfg = cfg.with_(**entry)
        else:
            thr, point_cfg = entry, cfg
        point_blocks = blocks
        if (point_blocks is None or point_cfg.N != cfg.N or point_cfg.W != cfg.W
                or point_cfg.mu2 != cfg.mu2):
            point_blocks = derive_blocks(point_cfg.N, point_cfg.W, point_cfg.mu2, eps)
        est = estimate_outage(point_cfg, point_blocks, kind, link, thr, trials, seed,
                              point=i, workers=workers, model=model)
        results.append((entry, est))
    return results


__all__ = ["CHUNK", "FA_STRATEGIES", "METHODS", "OutageEstimate", "chunk_rng",
           "estimate_many", "estimate_outage", "selected_metrics", "sweep"]
