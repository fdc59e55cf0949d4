"""Port-selection rules and the fixed-antenna selection-combining baseline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import BlockStructure, SystemConfig, sample_draw, single_block_sizes
from .errors import ConfigError


class StrategyKind(enum.Enum):
    DSPS = "dsps"   # max downlink SIR
    DEPS = "deps"   # max harvested energy
    UCPS = "ucps"   # max uplink channel gain
    USPS = "usps"   # max uplink SNR
    FPA_SC = "fpa-sc"

    @classmethod
    def parse(cls, token) -> "StrategyKind":
        if isinstance(token, cls):
            return token
        try:
            return cls(str(token).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown strategy {token!r}; expected one of "
                              + "|".join(k.value for k in cls)) from None


FA_STRATEGIES = (StrategyKind.DSPS, StrategyKind.DEPS, StrategyKind.UCPS,
                 StrategyKind.USPS)


class Link(enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"

    @classmethod
    def parse(cls, token) -> "Link":
        if isinstance(token, cls):
            return token
        t = str(token).strip().lower()
        aliases = {"dl": "downlink", "ul": "uplink"}
        try:
            return cls(aliases.get(t, t))
        except ValueError:
            raise ConfigError(f"unknown link {token!r}; expected downlink|uplink") from None


def fpa_antennas(W: float) -> int:
    """Number of uncorrelated fixed antennas fitting in ``W`` wavelengths."""
    if not W > 0:
        raise ConfigError(f"W must be > 0, got {W!r}")
    return int(math.floor(2.0 * W)) + 1


@dataclass(frozen=True)
class Strategy:
    """A selection rule; ``K`` is the antenna count of the FPA-SC baseline."""

    kind: StrategyKind
    K: int | None = None

    @classmethod
    def for_config(cls, kind, cfg: SystemConfig, K: int | None = None) -> "Strategy":
        kind = StrategyKind.parse(kind)
        if kind is not StrategyKind.FPA_SC:
            return cls(kind)
        limit = fpa_antennas(cfg.W)
        K = limit if K is None else int(K)
        if not 1 <= K <= limit:
            raise ConfigError(f"FPA-SC needs 1 <= K <= floor(2W)+1 = {limit}, got {K}")
        return cls(kind, K)


_SELECTION_METRIC = {
    StrategyKind.DSPS: "sir",
    StrategyKind.DEPS: "ehp",
    StrategyKind.UCPS: "beta",
    StrategyKind.USPS: "ul_snr",
}


def selection_metric(kind, m) -> np.ndarray:
    kind = StrategyKind.parse(kind)
    if kind is StrategyKind.FPA_SC:
        raise ConfigError("FPA-SC selects per link; use fpa_sc_baseline")
    return getattr(m, _SELECTION_METRIC[kind])


def select_port(kind, m) -> np.ndarray:
    """Index of the selected port for every draw (lowest index on ties)."""
    values = np.asarray(selection_metric(kind, m))
    if values.shape[-1] == 0:
        raise ConfigError("no ports to select from")
    return np.argmax(values, axis=-1)


def take_selected(values, port) -> np.ndarray:
    """``values[t, port[t]]`` for every draw ``t``."""
    values = np.asarray(values)
    port = np.asarray(port)
    if values.ndim == 1:
        return values[port]
    return np.take_along_axis(values, port[..., None], axis=-1)[..., 0]


def fpa_sc_config(cfg: SystemConfig, K: int) -> tuple[SystemConfig, BlockStructure]:
    """Config and blocks describing K independent fixed antennas.

    Independent ports are the block model with one port per block; the
    common component is switched off by a vanishing ``mu2``.
    """
    return cfg.with_(N=int(K), mu2=1e-300), single_block_sizes(K)


def fpa_sc_baseline(cfg: SystemConfig, K: int, link, rng, trials: int = 1) -> np.ndarray:
    """Selected-antenna metric of a K-antenna selection-combining receiver.

    Downlink selects and returns the best SIR; uplink the best uplink SNR.
    """
    from .channel import metrics

    link = Link.parse(link)
    if int(K) != K or K < 1:
        raise ConfigError(f"K must be an integer >= 1, got {K!r}")
    sc_cfg, sc_blocks = fpa_sc_config(cfg, K)
    m = metrics(sc_cfg, sample_draw(sc_cfg, sc_blocks, rng, trials))
    if link is Link.DOWNLINK:
        return m.sir.max(axis=-1)
    return m.ul_snr.max(axis=-1)
