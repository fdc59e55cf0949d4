"""Sweep scenarios: built-in figure set and a plain key=value file format.

A scenario file holds one ``key = value`` per line; ``#`` starts a
comment. Lists are comma separated and a grid may also be given as an
inclusive range ``start:stop:step``. Example::

    name = my-sweep
    kind = outage
    sweep_var = gamma_ul_db
    grid = -5:15:5
    strategies = dsps, usps
    links = uplink
    methods = mc, glq, nested
    pt_dbm = 20
    d = 12
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import SystemConfig
from .errors import ConfigError
from .montecarlo import METHODS
from .strategy import Link, StrategyKind

KINDS = ("outage", "threshold", "eigen")
MODELS = ("block", "jakes")
CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(SystemConfig))
_INT_CONFIG = ("M", "N")

# sweep variables understood per scenario kind
SWEEP_VARS = {
    "outage": ("gamma_dl_db", "gamma_ul_db") + CONFIG_KEYS,
    "threshold": ("p", "L", "b"),
    "eigen": ("N",),
}


@dataclass(frozen=True)
class Scenario:
    name: str
    sweep_var: str
    grid: tuple
    kind: str = "outage"
    strategies: tuple = ("dsps",)
    links: tuple = ("downlink",)
    methods: tuple = ("mc",)
    overrides: dict = field(default_factory=dict)
    gamma_dl_db: float = 0.0
    gamma_ul_db: float = 0.0
    trials: int = 100_000
    seed: int = 1
    eps: float = 1.0
    fpa_k: int | None = None
    model: str = "block"
    # threshold-figure parameters
    b: float = 100.0
    L: int = 4
    p: int = 4

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ConfigError(f"scenario name must be a non-empty token, got {self.name!r}")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of "
                              + "|".join(KINDS))
        if self.sweep_var not in SWEEP_VARS[self.kind]:
            raise ConfigError(f"unknown sweep_var {self.sweep_var!r} for kind "
                              f"{self.kind!r}; expected one of "
                              + "|".join(SWEEP_VARS[self.kind]))
        if len(self.grid) == 0:
            raise ConfigError(f"scenario {self.name!r} has an empty grid")
        for v in self.grid:
            if not math.isfinite(v) and not (v == -math.inf and self.sweep_var.startswith("gamma")):
                raise ConfigError(f"grid value {v!r} is not finite")
        for s in self.strategies:
            StrategyKind.parse(s)
        for link in self.links:
            Link.parse(link)
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of " + "|".join(METHODS))
        for k in self.overrides:
            if k not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {k!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected block|jakes")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        # fail early on configs that cannot be built
        self.base_config()

    def base_config(self) -> SystemConfig:
        return SystemConfig(**self.overrides)

    def point_config(self, value) -> SystemConfig:
        """Config at one grid value (threshold sweeps leave it unchanged)."""
        cfg = self.base_config()
        if self.kind == "outage" and self.sweep_var in CONFIG_KEYS:
            v = int(value) if self.sweep_var in _INT_CONFIG else float(value)
            cfg = cfg.with_(**{self.sweep_var: v})
        return cfg

    def thresholds(self, value) -> tuple:
        """(downlink dB, uplink dB) thresholds at one grid value."""
        dl, ul = self.gamma_dl_db, self.gamma_ul_db
        if self.sweep_var == "gamma_dl_db":
            dl = float(value)
        elif self.sweep_var == "gamma_ul_db":
            ul = float(value)
        return dl, ul

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


def _range(start, stop, step):
    n = int(round((stop - start) / step))
    return tuple(float(start + i * step) for i in range(n + 1))


_UL_COMMON = dict(strategies=("dsps", "deps", "ucps", "usps"), links=("uplink",))

BUILTIN = {
    "fig3": Scenario(
        "fig3", "gamma_dl_db", _range(-10, 20, 2),
        strategies=("dsps", "deps", "ucps", "usps", "fpa-sc"), links=("downlink",),
        methods=("mc", "glq", "sfa", "sfa2", "closed"),
        overrides=dict(M=4, N=50, W=3.0)),
    "fig4": Scenario(
        "fig4", "M", _range(2, 8, 1),
        strategies=("dsps", "deps", "ucps", "usps"), links=("downlink",),
        methods=("mc", "glq", "sfa2", "closed"), gamma_dl_db=1.0,
        overrides=dict(N=50, W=5.0)),
    "fig5": Scenario(
        "fig5", "gamma_ul_db", _range(-5, 15, 2.5), **_UL_COMMON,
        methods=("mc", "glq", "nested", "closed", "sfa"),
        overrides=dict(pt_dbm=20.0, N=50, M=4, W=4.0, d=12.0)),
    "fig6": Scenario(
        "fig6", "pt_dbm", _range(10, 30, 2.5),
        strategies=("dsps", "deps", "ucps", "usps", "fpa-sc"), links=("uplink",),
        methods=("mc", "glq", "nested", "closed", "sfa"), gamma_ul_db=10.0,
        overrides=dict(N=50, M=4, W=4.0, d=18.0)),
    "fig7": Scenario(
        "fig7", "M", _range(2, 8, 1), **_UL_COMMON,
        methods=("mc", "glq", "nested", "closed", "sfa"), gamma_ul_db=5.0,
        overrides=dict(pt_dbm=20.0, N=50, W=5.0, d=22.0)),
    "fig8": Scenario(
        "fig8", "W", (1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0), **_UL_COMMON,
        methods=("mc", "glq", "nested", "closed", "lb", "lb-closed"), gamma_ul_db=10.0,
        overrides=dict(M=4, N=50, pt_dbm=25.0, d=21.0)),
    "fig9": Scenario(
        "fig9", "N", _range(15, 60, 5), **_UL_COMMON,
        methods=("mc", "glq", "nested", "closed", "sfa"), gamma_ul_db=8.0,
        overrides=dict(M=5, pt_dbm=25.0, W=3.0, d=20.0)),
    "fig10": Scenario("fig10", "p", _range(1, 8, 1), kind="threshold",
                      methods=(), strategies=(), links=(), b=100.0, L=4),
    "fig11": Scenario("fig11", "L", _range(1, 10, 1), kind="threshold",
                      methods=(), strategies=(), links=(), b=100.0, p=4),
    "fig12": Scenario("fig12", "N", (10.0, 50.0, 150.0), kind="eigen",
                      methods=(), strategies=(), links=(), overrides=dict(W=3.0)),
}


# ---------------------------------------------------------------------------
# key=value files
# ---------------------------------------------------------------------------

_LIST_KEYS = ("strategies", "links", "methods")
_FLOAT_KEYS = ("gamma_dl_db", "gamma_ul_db", "eps", "b")
_INT_KEYS = ("trials", "seed", "fpa_k", "L", "p")
_TEXT_KEYS = ("name", "kind", "sweep_var", "model")
SCENARIO_KEYS = _LIST_KEYS + _FLOAT_KEYS + _INT_KEYS + _TEXT_KEYS + ("grid",) + CONFIG_KEYS


def _number(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def _integer(key, text):
    v = _number(key, text)
    if not v.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def parse_grid(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range must be start:stop:step, got {text!r}")
        start, stop, step = (_number("grid", p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"grid range needs step > 0 and stop >= start: {text!r}")
        return _range(start, stop, step)
    return tuple(_number("grid", p) for p in text.split(",") if p.strip())


def parse_scenario_text(text: str, default_name: str = "custom") -> Scenario:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    if "sweep_var" not in raw:
        raise ConfigError("scenario lacks sweep_var")
    if "grid" not in raw:
        raise ConfigError("scenario lacks grid")
    kw, overrides = {}, {}
    for key, value in raw.items():
        if key == "grid":
            kw["grid"] = parse_grid(value)
        elif key in _LIST_KEYS:
            kw[key] = tuple(s.strip().lower() for s in value.split(",") if s.strip())
        elif key in _FLOAT_KEYS:
            kw[key] = _number(key, value)
        elif key in _INT_KEYS:
            kw[key] = _integer(key, value)
        elif key in _TEXT_KEYS:
            kw[key] = value
        elif key in _INT_CONFIG:
            overrides[key] = _integer(key, value)
        else:
            overrides[key] = _number(key, value)
    kw.setdefault("name", default_name)
    name, sweep_var, grid = kw.pop("name"), kw.pop("sweep_var"), kw.pop("grid")
    try:
        return Scenario(name, sweep_var, grid, overrides=overrides, **kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_scenario(source: str) -> Scenario:
    """A built-in name (``fig3`` .. ``fig12``) or a path to a scenario file."""
    if source in BUILTIN:
        return BUILTIN[source]
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"unknown scenario {source!r}: not a built-in "
                          f"({', '.join(BUILTIN)}) and no such file")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {source!r}: {exc}") from None
    return parse_scenario_text(text, default_name=path.stem)


__all__ = ["BUILTIN", "CONFIG_KEYS", "KINDS", "SCENARIO_KEYS", "SWEEP_VARS", "Scenario",
           "load_scenario", "parse_grid", "parse_scenario_text"]
