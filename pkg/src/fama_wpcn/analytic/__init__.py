"""Analytic outage evaluators: quadrature forms, step-function
approximations, closed forms and bounds."""

from __future__ import annotations

from ..channel import SystemConfig
from ..errors import ConfigError, ModelError
from ..strategy import Link, StrategyKind
from .bounds import deps_uplink_lb, deps_uplink_lb_closed, ucps_uplink_lb, usps_uplink_lb
from .common import DEFAULT_ORDER, resolve_blocks, resolve_rule
from .downlink import (deps_downlink_closed, dsps_downlink_glq, dsps_downlink_sfa,
                       dsps_downlink_sfa2, single_port_downlink, sir_cdf_conditional,
                       ucps_downlink_closed, usps_downlink_closed)
from .thresholds import (SfaThreshold, inflection_point, sfa_threshold, step_threshold,
                         threshold_general, threshold_single)
from .uplink import (deps_uplink_glq, deps_uplink_sfa, dsps_uplink_closed,
                     product_closed_form, ucps_uplink_glq, ucps_uplink_sfa,
                     usps_uplink_nested, usps_uplink_sfa)

ANALYTIC_METHODS = ("glq", "sfa", "sfa2", "closed", "lb", "lb-closed", "nested")

_D, _U = Link.DOWNLINK, Link.UPLINK
_S = StrategyKind

# (strategy, link) -> {method: callable(cfg, blocks, gamma_db, rule)}
_TABLE = {
    (_S.DSPS, _D): {
        "glq": dsps_downlink_glq,
        "sfa": dsps_downlink_sfa,
        "sfa2": dsps_downlink_sfa2,
    },
    (_S.DEPS, _D): {"closed": lambda c, b, g, r: deps_downlink_closed(c.M, g)},
    (_S.UCPS, _D): {"closed": lambda c, b, g, r: ucps_downlink_closed(c.M, g)},
    (_S.USPS, _D): {"closed": lambda c, b, g, r: usps_downlink_closed(c.M, g)},
    (_S.DSPS, _U): {"closed": lambda c, b, g, r: dsps_uplink_closed(c, g)},
    (_S.DEPS, _U): {
        "glq": deps_uplink_glq,
        "sfa": deps_uplink_sfa,
        "lb": lambda c, b, g, r: deps_uplink_lb(c, g, r, blocks=b),
        "lb-closed": lambda c, b, g, r: deps_uplink_lb_closed(c, g, blocks=b),
    },
    (_S.UCPS, _U): {
        "glq": ucps_uplink_glq,
        "sfa": ucps_uplink_sfa,
        "lb": lambda c, b, g, r: ucps_uplink_lb(c, g, blocks=b),
    },
    (_S.USPS, _U): {
        "nested": usps_uplink_nested,
        "sfa": usps_uplink_sfa,
        "lb": lambda c, b, g, r: usps_uplink_lb(c, g, blocks=b),
    },
}


def available_methods(kind, link) -> tuple:
    """Analytic methods defined for a strategy and link (may be empty)."""
    key = (StrategyKind.parse(kind), Link.parse(link))
    return tuple(_TABLE.get(key, {}))


def evaluate(cfg: SystemConfig, kind, link, method: str, gamma_db, blocks=None,
             rule=None):
    """Dispatch to the evaluator for ``(kind, link, method)``."""
    kind, link = StrategyKind.parse(kind), Link.parse(link)
    method = str(method).strip().lower()
    if method not in ANALYTIC_METHODS:
        raise ConfigError(f"unknown analytic method {method!r}; expected one of "
                          + "|".join(ANALYTIC_METHODS))
    table = _TABLE.get((kind, link), {})
    if method not in table:
        raise ModelError(f"method {method!r} is not defined for {kind.value} "
                         f"{link.value}; available: {', '.join(table) or 'none'}")
    return table[method](cfg, resolve_blocks(cfg, blocks), gamma_db, resolve_rule(rule))


__all__ = [
    "ANALYTIC_METHODS", "DEFAULT_ORDER", "SfaThreshold", "available_methods",
    "deps_downlink_closed", "deps_uplink_glq", "deps_uplink_lb", "deps_uplink_lb_closed",
    "deps_uplink_sfa", "dsps_downlink_glq", "dsps_downlink_sfa", "dsps_downlink_sfa2",
    "dsps_uplink_closed", "evaluate", "inflection_point", "product_closed_form",
    "sfa_threshold", "single_port_downlink", "step_threshold", "sir_cdf_conditional", "threshold_general",
    "threshold_single", "ucps_downlink_closed", "ucps_uplink_glq", "ucps_uplink_lb",
    "ucps_uplink_sfa", "usps_downlink_closed", "usps_uplink_lb", "usps_uplink_nested",
    "usps_uplink_sfa",
]
