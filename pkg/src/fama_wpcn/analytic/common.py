"""Shared plumbing for the analytic evaluators."""

from __future__ import annotations

import math

import numpy as np

from .. import specfun
from ..channel import BlockStructure, SystemConfig, db_to_linear, derive_blocks
from ..errors import ConfigError, DomainError, ModelError
from ..montecarlo import OutageEstimate

DEFAULT_ORDER = 96


def resolve_rule(rule) -> specfun.QuadratureRule:
    if rule is None:
        return specfun.gauss_laguerre(DEFAULT_ORDER)
    if isinstance(rule, specfun.QuadratureRule):
        return rule
    return specfun.gauss_laguerre(rule)


def resolve_blocks(cfg: SystemConfig, blocks, eps: float = 1.0) -> BlockStructure:
    if blocks is None:
        return derive_blocks(cfg.N, cfg.W, cfg.mu2, eps)
    if isinstance(blocks, BlockStructure):
        return blocks
    return BlockStructure(tuple(blocks))


def linear_threshold(gamma_db) -> float:
    g = float(gamma_db)
    if math.isnan(g) or g == math.inf:
        raise DomainError(f"threshold must be finite or -inf dB, got {gamma_db!r}")
    return 0.0 if g == -math.inf else float(db_to_linear(g))


def estimate(value, method: str) -> OutageEstimate:
    v = float(value)
    if not math.isfinite(v):
        raise DomainError(f"{method} evaluation produced a non-finite value")
    return OutageEstimate(min(max(v, 0.0), 1.0), 0, 0.0, method)


def block_product(blocks: BlockStructure, per_size) -> float:
    """``prod_b f(L_b)`` evaluating ``f`` once per distinct block size."""
    out = 1.0
    cache = {}
    for L in blocks.sizes:
        if L not in cache:
            cache[L] = per_size(L)
        out *= cache[L]
    return out


def require_users(cfg: SystemConfig, minimum: int, what: str):
    if cfg.M < minimum:
        raise ModelError(f"{what} needs M >= {minimum}, got M={cfg.M}")


def log_poch(x, n):
    """log of the rising factorial (x)_n for x > 0."""
    return math.lgamma(x + n) - math.lgamma(x)
