"""Downlink outage evaluators (SIR below a threshold)."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .. import specfun
from ..channel import SystemConfig
from .common import (block_product, estimate, linear_threshold, require_users,
                     resolve_blocks, resolve_rule)
from .thresholds import SQRT_2PI, threshold_single


def sir_cdf_conditional(gamma, M, kappa2, r, rt):
    """P(X < gamma Y) for one port given its block's common components.

    X is noncentral chi-square with 2 degrees of freedom and noncentrality
    ``2 kappa2 r``; Y has ``2 (M - 1)`` degrees of freedom and noncentrality
    ``2 kappa2 rt``. ``r`` and ``rt`` must be positive and broadcast.
    """
    r, rt = np.broadcast_arrays(np.asarray(r, float), np.asarray(rt, float))
    if gamma <= 0:
        return np.zeros(r.shape)
    g1 = gamma + 1.0
    a = np.sqrt(2.0 * kappa2 * gamma * rt / g1)
    b = np.sqrt(2.0 * kappa2 * r / g1)
    q = specfun.marcum_q(M - 1, a, b)
    z = 2.0 * kappa2 * np.sqrt(gamma * r * rt) / g1
    # exp(-kappa2 (gamma rt + r) / g1) I_k(z) = exp(base) ive(k, z)
    base = -kappa2 * (np.sqrt(gamma * rt) - np.sqrt(r)) ** 2 / g1
    log_ratio = 0.5 * (np.log(r) - np.log(rt))
    log_g, log_g1 = math.log(gamma), math.log(g1)
    total = np.zeros(r.shape)
    log_ive = {}
    for l in range(M - 1):
        for j in range(M - l - 1):
            k = j + l
            if k not in log_ive:
                with np.errstate(divide="ignore"):
                    log_ive[k] = np.log(special.ive(k, z))
            # rising factorial (M - k - 1)_j over j!
            coef = math.lgamma(M - l - 1) - math.lgamma(M - k - 1) - math.lgamma(j + 1)
            total += np.exp(coef + k * log_ratio + l * log_g1 + 0.5 * (j - l) * log_g
                            + log_ive[k] + base - (M - 1) * log_g1)
    return np.clip(q - total, 0.0, 1.0)


def _kappa2(cfg):
    return cfg.mu2 / (1.0 - cfg.mu2)


def dsps_downlink_glq(cfg: SystemConfig, blocks=None, gamma_db=0.0, rule=None):
    """Exact DSPS downlink outage by tensor Gauss-Laguerre quadrature.

    Per block the common desired-link component ``r`` is Exp(1) and the
    interference one ``rt`` is Gamma(M-1); ports of a block are
    conditionally independent given both.
    """
    require_users(cfg, 2, "downlink SIR")
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    gamma = linear_threshold(gamma_db)
    if gamma == 0.0:
        return estimate(0.0, "glq")
    x, w = rule.nodes, rule.weights
    G = sir_cdf_conditional(gamma, cfg.M, _kappa2(cfg), x[:, None], x[None, :])
    wt = w * np.exp((cfg.M - 2) * np.log(x) - math.lgamma(cfg.M - 1))

    def per_size(L):
        return float(w @ (G ** L) @ wt)

    return estimate(block_product(blocks, per_size), "glq")


def dsps_threshold(cfg: SystemConfig, gamma, r):
    """Step position, in the interference amplitude, for desired strength r."""
    k2 = _kappa2(cfg)
    s = k2 * np.asarray(r, float) / (2.0 * gamma)
    return np.sqrt(s) + np.sqrt(s + 1.0 / (2.0 * gamma))


def dsps_threshold_tilde(cfg: SystemConfig, gamma, r, L):
    """Interference-strength threshold after the second step replacement."""
    d = dsps_threshold(cfg, gamma, r)
    scale = (1.0 - cfg.mu2) / (2.0 * cfg.mu2)
    if L == 1:
        # single-port form; the bracket below degenerates to d + q/d there
        return scale * threshold_single(d, cfg.M - 1) ** 2
    c = (L - 1) / SQRT_2PI
    q = cfg.M - 1.5
    return scale * (d + (c + q / d) / (c * q / d + 1.0)) ** 2


def dsps_downlink_sfa(cfg: SystemConfig, blocks=None, gamma_db=0.0, rule=None):
    """DSPS downlink outage with the conditional SIR CDF replaced by a step."""
    require_users(cfg, 2, "downlink SIR")
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    gamma = linear_threshold(gamma_db)
    if gamma == 0.0:
        return estimate(0.0, "sfa")
    x, w = rule.nodes, rule.weights
    a = np.sqrt(2.0 * _kappa2(cfg) * x)
    # rows: desired strength r, columns: interference strength rt
    Q = specfun.marcum_q(cfg.M - 1, a[None, :], dsps_threshold(cfg, gamma, x)[:, None])
    wt = w * np.exp((cfg.M - 2) * np.log(x) - math.lgamma(cfg.M - 1))

    def per_size(L):
        return float(w @ (Q ** L) @ wt)

    return estimate(block_product(blocks, per_size), "sfa")


def dsps_downlink_sfa2(cfg: SystemConfig, blocks=None, gamma_db=0.0, rule=None):
    """Single-integral DSPS downlink approximation (two step replacements)."""
    require_users(cfg, 2, "downlink SIR")
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    gamma = linear_threshold(gamma_db)
    if gamma == 0.0:
        return estimate(0.0, "sfa2")
    x, w = rule.nodes, rule.weights

    def per_size(L):
        t = dsps_threshold_tilde(cfg, gamma, x, L)
        return float(w @ special.gammaincc(cfg.M - 1, t))

    return estimate(block_product(blocks, per_size), "sfa2")


def single_port_downlink(M: int, gamma_db) -> float:
    """Outage of one port: SIR of Exp(1) over Gamma(M-1) below gamma."""
    gamma = linear_threshold(gamma_db)
    if M <= 1:
        return 0.0
    return float(-math.expm1(-(M - 1) * math.log1p(gamma)))


def deps_downlink_closed(M: int, gamma_db):
    """DEPS downlink outage: energy-based selection leaves the SIR untouched."""
    return estimate(single_port_downlink(int(M), gamma_db), "closed")


def ucps_downlink_closed(M: int, gamma_db):
    """UCPS downlink outage: selection uses only the independent uplink."""
    return estimate(single_port_downlink(int(M), gamma_db), "closed")


def usps_downlink_closed(M: int, gamma_db):
    """USPS downlink outage (SIR taken as independent of the selection)."""
    return estimate(single_port_downlink(int(M), gamma_db), "closed")
