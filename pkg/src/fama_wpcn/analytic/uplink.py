"""Uplink outage evaluators (SNR at the access point below a threshold).

With alpha and beta the harvested-power and uplink gains scaled by
``1 / (1 - mu2)``, outage is ``alpha * beta < gamma_tilde``. Given the
block's common component, alpha is noncentral chi-square with ``2M``
degrees of freedom and noncentrality ``2 kappa2 r`` (r ~ Gamma(M)), beta
the same with 2 degrees of freedom (r ~ Exp(1)).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .. import specfun
from ..channel import SystemConfig, derived_params
from .common import block_product, estimate, linear_threshold, resolve_blocks, resolve_rule
from .thresholds import step_threshold


def _params(cfg, gamma_db):
    return derived_params(cfg, linear_threshold(gamma_db))


def _kappa2(cfg):
    return cfg.mu2 / (1.0 - cfg.mu2)


def _cdf_complement(p, a, b):
    """1 - Q_p(a, b) without cancellation when Q is small."""
    return 1.0 - specfun.marcum_q(p, a, b)


def _half_threshold(gamma_tilde, y):
    # amplitude threshold sqrt(gamma_tilde / (2 y)); y > 0 on GLQ nodes
    return np.sqrt(gamma_tilde / (2.0 * y))


def product_closed_form(M: int, z) -> float:
    """``1 - z^M K_M(z) / (2^(M-1) Gamma(M))``: P(A * E < z^2 / 4) for
    A ~ Gamma(M), E ~ Exp(1) independent."""
    if z <= 0:
        return 0.0
    log_t = M * math.log(z) + specfun.log_bessel_k(M, z) - (M - 1) * math.log(2.0) \
        - math.lgamma(M)
    return float(-math.expm1(log_t))


def dsps_uplink_closed(cfg: SystemConfig, gamma_ul_db):
    """DSPS uplink outage when the selected port's total gain is taken as
    independent of the SIR-based selection.

    Then alpha (1-mu2)/2 ~ Gamma(M) and beta (1-mu2)/2 ~ Exp(1), and the
    outage is P(product < gamma_hat) with ``z = sqrt(4 gamma_hat)``.
    """
    p = _params(cfg, gamma_ul_db)
    return estimate(product_closed_form(cfg.M, math.sqrt(4.0 * p.gamma_hat)), "closed")


def _deps_inner(cfg, blocks, gamma_tilde, rule, u):
    """prod_b E_r[(1 - Q_M(sqrt(2 kappa2 r), sqrt(gt/(2y))))^L_b] at y = u/(1-mu2)."""
    x, w = rule.nodes, rule.weights
    M = cfg.M
    amp = _half_threshold(gamma_tilde, np.asarray(u, float) / (1.0 - cfg.mu2))
    # rows: common component r, columns: outer node
    F = _cdf_complement(M, np.sqrt(2.0 * _kappa2(cfg) * x)[:, None], amp[None, :])
    wr = w * np.exp((M - 1) * np.log(x) - math.lgamma(M))
    inner = {L: wr @ F ** L for L in set(blocks.sizes)}
    prod = np.ones(amp.shape)
    for L in blocks.sizes:
        prod = prod * inner[L]
    return prod


def _drop_point(h, hi=50.0):
    """Smallest u (on a log scale) with h(u) <= h(0+)/2 for decreasing h."""
    lo = 1e-12
    if h(np.array([hi]))[0] > 0.5:
        return hi
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if h(np.array([mid]))[0] > 0.5:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.01:
            break
    return hi


def split_exponential_rule(rule, knee, pieces=(1 / 64, 1 / 16, 1 / 4, 1.0, 2.0, 4.0)):
    """Nodes and weights for int_0^inf e^-u h(u) du when h drops sharply
    near ``knee``.

    Gauss-Legendre panels of the rule's order cover [0, 4 knee], graded
    towards the drop; the remainder uses the Laguerre rule shifted to 4 knee.
    The e^-u factor is folded into the weights.
    """
    n = rule.order
    t, wt = np.polynomial.legendre.leggauss(n)
    edges = [0.0] + [knee * p for p in pieces]
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * t + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * wt * np.exp(-nodes[-1]))
    U = edges[-1]
    nodes.append(U + rule.nodes)
    weights.append(math.exp(-U) * rule.weights)
    return np.concatenate(nodes), np.concatenate(weights)


def split_exponential_integral(h, rule, knee, pieces=(1 / 64, 1 / 16, 1 / 4, 1.0, 2.0, 4.0)):
    """int_0^inf e^-u h(u) du for h with a sharp drop near ``knee``."""
    u, wu = split_exponential_rule(rule, knee, pieces)
    return float(wu @ h(u))


def deps_uplink_glq(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """DEPS uplink outage: P(max_n alpha_n < gamma_tilde / beta).

    beta at the selected port is exponential with rate (1-mu2)/2; the
    outer variable u = (1-mu2) beta / 2 carries the e^-u weight. The outer
    integrand falls from 1 to 0 around the u where gamma_tilde / beta meets
    the typical maximum of alpha, so the outer rule is split there.
    """
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "glq")

    def h(u):
        return _deps_inner(cfg, blocks, p.gamma_tilde, rule, u)

    knee = _drop_point(h)
    if knee >= 10.0:
        value = float(rule.weights @ h(rule.nodes))
    else:
        value = split_exponential_integral(h, rule, knee)
    return estimate(value, "glq")


def deps_threshold(cfg: SystemConfig, gamma_tilde, x, L):
    """Common-component threshold replacing [1 - Q_M(., sqrt(gt/(2x)))]^L."""
    b = _half_threshold(gamma_tilde, x)
    return (1.0 - cfg.mu2) / (2.0 * cfg.mu2) * step_threshold(b, L, cfg.M) ** 2


def deps_uplink_sfa(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """DEPS uplink outage with per-block step replacement (one integral)."""
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "sfa")
    x, w = rule.nodes, rule.weights
    y = x / (1.0 - cfg.mu2)
    prod = np.ones_like(x)
    for L in blocks.sizes:
        prod = prod * special.gammainc(cfg.M, deps_threshold(cfg, p.gamma_tilde, y, L))
    return estimate(float(w @ prod), "sfa")


def ucps_uplink_glq(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """UCPS uplink outage: P(max_n beta_n < gamma_tilde / alpha).

    alpha at the selected port is Gamma(M) with rate (1-mu2)/2; with
    u = (1-mu2) alpha / 2 the outer weight is u^(M-1) e^-u / Gamma(M).
    """
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "glq")
    x, w = rule.nodes, rule.weights
    M = cfg.M
    a_common = np.sqrt(2.0 * _kappa2(cfg) * x)[:, None]

    def prod(u):
        amp = _half_threshold(p.gamma_tilde, np.asarray(u, float) / (1.0 - cfg.mu2))
        F = _cdf_complement(1, a_common, amp[None, :])
        inner = {L: w @ F ** L for L in set(blocks.sizes)}
        out = np.ones(amp.shape)
        for L in blocks.sizes:
            out = out * inner[L]
        return out

    def h(u):
        with np.errstate(divide="ignore"):
            return prod(u) * np.exp((M - 1) * np.log(u) - math.lgamma(M))

    knee = _drop_point(prod)
    if knee >= 10.0 * M:
        value = float(w @ h(x))
    else:
        value = split_exponential_integral(h, rule, knee)
    return estimate(value, "glq")


def ucps_threshold(cfg: SystemConfig, gamma_tilde, y, L):
    b = _half_threshold(gamma_tilde, y)
    return (1.0 - cfg.mu2) / (2.0 * cfg.mu2) * step_threshold(b, L, 1) ** 2


def ucps_uplink_sfa(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """UCPS uplink outage with per-block step replacement (one integral)."""
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "sfa")
    x, w = rule.nodes, rule.weights
    y = x / (1.0 - cfg.mu2)
    prod = np.ones_like(x)
    for L in blocks.sizes:
        prod = prod * -np.expm1(-ucps_threshold(cfg, p.gamma_tilde, y, L))
    wu = w * np.exp((cfg.M - 1) * np.log(x) - math.lgamma(cfg.M))
    return estimate(float(wu @ prod), "sfa")


_KNEE_R = 1.0


def _beta_density_factor(kappa2, rt, z, log_w):
    """Quadrature weight times the density of beta/2 given the block's
    uplink common part, divided by e^-z.

    The factor exp(-kappa2 rt) I_0(2 sqrt(kappa2 rt z)) is formed from the
    scaled Bessel function and combined with the log weight so that
    nothing overflows.
    """
    arg = 2.0 * np.sqrt(kappa2 * rt * z)
    with np.errstate(divide="ignore"):
        return np.exp(np.log(special.ive(0, arg)) + arg - kappa2 * rt + log_w)


def usps_uplink_nested(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """USPS uplink outage P(max_n alpha_n beta_n < gamma_tilde).

    Per block: expectation over the common parts (r for alpha, rt for beta)
    of [P(alpha beta < gamma_tilde | r, rt)]^L, the inner probability being
    an integral over z = beta / 2.
    """
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "nested")
    x, w = rule.nodes, rule.weights
    M, k2 = cfg.M, _kappa2(cfg)
    # Q[r, z] and the beta/2 density factor D[rt, z]
    # beta/2 nodes graded around the drop of Q at the typical alpha common part
    z, wz = split_exponential_rule(rule, p.gamma_tilde / (4.0 * k2 * _KNEE_R))
    Q = specfun.marcum_q(M, np.sqrt(2.0 * k2 * x)[:, None],
                         _half_threshold(p.gamma_tilde, z)[None, :])
    with np.errstate(divide="ignore"):
        D = _beta_density_factor(k2, x[:, None], z[None, :], np.log(wz)[None, :])
    inner = np.clip(1.0 - Q @ D.T, 0.0, 1.0)   # [r, rt]
    wr = w * np.exp((M - 1) * np.log(x) - math.lgamma(M))

    def per_size(L):
        return float(wr @ inner ** L @ w)

    return estimate(block_product(blocks, per_size), "nested")


def usps_threshold(cfg: SystemConfig, gamma_tilde, r):
    """Uplink-amplitude threshold for given alpha common component r."""
    a = np.sqrt(2.0 * _kappa2(cfg) * np.asarray(r, float))
    return 2.0 * math.sqrt(gamma_tilde) / (a + np.sqrt(a * a + 4.0 * cfg.M - 2.0))


def usps_threshold_tilde(cfg: SystemConfig, gamma_tilde, r, L):
    d = usps_threshold(cfg, gamma_tilde, r)
    return (1.0 - cfg.mu2) / (2.0 * cfg.mu2) * step_threshold(d, L, 1) ** 2


def usps_uplink_sfa(cfg: SystemConfig, blocks=None, gamma_ul_db=0.0, rule=None):
    """USPS uplink outage after two step replacements (one integral per block)."""
    blocks = resolve_blocks(cfg, blocks)
    rule = resolve_rule(rule)
    p = _params(cfg, gamma_ul_db)
    if p.gamma_tilde == 0.0:
        return estimate(0.0, "sfa")
    x, w = rule.nodes, rule.weights
    wr = w * np.exp((cfg.M - 1) * np.log(x) - math.lgamma(cfg.M))

    def per_size(L):
        return 1.0 - float(wr @ np.exp(-usps_threshold_tilde(cfg, p.gamma_tilde, x, L)))

    return estimate(block_product(blocks, per_size), "sfa")
