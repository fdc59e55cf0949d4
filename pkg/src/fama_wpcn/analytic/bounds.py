"""Bounds on the uplink outage that replace the block structure by B
fully correlated blocks (common component only inside each block).

The alternating binomial sums are evaluated term-wise in log magnitude
and summed with ``math.fsum``. When the cancellation is too severe for
double precision the equivalent one-dimensional integral is used instead.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .. import specfun
from ..channel import SystemConfig
from .common import estimate, resolve_blocks, resolve_rule
from .uplink import _drop_point, _params, product_closed_form, split_exponential_integral

# accepted absolute rounding error of an alternating sum before falling back
SUM_TOLERANCE = 1e-12


def _blocks_count(cfg, blocks):
    return resolve_blocks(cfg, blocks).B


def _log_binom(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def alternating_sum(n: int, log_term):
    """``sum_{b=0}^{n} C(n, b) (-1)^b t(b)`` for positive ``t`` given as
    ``log t(b)``.

    Returns ``(value, error)`` where ``error`` bounds the rounding error
    from the magnitude of the largest term.
    """
    logs = [_log_binom(n, b) + log_term(b) for b in range(n + 1)]
    top = max(logs)
    terms = [(-1) ** b * math.exp(v) for b, v in enumerate(logs)]
    err = 4.0 * (n + 1) * np.finfo(float).eps * math.exp(top)
    return math.fsum(terms), err


def _halfline_quad(f, knee):
    """int_0^inf f(x) dx for f with a transition near ``knee``."""
    knee = max(knee, 1e-12)
    edges = [0.0, 0.1 * knee, knee, 10.0 * knee]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, a, b, limit=200, epsabs=1e-14, epsrel=1e-12)[0]
    total += integrate.quad(f, edges[-1], np.inf, limit=200, epsabs=1e-14,
                            epsrel=1e-12)[0]
    return total


def deps_uplink_lb(cfg: SystemConfig, gamma_ul_db=0.0, rule=None, blocks=None):
    """``int e^-x [P(M, gamma_hat / x)]^B dx``: each block reduced to its
    common component."""
    rule = resolve_rule(rule)
    B = _blocks_count(cfg, blocks)
    gh = _params(cfg, gamma_ul_db).gamma_hat
    if gh == 0.0:
        return estimate(0.0, "lb")

    def h(x):
        return special.gammainc(cfg.M, gh / np.asarray(x, float)) ** B

    knee = _drop_point(h)
    if knee >= 10.0:
        value = float(rule.weights @ h(rule.nodes))
    else:
        value = split_exponential_integral(h, rule, knee)
    return estimate(value, "lb")


def deps_uplink_lb_closed(cfg: SystemConfig, gamma_ul_db=0.0, blocks=None):
    """Closed form after ``P(M, x) >= (1 - exp(-d_M x))^M``,
    ``d_M = Gamma(1 + M)^(-1/M)``:

        sum_b C(BM, b) (-1)^b 2 sqrt(b c) K_1(2 sqrt(b c)),  c = d_M gamma_hat.
    """
    M = cfg.M
    B = _blocks_count(cfg, blocks)
    gh = _params(cfg, gamma_ul_db).gamma_hat
    if gh == 0.0:
        return estimate(0.0, "lb-closed")
    c = gh * math.exp(-math.lgamma(1.0 + M) / M)
    n = B * M

    def log_term(b):
        if b == 0:
            return 0.0
        z = 2.0 * math.sqrt(b * c)
        return math.log(z) + specfun.log_bessel_k(1, z)

    value, err = alternating_sum(n, log_term)
    if err > SUM_TOLERANCE or not 0.0 <= value <= 1.0:
        # same quantity as int e^-x (1 - e^(-c/x))^(BM) dx
        value = _halfline_quad(
            lambda x: math.exp(-x) * (-math.expm1(-c / x)) ** n if x > 0 else 0.0,
            c / math.log(n + 1.0))
    return estimate(value, "lb-closed")


def ucps_uplink_lb(cfg: SystemConfig, gamma_ul_db=0.0, blocks=None):
    """``sum_b C(B, b) (-1)^b z_b^M K_M(z_b) / (2^(M-1) Gamma(M))`` with
    ``z_b = sqrt(4 b gamma_hat)`` (the b = 0 term is 1)."""
    M = cfg.M
    B = _blocks_count(cfg, blocks)
    gh = _params(cfg, gamma_ul_db).gamma_hat
    if gh == 0.0:
        return estimate(0.0, "lb")
    norm = (M - 1) * math.log(2.0) + math.lgamma(M)

    def log_term(b):
        if b == 0:
            return 0.0
        z = math.sqrt(4.0 * b * gh)
        return M * math.log(z) + specfun.log_bessel_k(M, z) - norm

    value, err = alternating_sum(B, log_term)
    if err > SUM_TOLERANCE or not 0.0 <= value <= 1.0:
        # E_u[(1 - e^(-gamma_hat/u))^B], u ~ Gamma(M)
        def f(u):
            if u <= 0:
                return 0.0
            return math.exp((M - 1) * math.log(u) - u - math.lgamma(M)) \
                * (-math.expm1(-gh / u)) ** B
        value = _halfline_quad(f, max(gh / math.log(B + 1.0), float(M)))
    return estimate(value, "lb")


def usps_uplink_lb(cfg: SystemConfig, gamma_ul_db=0.0, blocks=None):
    """``[1 - z^M K_M(z) / (2^(M-1) Gamma(M))]^B`` with ``z = sqrt(4 gamma_hat)``."""
    B = _blocks_count(cfg, blocks)
    gh = _params(cfg, gamma_ul_db).gamma_hat
    single = product_closed_form(cfg.M, math.sqrt(4.0 * gh))
    return estimate(single ** B, "lb")


__all__ = ["alternating_sum", "deps_uplink_lb", "deps_uplink_lb_closed",
           "ucps_uplink_lb", "usps_uplink_lb"]
