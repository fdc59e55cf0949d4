"""Step-function thresholds for ``[1 - Q_p(a, b)]^L`` viewed as a function of a.

For large ``a`` and ``b`` the expression drops from 1 to 0 over a window of
width O(1) around ``a = b``; replacing it by the indicator ``a < delta``
turns Marcum-Q integrals into incomplete gamma functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .. import specfun
from ..errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)

CONTEXTS = ("delta_b_L", "delta_b", "dsps", "dsps_tilde", "deps", "ucps",
            "usps", "usps_tilde")


@dataclass(frozen=True)
class SfaThreshold:
    value: float
    context: str

    def __post_init__(self):
        if self.context not in CONTEXTS:
            raise DomainError(f"unknown threshold context {self.context!r}")


def threshold_general(b, L, p):
    """Linearized inflection point of ``[1 - Q_p(a, b)]^L`` (any L >= 1)."""
    b = np.asarray(b, dtype=float)
    c = (L - 1) / SQRT_2PI
    q = p - 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        return b + (c * b + q) / (c * q + q / b - b)


def threshold_single(b, p):
    """Threshold of ``1 - Q_p(a, b)`` from the quadratic ``d^2 - b d - (p - 1/2) = 0``."""
    b = np.asarray(b, dtype=float)
    return 0.5 * (b + np.sqrt(b * b + 4.0 * p - 2.0))


def step_threshold(b, L, p):
    """Vectorized step threshold: the single-port form at L = 1 (where the
    general expression has a pole at b^2 = p - 1/2), else the general one."""
    if L == 1:
        return threshold_single(b, p)
    return threshold_general(b, L, p)


def sfa_threshold(b: float, L: int, p: int) -> SfaThreshold:
    """Step threshold for ``[1 - Q_p(a, b)]^L``."""
    if not b > 0 or not math.isfinite(b):
        raise DomainError(f"b must be a positive finite number, got {b!r}")
    if int(L) != L or L < 1:
        raise DomainError(f"L must be an integer >= 1, got {L!r}")
    if int(p) != p or p < 1:
        raise DomainError(f"p must be an integer >= 1, got {p!r}")
    if L == 1:
        return SfaThreshold(float(threshold_single(b, p)), "delta_b")
    return SfaThreshold(float(threshold_general(b, L, p)), "delta_b_L")


def _curvature_balance(a, b, L, p):
    """Zero exactly where d^2/da^2 [1 - Q_p(a, b)]^L vanishes.

    Writes F'' = 0 as (L-1) Q_a / (1 - Q) = d/da log Q_a with
    d/da log Q_a = 1/a - a + b I_{p+1}(ab) / I_p(ab). Vectorized in ``a``.
    """
    a = np.asarray(a, dtype=float)
    ab = a * b
    ratio = special.ive(p + 1, ab) / special.ive(p, ab)
    rhs = 1.0 / a - a + b * ratio
    if L == 1:
        return -rhs
    log_qa = (p * math.log(b) + (1 - p) * np.log(a) - 0.5 * (a - b) ** 2
              + np.log(special.ive(p, ab)))
    cdf = -np.expm1(specfun.log_marcum_q(p, a, np.full_like(a, b)))
    with np.errstate(divide="ignore"):
        lhs = (L - 1) * np.exp(log_qa - np.log(cdf))
    # where the cdf rounds to 0 the power has already dropped to 0
    return np.where(cdf == 0.0, np.inf, lhs - rhs)


def inflection_point(b: float, L: int, p: int) -> float:
    """Numerical inflection point in ``a`` of ``[1 - Q_p(a, b)]^L``."""
    if not b > 0:
        raise DomainError(f"b must be > 0, got {b!r}")
    grid = np.linspace(max(1e-3, b - 4.0 * math.sqrt(b) - 10.0), b + 10.0, 400)
    sign = np.sign(_curvature_balance(grid, b, L, p))
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if idx.size == 0:
        raise DomainError(f"no inflection point found for b={b}, L={L}, p={p}")
    # the drop from 1 to 0 is the last curvature change
    i = idx[-1]
    f = lambda a: float(_curvature_balance(np.array([a]), b, L, p)[0])  # noqa: E731
    return float(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-12, rtol=1e-14))
