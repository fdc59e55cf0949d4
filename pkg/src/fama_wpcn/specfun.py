"""Special-function and quadrature kernels.

Every function broadcasts over numpy arrays and returns a Python float for
scalar input. Bessel and incomplete-gamma primitives are thin guards around
``scipy.special``; the generalized Marcum-Q function and the Gauss-Laguerre
rule are computed here.
"""

import functools
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .errors import ConfigError, DomainError

MAX_GLQ_ORDER = 256

# Terms more than this many nats below the running Marcum-Q sum are dropped.
_SERIES_CUTOFF = 38.0
# scipy's gammaincc keeps full relative accuracy above this; below it we
# switch to a log-space continued fraction.
_GAMMAQ_LOG_SWITCH = 1e-250


def _finite_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _nonneg_array(x, name):
    arr = _finite_array(x, name)
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0, got {x!r}")
    return arr


def _order(p, minimum, name="order"):
    if isinstance(p, (bool, np.bool_)) or int(p) != p or p < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {p!r}")
    return int(p)


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

def bessel_j0(x):
    """Zero-order Bessel function of the first kind."""
    arr = _finite_array(x, "x")
    return _out(special.j0(arr), x)


def bessel_i(p, x):
    """Modified Bessel function of the first kind ``I_p(x)`` for integer p >= 0.

    Overflows to ``inf`` for very large ``x``; use :func:`log_bessel_i` there.
    """
    p = _order(p, 0)
    arr = _nonneg_array(x, "x")
    return _out(special.iv(p, arr), x)


def log_bessel_i(p, x):
    """``log I_p(x)``, finite for all x > 0 (``-inf`` at x = 0 when p >= 1)."""
    p = _order(p, 0)
    arr = _nonneg_array(x, "x")
    flat = np.atleast_1d(arr).ravel()
    with np.errstate(divide="ignore"):
        out = np.log(special.ive(p, flat)) + flat
    # ive underflows for tiny x and large p; use the leading series term
    small = (out == -np.inf) & (flat > 0)
    if np.any(small):
        out[small] = p * np.log(0.5 * flat[small]) - special.gammaln(p + 1.0)
    return _out(out.reshape(arr.shape), x)


def bessel_k(p, x):
    """Modified Bessel function of the second kind ``K_p(x)``, x > 0."""
    p = _order(p, 0)
    arr = _finite_array(x, "x")
    if np.any(arr <= 0):
        raise DomainError(f"bessel_k requires x > 0, got {x!r}")
    return _out(special.kv(p, arr), x)


def log_bessel_k(p, x):
    """``log K_p(x)`` for x > 0 without overflow or underflow."""
    p = _order(p, 0)
    arr = _finite_array(x, "x")
    if np.any(arr <= 0):
        raise DomainError(f"log_bessel_k requires x > 0, got {x!r}")
    flat = np.atleast_1d(arr).ravel()
    with np.errstate(divide="ignore", over="ignore"):
        out = np.log(special.kve(p, flat)) - flat
    big = ~np.isfinite(out)
    if np.any(big):
        # small-argument limit K_p(x) ~ Gamma(p)/2 (2/x)^p
        xs = flat[big]
        if p == 0:
            out[big] = np.log(-np.log(0.5 * xs) - np.euler_gamma)
        else:
            out[big] = special.gammaln(p) - np.log(2.0) + p * np.log(2.0 / xs)
    return _out(out.reshape(arr.shape), x)


# ---------------------------------------------------------------------------
# Incomplete gamma functions
# ---------------------------------------------------------------------------

def _gamma_args(a, x):
    a_arr = _finite_array(a, "a")
    if np.any(a_arr <= 0):
        raise DomainError(f"incomplete gamma requires a > 0, got {a!r}")
    x_arr = _nonneg_array(x, "x")
    return a_arr, x_arr


def lower_incomplete_gamma(a, x):
    """Lower incomplete gamma ``Phi(a, x) = int_0^x t^(a-1) e^-t dt``."""
    a_arr, x_arr = _gamma_args(a, x)
    out = special.gammainc(a_arr, x_arr) * special.gamma(a_arr)
    return _out(out, np.broadcast(a_arr, x_arr))


def upper_incomplete_gamma(a, x):
    """Upper incomplete gamma ``Gamma(a, x) = int_x^inf t^(a-1) e^-t dt``."""
    a_arr, x_arr = _gamma_args(a, x)
    out = special.gammaincc(a_arr, x_arr) * special.gamma(a_arr)
    return _out(out, np.broadcast(a_arr, x_arr))


def regularized_gamma_p(a, x):
    a_arr, x_arr = _gamma_args(a, x)
    return _out(special.gammainc(a_arr, x_arr), np.broadcast(a_arr, x_arr))


def regularized_gamma_q(a, x):
    a_arr, x_arr = _gamma_args(a, x)
    return _out(special.gammaincc(a_arr, x_arr), np.broadcast(a_arr, x_arr))


def _log_gamma_q_cf(s, x, max_iter=500):
    """log Q(s, x) by the Legendre continued fraction (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = np.full_like(b, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return -x + s * np.log(x) - special.gammaln(s) + np.log(h)


def log_regularized_gamma_q(s, x):
    """``log Q(s, x)``, accurate deep into the upper tail where Q underflows."""
    s_arr, x_arr = _gamma_args(s, x)
    s_b, x_b = np.broadcast_arrays(s_arr, x_arr)
    s_f = np.atleast_1d(s_b).ravel()
    x_f = np.atleast_1d(x_b).ravel()
    q = special.gammaincc(s_f, x_f)
    with np.errstate(divide="ignore"):
        out = np.log(q)
    tail = q < _GAMMAQ_LOG_SWITCH
    if np.any(tail):
        out[tail] = _log_gamma_q_cf(s_f[tail], x_f[tail])
    return _out(out.reshape(s_b.shape), s_b)


# ---------------------------------------------------------------------------
# Generalized Marcum-Q
# ---------------------------------------------------------------------------

_STEPS_PER_CHECK = 8


def _mixture_forward(p, lam, x, k):
    """Sum T_k = Pois(k; lam) Q(p + k, x) upward from ``k``.

    With D_k = Pois(k; lam) x^(p+k) e^-x / Gamma(p+k+1) the pair obeys
    T_{k+1} = lam/(k+1) (T_k + D_k) and D_{k+1} = D_k lam x/((k+1)(p+k+1)),
    both positive updates. Values are held relative to exp(ref) and
    rescaled before they overflow. Because Q(s, x) is log-concave in s the
    ratio T_{k+1}/T_k never increases, which bounds both truncated tails.

    Returns (log_sum, lower_tail_ok).
    """
    s = p + k
    log_w = k * np.log(lam) - lam - special.gammaln(k + 1.0)
    log_u = log_regularized_gamma_q(s, x)
    log_d = s * np.log(x) - x - special.gammaln(s + 1.0)
    ref = log_w + log_u
    t = np.ones_like(lam)
    d = np.exp(log_w + log_d - ref)
    total = np.ones_like(lam)
    # ratio T_{k0+1}/T_{k0}, used to bound the terms below the start
    first_ratio = lam / (k + 1.0) * (1.0 + d)

    out_total = np.empty_like(lam)
    out_ref = np.empty_like(lam)
    idx = np.arange(lam.size)
    cut = np.exp(-_SERIES_CUTOFF)
    lam_a, x_a = lam, x
    ln_scale = 200.0 * np.log(10.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while idx.size:
            # a few unchecked steps between reductions; running past
            # convergence only adds negligible terms
            for _ in range(_STEPS_PER_CHECK):
                kp1 = k + 1.0
                t_prev = t
                t = lam_a / kp1 * (t + d)
                d = d * lam_a * x_a / (kp1 * (s + 1.0))
                k = kp1
                s = s + 1.0
                total = total + t
            rho = t / t_prev
            tail = t * rho / (1.0 - rho)
            big = total > 1e200
            if big.any():
                scale = np.where(big, 1e-200, 1.0)
                t, d, total = t * scale, d * scale, total * scale
                ref = ref + np.where(big, ln_scale, 0.0)
            done = ((rho < 1.0) & (tail < total * cut)) | (t == 0.0)
            if done.any():
                out_total[idx[done]] = total[done]
                out_ref[idx[done]] = ref[done]
                keep = ~done
                idx, k, s, t, d, total, ref = (idx[keep], k[keep], s[keep], t[keep],
                                               d[keep], total[keep], ref[keep])
                lam_a, x_a = lam_a[keep], x_a[keep]
    log_sum = out_ref + np.log(out_total)
    with np.errstate(divide="ignore", invalid="ignore"):
        below = np.where(first_ratio > 1.0,
                         np.log(1.0 / (first_ratio - 1.0)), np.inf)
    # terms under the start sum to at most T_start / (ratio - 1)
    lower_ok = below + (log_w + log_u) < log_sum - _SERIES_CUTOFF
    return log_sum, lower_ok


def _log_marcum_series(p, lam, x):
    # Q_p = sum_k Pois(k; lam) Q(p + k, x); start well below the peak of the
    # product and walk upward. In the upper tail the term ratio is about
    # lam x / ((k+1)(k+p)), which puts the peak near sqrt(lam x).
    upper = x > p + lam
    peak = np.where(upper,
                    np.sqrt(lam * x + 0.25 * (p - 1) ** 2) - 0.5 * (p + 1), lam)
    peak = np.maximum(peak, 0.0)
    width = 12.0 * np.sqrt(np.maximum(peak, lam) + 1.0) + 10.0
    k_start = np.maximum(0.0, np.floor(peak - width))
    out = np.empty_like(lam)
    pending = np.arange(lam.size)
    while pending.size:
        ks = k_start[pending]
        log_sum, lower_ok = _mixture_forward(p, lam[pending], x[pending], ks)
        out[pending] = log_sum
        redo = ~(lower_ok | (ks == 0))
        pending = pending[redo]
        k_start[pending] = np.maximum(0.0, k_start[pending] - 2 * width[pending])
    return np.minimum(out, 0.0)


def _log_q_chernoff(p, lam, x):
    """Chernoff upper bound on log Q_p for x > p + lam (0 elsewhere)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(lam > 0,
                     (np.sqrt(p * p + 4.0 * lam * x) - p) / (2.0 * np.maximum(lam, 1e-300)),
                     x / p)
        t = 1.0 - 1.0 / v
        bound = -t * x + p * np.log(v) + lam * (v - 1.0)
    return np.where(x > p + lam, np.minimum(bound, 0.0), 0.0)


def log_marcum_q(p, a, b):
    """``log Q_p(a, b)`` of the generalized Marcum-Q function, integer p >= 1.

    Evaluated as the Poisson mixture of upper regularized gamma functions,
    accumulated in log space so that values far below the double range stay
    representable.
    """
    p = _order(p, 1)
    a_arr = _nonneg_array(a, "a")
    b_arr = _nonneg_array(b, "b")
    a_b, b_b = np.broadcast_arrays(a_arr, b_arr)
    lam = 0.5 * a_b.ravel() ** 2
    x = 0.5 * b_b.ravel() ** 2
    out = np.zeros(lam.size)
    central = (lam == 0) & (x > 0)
    if np.any(central):
        out[central] = log_regularized_gamma_q(float(p), x[central])
    general = (lam > 0) & (x > 0)
    if np.any(general):
        out[general] = _log_marcum_series(p, lam[general], x[general])
    return _out(out.reshape(a_b.shape), a_b)


def marcum_q(p, a, b):
    """Generalized Marcum-Q function ``Q_p(a, b)`` in [0, 1], integer p >= 1.

    Values below the smallest subnormal are returned as 0 without running
    the series.
    """
    p = _order(p, 1)
    a_arr = _nonneg_array(a, "a")
    b_arr = _nonneg_array(b, "b")
    a_b, b_b = np.broadcast_arrays(a_arr, b_arr)
    flat_a, flat_b = a_b.ravel(), b_b.ravel()
    out = np.zeros(flat_a.size)
    live = _log_q_chernoff(p, 0.5 * flat_a ** 2, 0.5 * flat_b ** 2) > -750.0
    if np.any(live):
        out[live] = np.exp(log_marcum_q(p, flat_a[live], flat_b[live]))
    return _out(np.clip(out, 0.0, 1.0).reshape(a_b.shape), a_b)


def marcum_q_derivative_a(p, a, b):
    """``dQ_p(a, b)/da = b^p a^(1-p) exp(-(a^2+b^2)/2) I_p(ab)`` for a, b > 0."""
    p = _order(p, 1)
    a_arr = _nonneg_array(a, "a")
    b_arr = _nonneg_array(b, "b")
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise DomainError("marcum_q_derivative_a requires a, b > 0")
    log_val = (p * np.log(b_arr) + (1 - p) * np.log(a_arr)
               - 0.5 * (a_arr - b_arr) ** 2
               + np.log(special.ive(p, a_arr * b_arr)))
    return _out(np.exp(log_val), np.broadcast(a_arr, b_arr))


def nuttall_integral(a, b, c):
    """Closed form of ``int_0^inf Q_1(a sqrt(x), b) exp(-c x) dx``."""
    a_arr = _nonneg_array(a, "a")
    b_arr = _nonneg_array(b, "b")
    c_arr = _finite_array(c, "c")
    if np.any(c_arr <= 0):
        raise DomainError(f"nuttall_integral requires c > 0, got {c!r}")
    a2, b2 = a_arr ** 2, b_arr ** 2
    out = (np.exp(-0.5 * b2) / c_arr
           + np.exp(-c_arr * b2 / (a2 + 2 * c_arr)) / c_arr
           * -np.expm1(-a2 * b2 / (2 * a2 + 4 * c_arr)))
    return _out(out, np.broadcast(a_arr, b_arr, c_arr))


# ---------------------------------------------------------------------------
# Gauss-Laguerre quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule for ``int_0^inf f(x) exp(-x) dx``.

    ``log_weights`` is exact for every order; ``weights`` is its exponential
    and flushes to zero where a weight is below the double range (orders
    above roughly 170).
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray

    def integrate(self, f):
        """Apply the rule to ``f``, which is called once with all nodes."""
        return float(np.dot(self.weights, f(self.nodes)))

    def scaled(self, rate):
        """Nodes and weights for ``int_0^inf f(x) exp(-rate x) dx``."""
        return self.nodes / rate, self.weights / rate


def _laguerre_tail(n, x):
    """Return (L_n(x), L_{n-1}(x), log_scale) with both values divided by
    ``exp(log_scale)`` to stay inside the double range."""
    prev = np.ones_like(x)
    cur = 1.0 - x
    log_scale = np.zeros_like(x)
    if n == 0:
        return prev, np.zeros_like(x), log_scale
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
        big = np.abs(cur) > 1e150
        if np.any(big):
            cur = np.where(big, cur * 1e-150, cur)
            prev = np.where(big, prev * 1e-150, prev)
            log_scale = log_scale + np.where(big, 150 * np.log(10.0), 0.0)
    return cur, prev, log_scale


@functools.lru_cache(maxsize=None)
def gauss_laguerre(order):
    """Gauss-Laguerre nodes and weights (Golub-Welsch plus Newton polish)."""
    if isinstance(order, (bool, np.bool_)) or int(order) != order:
        raise ConfigError(f"quadrature order must be an integer, got {order!r}")
    n = int(order)
    if not 1 <= n <= MAX_GLQ_ORDER:
        raise ConfigError(
            f"quadrature order must be in [1, {MAX_GLQ_ORDER}], got {order!r}")
    diag = 2.0 * np.arange(n) + 1.0
    off = np.arange(1, n, dtype=float)
    nodes = linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    for _ in range(4):
        ln, lm1, _scale = _laguerre_tail(n, nodes)
        # x L_n'(x) = n (L_n - L_{n-1})
        nodes = nodes - nodes * ln / (n * (ln - lm1))
    _ln, lm1, scale = _laguerre_tail(n, nodes)
    # w_i = x_i / (n L_{n-1}(x_i))^2
    log_w = np.log(nodes) - 2.0 * np.log(n) - 2.0 * (np.log(np.abs(lm1)) + scale)
    for arr in (nodes, log_w):
        arr.setflags(write=False)
    weights = np.exp(log_w)
    weights.setflags(write=False)
    return QuadratureRule(order=n, nodes=nodes, weights=weights,
                          log_weights=log_w)
