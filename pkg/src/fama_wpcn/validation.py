"""Cross-checks between analytic rows, Monte Carlo rows and bounds.

Every check carries a token name ``<strategy>-<link>-<method>`` (or
``uplink-ordering``) so a failure points at the relation that broke.
Step-function approximations are reported for information only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationFailure

# absolute budget of an analytic form against Monte Carlo
DEFAULT_TOLERANCE = {"glq": 0.02, "nested": 0.02, "closed": 0.02}
TIGHT_TOLERANCE = {("dsps", "downlink", "glq"): 0.01}
CI_MULTIPLIER = 3.0
EXACT_METHODS = ("glq", "nested")
BOUND_METHODS = ("lb", "lb-closed")
INFO_METHODS = ("sfa", "sfa2")
UPLINK_ORDER = ("usps", "ucps", "deps", "dsps")
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    sweep_value: float
    value: float
    reference: float
    allowed: float
    passed: bool
    informational: bool = False

    @property
    def deviation(self) -> float:
        return self.value - self.reference


def _index(rows):
    out = {}
    for r in rows:
        out[(r.sweep_value, r.strategy, r.link, r.method)] = r
    return out


def budget(strategy, link, method, ci, tolerance=None, ci_multiplier=None) -> float:
    """Allowed |analytic - mc|.

    Shipped budgets are ``max(tol, 3 CI)``. An explicit ``tolerance``
    replaces the whole budget; CI slack is then added only if a
    multiplier is also given.
    """
    if tolerance is None:
        tol = TIGHT_TOLERANCE.get((strategy, link, method), DEFAULT_TOLERANCE.get(method, 0.0))
        mult = CI_MULTIPLIER if ci_multiplier is None else ci_multiplier
    else:
        tol = tolerance
        mult = 0.0 if ci_multiplier is None else ci_multiplier
    return max(float(tol), float(mult) * ci)


def check_bound(name, sweep_value, bound, estimate, slack=BOUND_SLACK) -> Check:
    """A lower bound must not exceed the quantity it bounds."""
    return Check(name, sweep_value, bound, estimate, slack, bound <= estimate + slack)


def cross_checks(rows, tolerance=None, ci_multiplier=None) -> list:
    idx = _index(rows)
    checks = []
    points = sorted({r.sweep_value for r in rows})
    for r in rows:
        if r.method == "mc":
            continue
        mc = idx.get((r.sweep_value, r.strategy, r.link, "mc"))
        name = f"{r.strategy}-{r.link}-{r.method}"
        if r.method in BOUND_METHODS:
            ref = None
            for m in EXACT_METHODS:
                ref = ref or idx.get((r.sweep_value, r.strategy, r.link, m))
            if ref is not None:
                checks.append(check_bound(name, r.sweep_value, r.value, ref.value))
            elif mc is not None:
                slack = (CI_MULTIPLIER if ci_multiplier is None else ci_multiplier) \
                    * mc.ci_half_width + BOUND_SLACK
                checks.append(check_bound(name, r.sweep_value, r.value, mc.value, slack))
            if r.method == "lb-closed":
                lb = idx.get((r.sweep_value, r.strategy, r.link, "lb"))
                if lb is not None:
                    checks.append(check_bound(f"{name}-vs-lb", r.sweep_value, r.value,
                                              lb.value))
            continue
        if mc is None:
            continue
        if r.method in INFO_METHODS:
            checks.append(Check(name, r.sweep_value, r.value, mc.value, math.nan,
                                True, informational=True))
            continue
        allowed = budget(r.strategy, r.link, r.method, mc.ci_half_width, tolerance,
                         ci_multiplier)
        checks.append(Check(name, r.sweep_value, r.value, mc.value, allowed,
                            abs(r.value - mc.value) <= allowed))
    # uplink ordering from the simulated values
    for v in points:
        est = [idx.get((v, s, "uplink", "mc")) for s in UPLINK_ORDER]
        for lo, hi in zip(est[:-1], est[1:]):
            if lo is None or hi is None:
                continue
            slack = lo.ci_half_width + hi.ci_half_width
            checks.append(Check(f"uplink-ordering-{lo.strategy}-{hi.strategy}", v, lo.value,
                                hi.value, slack, lo.value <= hi.value + slack))
    return checks


def failures(checks) -> list:
    return [c for c in checks if not c.informational and not c.passed]


def format_report(checks) -> str:
    lines = [f"{'check':34s} {'point':>9s} {'value':>11s} {'reference':>11s} "
             f"{'|delta|':>10s} {'allowed':>10s}  status"]
    for c in checks:
        status = "info" if c.informational else ("ok" if c.passed else "FAIL")
        lines.append(f"{c.name:34s} {c.sweep_value:9.4g} {c.value:11.5g} {c.reference:11.5g} "
                     f"{abs(c.deviation):10.3g} {c.allowed:10.3g}  {status}")
    bad = failures(checks)
    lines.append(f"{len(checks)} checks, {len(bad)} failed")
    return "\n".join(lines)


def raise_on_failure(checks) -> None:
    bad = failures(checks)
    if bad:
        first = bad[0]
        raise ValidationFailure(first.name, f"{len(bad)} check(s) failed; first at "
                                f"{first.sweep_value:g}: {first.value:.6g} vs "
                                f"{first.reference:.6g} (allowed {first.allowed:.3g})")


__all__ = ["BOUND_METHODS", "CI_MULTIPLIER", "Check", "DEFAULT_TOLERANCE", "budget",
           "check_bound", "cross_checks", "failures", "format_report", "raise_on_failure"]
