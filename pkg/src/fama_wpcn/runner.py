"""Run a scenario into result rows and serialize them as CSV."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from . import analytic
from .analytic.thresholds import inflection_point, sfa_threshold
from .channel import derive_blocks, jakes_matrix
from .montecarlo import estimate_many
from .scenarios import Scenario
from .strategy import Link, StrategyKind

log = logging.getLogger(__name__)

CSV_HEADER = ("scenario", "sweep_var", "sweep_value", "strategy", "link", "method",
              "value", "ci_half_width", "trials", "seed")
NONE_TOKEN = "-"


class Row(NamedTuple):
    scenario: str
    sweep_var: str
    sweep_value: float
    strategy: str
    link: str
    method: str
    value: float
    ci_half_width: float = 0.0
    trials: int = 0
    seed: int = 0


def fmt_float(x) -> str:
    """17 significant digits; round-trips every double."""
    return format(float(x), ".17g")


def _outage_point(sc: Scenario, i: int, value, rule, workers: int) -> list:
    cfg = sc.point_config(value)
    blocks = derive_blocks(cfg.N, cfg.W, cfg.mu2, sc.eps)
    dl, ul = sc.thresholds(value)
    links = [Link.parse(x) for x in sc.links]
    kinds = [StrategyKind.parse(s) for s in sc.strategies]
    mc = {}
    if "mc" in sc.methods and kinds:
        mc = estimate_many(cfg, blocks, kinds,
                           dl if Link.DOWNLINK in links else None,
                           ul if Link.UPLINK in links else None,
                           sc.trials, sc.seed, point=i, workers=workers,
                           model=sc.model, fpa_k=sc.fpa_k)
    rows = []
    for kind in kinds:
        for link in links:
            thr = dl if link is Link.DOWNLINK else ul
            offered = analytic.available_methods(kind, link)
            for method in sc.methods:
                if method == "mc":
                    est = mc[(kind, link)]
                    rows.append(Row(sc.name, sc.sweep_var, float(value), kind.value,
                                    link.value, "mc", est.probability, est.ci_half_width,
                                    est.trials, sc.seed))
                elif method in offered:
                    est = analytic.evaluate(cfg, kind, link, method, thr, blocks, rule)
                    rows.append(Row(sc.name, sc.sweep_var, float(value), kind.value,
                                    link.value, method, est.probability, 0.0, 0, sc.seed))
    return rows


def _threshold_point(sc: Scenario, value) -> list:
    args = {"b": sc.b, "L": sc.L, "p": sc.p}
    args[sc.sweep_var] = float(value) if sc.sweep_var == "b" else int(value)
    b, L, p = args["b"], args["L"], args["p"]
    return [
        Row(sc.name, sc.sweep_var, float(value), NONE_TOKEN, NONE_TOKEN, "sfa",
            sfa_threshold(b, L, p).value, 0.0, 0, sc.seed),
        Row(sc.name, sc.sweep_var, float(value), NONE_TOKEN, NONE_TOKEN, "numeric",
            inflection_point(b, L, p), 0.0, 0, sc.seed),
    ]


def eigen_comparison(N: int, W: float, mu2: float = 0.97, eps: float = 1.0):
    """Leading Jakes eigenvalues and block-model eigenvalues (top B each)."""
    blocks = derive_blocks(N, W, mu2, eps)
    jakes = np.sort(np.linalg.eigvalsh(jakes_matrix(N, W)))[::-1][:blocks.B]
    block = blocks.eigenvalues(mu2)[:blocks.B]
    return jakes, block


def _eigen_rows(sc: Scenario, value) -> list:
    cfg = sc.base_config()
    N = int(value)
    jakes, block = eigen_comparison(N, cfg.W, cfg.mu2, sc.eps)
    rows = []
    series = f"n{N}"
    for method, vals in (("jakes", jakes), ("block", block)):
        for k, v in enumerate(vals, 1):
            rows.append(Row(sc.name, "rank", float(k), series, NONE_TOKEN, method,
                            float(v), 0.0, 0, sc.seed))
    return rows


def run_scenario(sc: Scenario, glq_order: int | None = None, workers: int = 1) -> list:
    """All rows of a scenario, ordered by grid index then strategy, link, method.

    With ``workers > 1`` grid points run concurrently; the row order and
    every value are the same as for a serial run.
    """
    rule = analytic.resolve_rule(glq_order)

    def point(job):
        i, value = job
        log.info("%s: point %d/%d (%s=%g)", sc.name, i + 1, len(sc.grid),
                 sc.sweep_var, value)
        if sc.kind == "outage":
            return _outage_point(sc, i, value, rule, 1 if workers > 1 else workers)
        if sc.kind == "threshold":
            return _threshold_point(sc, value)
        return _eigen_rows(sc, value)

    jobs = list(enumerate(sc.grid))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(point, jobs))
    else:
        parts = [point(j) for j in jobs]
    return [row for part in parts for row in part]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.scenario, r.sweep_var, fmt_float(r.sweep_value), r.strategy, r.link,
                    r.method, fmt_float(r.value), fmt_float(r.ci_half_width), int(r.trials),
                    int(r.seed)])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return [Row(d["scenario"], d["sweep_var"], float(d["sweep_value"]), d["strategy"],
                    d["link"], d["method"], float(d["value"]), float(d["ci_half_width"]),
                    int(d["trials"]), int(d["seed"])) for d in reader]


__all__ = ["CSV_HEADER", "Row", "eigen_comparison", "fmt_float", "read_csv",
           "rows_to_csv", "run_scenario", "write_csv"]
