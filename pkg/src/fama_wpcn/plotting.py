"""Static SVG figures from result rows (diagnostic; the CSV is the record)."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {"mc": dict(marker="o", linestyle="none", markersize=4, fillstyle="none")}


def _series(rows, key):
    out = defaultdict(list)
    for r in rows:
        out[key(r)].append((r.sweep_value, r.value))
    return out


def _save(fig, path):
    fig.tight_layout()
    # fixed hash salt and no date keep the SVG byte-stable
    with matplotlib.rc_context({"svg.hashsalt": "fama-wpcn"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_rows(scenario, rows, stem) -> list:
    """Write one SVG per link (or one for threshold/eigen scenarios).

    ``stem`` is the output path without extension; returns written paths.
    """
    stem = Path(stem)
    paths = []
    if scenario.kind == "outage":
        by_link = defaultdict(list)
        for r in rows:
            by_link[r.link].append(r)
        for link, link_rows in by_link.items():
            fig, ax = plt.subplots(figsize=(6, 4.2))
            series = _series(link_rows, lambda r: (r.strategy, r.method))
            for (strategy, method), pts in series.items():
                xs, ys = zip(*pts)
                style = _STYLE.get(method, dict(linestyle="-"))
                ax.plot(xs, ys, label=f"{strategy} {method}", **style)
            positive = [r.value for r in link_rows if r.value > 0]
            if link == "uplink" and positive and min(positive) < 1e-2:
                ax.set_yscale("log")
                ax.set_ylim(max(min(positive) * 0.5, 1e-6), 1.05)
            ax.set_xlabel(scenario.sweep_var)
            ax.set_ylabel(f"{link} outage probability")
            ax.set_title(scenario.name)
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize=6, ncol=2)
            path = stem.with_name(f"{stem.name}_{link}.svg")
            _save(fig, path)
            paths.append(path)
    else:
        fig, ax = plt.subplots(figsize=(6, 4.2))
        key = (lambda r: r.method) if scenario.kind == "threshold" else \
            (lambda r: f"{r.strategy} {r.method}")
        for label, pts in _series(rows, key).items():
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker=".", label=label)
        ax.set_xlabel(rows[0].sweep_var if rows else scenario.sweep_var)
        ax.set_ylabel("threshold" if scenario.kind == "threshold" else "eigenvalue")
        ax.set_title(scenario.name)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
        path = stem.with_suffix(".svg")
        _save(fig, path)
        paths.append(path)
    return paths


__all__ = ["plot_rows"]
