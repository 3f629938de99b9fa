"""Benchmark figures. Rendered off-screen to PNG files."""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _by_engine(rows, field):
    series = defaultdict(lambda: defaultdict(list))
    for r in rows:
        val = r.get(field)
        if val in (None, ""):
            continue
        series[r["engine"]][int(r["n"])].append(float(val))
    return series


def wall_time_figure(rows, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for engine, pts in sorted(_by_engine(rows, "wall_ms").items()):
        ns = sorted(pts)
        ax.plot(ns, [sum(pts[n]) / len(pts[n]) for n in ns], marker="o", label=engine)
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("mean wall time [ms]")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def memo_states_figure(rows, path):
    series = _by_engine(rows, "memo_states")
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for engine, pts in sorted(series.items()):
        ns = sorted(pts)
        ys = [max(pts[n]) for n in ns]
        ax.plot(ns, ys, marker="s", label=engine)
        if ns:
            ref = [ys[0] * 4 ** (n - ns[0]) for n in ns]
            ax.plot(ns, ref, ls="--", color="0.5", label="4^n reference")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("memo states")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_all(rows, outdir):
    os.makedirs(outdir, exist_ok=True)
    paths = [wall_time_figure(rows, os.path.join(outdir, "wall_time.png"))]
    if _by_engine(rows, "memo_states"):
        paths.append(memo_states_figure(rows, os.path.join(outdir, "memo_states.png")))
    return paths
