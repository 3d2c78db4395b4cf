"""SVG line charts drawn from already-written result tables.

Plots are produced from the files on disk, never from in-memory results,
so plotting cannot change the numbers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

# stem -> (x column, y column, title)
CHARTS = {
    "decay": ("t", "norm", "orbit norm"),
    "angles": ("T", "sup_profile", "sup over s of angle(Y_T, Y_T+s)"),
    "series": ("k", "partial_sum", "partial sums"),
    "growth": ("t", "ratio", "growth ratio"),
}


def read_table(path: Path):
    path = Path(path)
    if path.suffix == ".json":
        rows = json.loads(path.read_text())
        return [{k: float(v) for k, v in r.items()} for r in rows]
    with path.open(newline="") as fh:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def line_chart(table_path: Path, svg_path: Path, x: str, y: str, title: str) -> Path:
    rows = read_table(table_path)
    xs, ys = [], []
    seen = set()
    for r in rows:
        # angles.csv repeats sup_profile for every s
        if (r[x], r[y]) in seen:
            continue
        seen.add((r[x], r[y]))
        xs.append(r[x])
        ys.append(r[y])
    fig = Figure(figsize=(6.0, 3.6))
    ax = fig.add_subplot()
    ax.plot(xs, ys, lw=1.2)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(title)
    ax.grid(True, lw=0.3)
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "semilab"}):
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
    return Path(svg_path)


def render_all(out_dir: Path, fmt: str = "csv"):
    """One SVG per table present in ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    for stem, (x, y, title) in CHARTS.items():
        src = out_dir / f"{stem}.{fmt}"
        if src.exists():
            written.append(line_chart(src, out_dir / f"{stem}.svg", x, y, title))
    return written
