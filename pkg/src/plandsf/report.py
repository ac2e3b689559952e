"""Batch benchmark output: delimited CSV plus rendered figures."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .rational import rat_str

BENCH_COLUMNS = ("seed", "generator", "vertices", "edges", "k", "cost",
                 "iterations", "verified", "opt", "ratio", "replay_ok")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, str)):
        return str(value)
    return rat_str(value)


def write_bench_csv(rows: Sequence[Mapping], path: str) -> None:
    """Rows ordered by seed; values rendered canonically so identical runs
    produce byte-identical files."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for row in sorted(rows, key=lambda r: r["seed"]):
            writer.writerow([_cell(row.get(col)) for col in BENCH_COLUMNS])


def render_bench_figures(rows: Sequence[Mapping], out_dir: str) -> list:
    """Solution-cost chart and, when oracle ratios are present, a ratio
    histogram. Returns the written file paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = sorted(rows, key=lambda r: r["seed"])
    written = []
    meta = {"Software": ""}

    seeds = [row["seed"] for row in rows]
    costs = [float(row["cost"]) for row in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(seeds, costs, color="#4878a8")
    ax.set_xlabel("seed")
    ax.set_ylabel("solution cost")
    ax.set_title("solution cost per instance")
    fig.tight_layout()
    cost_path = out / "costs.png"
    fig.savefig(cost_path, metadata=meta)
    plt.close(fig)
    written.append(str(cost_path))

    ratios = [float(row["ratio"]) for row in rows if row.get("ratio") is not None]
    if ratios:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.hist(ratios, bins=12, color="#a85048", edgecolor="black")
        ax.set_xlabel("cost / optimum")
        ax.set_ylabel("instances")
        ax.set_title("approximation ratio distribution")
        fig.tight_layout()
        ratio_path = out / "ratios.png"
        fig.savefig(ratio_path, metadata=meta)
        plt.close(fig)
        written.append(str(ratio_path))
    return written
