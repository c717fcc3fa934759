from __future__ import annotations

import logging
from pathlib import Path
from typing import List

import pandas as pd
from matplotlib import pyplot as plt

from ..utils.figures import save_svg
from .sweep import AGGREGATE_CSV, AGGREGATED_COUNTERS, COUNTERS_CSV

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

COUNTER_TITLES = {
    "pe_steps": "Total post-exploration steps",
    "relabel_updates": "Total hindsight relabel updates",
}


def plot_learning_curves(curves: pd.DataFrame) -> plt.Figure:
    """Mean coverage per series with a shaded one-standard-error band."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for series, frame in curves.groupby("series", sort=True):
        frame = frame.sort_values("step")
        marker = "o" if len(frame) == 1 else None
        (line,) = ax.plot(frame["step"], frame["mean"], marker=marker, label=series)
        ax.fill_between(
            frame["step"],
            frame["mean"] - frame["stderr"],
            frame["mean"] + frame["stderr"],
            color=line.get_color(),
            alpha=0.2,
        )
    ax.set_xlabel("Environment steps")
    ax.set_ylabel("Coverage")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    return fig


def plot_counter_bars(counters: pd.DataFrame, counter: str) -> plt.Figure:
    frame = counters[counters["counter"] == counter].sort_values("series")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(frame["series"], frame["mean"], yerr=frame["stderr"], capsize=4)
    ax.set_ylabel(COUNTER_TITLES.get(counter, counter))
    ax.tick_params(axis="x", labelrotation=30)
    fig.tight_layout()
    return fig


def emit_plots(indir: Path) -> List[Path]:
    """Learning curves and counter bar charts, as a pure function of the aggregate CSVs."""
    curves = pd.read_csv(indir / AGGREGATE_CSV)
    written = [save_svg(plot_learning_curves(curves), indir / "learning_curves.svg")]
    counters_path = indir / COUNTERS_CSV
    if counters_path.exists():
        counters = pd.read_csv(counters_path)
        for counter in AGGREGATED_COUNTERS:
            if (counters["counter"] == counter).any():
                written.append(save_svg(plot_counter_bars(counters, counter), indir / f"{counter}.svg"))
    logger.info("Wrote %s plots to %s", len(written), indir)
    return written
