from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from matplotlib import colors
from matplotlib import pyplot as plt
from matplotlib.patches import Rectangle

from ..grid_env.schemas import Cell, GridMap, Position
from ..utils.figures import save_svg

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class Heatmap:
    """Training-time visit counter with the same shape as the map, indexed `[y, x]`."""

    def __init__(self, width: int, height: int) -> None:
        self.counts = np.zeros((height, width), dtype=np.int64)

    @classmethod
    def for_map(cls, grid: GridMap) -> "Heatmap":
        return cls(grid.width, grid.height)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def record_visit(self, state: Position) -> None:
        x, y = state
        self.counts[y, x] += 1

    def to_csv(self, path: Path) -> None:
        np.savetxt(path, self.counts, fmt="%d", delimiter=",")

    def render_svg(self, grid: GridMap, path: Path, title: str = "") -> Path:
        walls = np.array([[cell is Cell.WALL for cell in row] for row in grid.cells])
        fig, ax = plt.subplots(figsize=(6, 6))
        image = ax.imshow(
            np.ma.masked_array(self.counts, mask=walls), cmap="viridis", interpolation="nearest"
        )
        ax.imshow(np.ma.masked_array(walls, mask=~walls), cmap=colors.ListedColormap(["dimgray"]))
        _draw_lava(ax, grid)
        fig.colorbar(image, ax=ax, label="Visit count")
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
        fig.tight_layout()
        return save_svg(fig, path)


def _draw_lava(ax: plt.Axes, grid: GridMap) -> None:
    for y, row in enumerate(grid.cells):
        for x, cell in enumerate(row):
            if cell is Cell.LAVA:
                ax.add_patch(Rectangle((x - 0.5, y - 0.5), 1, 1, color="orangered"))


def render_trace(
    grid: GridMap,
    positions: Sequence[Position],
    goal: Position,
    pe_boundary: int,
    path: Path,
    title: Optional[str] = None,
) -> Path:
    """
    One episode drawn over the map: goal-reaching positions in blue, post-exploration
    positions in orange, the selected goal as a green square.
    """
    walls = np.array([[cell is Cell.WALL for cell in row] for row in grid.cells])
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(walls, cmap=colors.ListedColormap(["white", "dimgray"]), interpolation="nearest")
    _draw_lava(ax, grid)
    ax.add_patch(Rectangle((goal[0] - 0.5, goal[1] - 0.5), 1, 1, color="limegreen", alpha=0.8))
    if positions:
        xs, ys = zip(*positions)
        ax.plot(xs[: pe_boundary + 1], ys[: pe_boundary + 1], "-o", color="tab:blue", markersize=3)
        if pe_boundary < len(positions) - 1:
            ax.plot(xs[pe_boundary:], ys[pe_boundary:], "-o", color="tab:orange", markersize=3)
    ax.set_title(title or f"Goal {goal}")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    return save_svg(fig, path)
