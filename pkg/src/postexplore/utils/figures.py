from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  pylint: disable=wrong-import-position

plt.rcParams["svg.hashsalt"] = "postexplore"
plt.rcParams["svg.fonttype"] = "path"


def save_svg(fig: plt.Figure, path: Path) -> Path:
    """Writes `fig` as SVG without a creation date so identical figures give identical bytes."""
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
