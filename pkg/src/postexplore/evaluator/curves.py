"""
Learning-curve aggregation. Runs that share a repetition index (different environment
seeds, or values of an averaged sweep key) are first averaged together; the mean and
standard error are then taken across repetitions.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, List, Sequence

import numpy as np
import pandas as pd

from ..errors import ConfigError
from .schemas import CurvePoint

if TYPE_CHECKING:
    from ..harness.schemas import RunLog

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


def pooled_mean_stderr(frame: pd.DataFrame, value: str, by: Sequence[str]) -> pd.DataFrame:
    """Averages `value` within (repetition, *by) groups, then mean and stderr across repetitions."""
    per_rep = (
        frame.sort_values(["repetition", *by, "env_seed", "master_seed"])
        .groupby(["repetition", *by], sort=True)[value]
        .mean()
        .reset_index()
    )
    stats = per_rep.groupby(list(by), sort=True)[value].agg(["mean", "std", "count"])
    stats["stderr"] = (stats["std"] / np.sqrt(stats["count"])).fillna(0.0)
    return stats[["mean", "stderr"]].reset_index()


def aggregate_curves(runs: List["RunLog"]) -> List[CurvePoint]:
    if not runs:
        return []
    reference = [c.step for c in runs[0].checkpoints]
    for run in runs:
        if [c.step for c in run.checkpoints] != reference:
            logger.error("Run %s has mismatched checkpoints", run.config.master_seed)
            raise ConfigError("All runs must share the same evaluation checkpoints.")
        if (run.config.budget, run.config.eval_interval) != (
            runs[0].config.budget,
            runs[0].config.eval_interval,
        ):
            raise ConfigError("All runs must share budget and eval_interval.")
    frame = pd.DataFrame(
        [
            {
                "repetition": run.config.repetition,
                # fixes the summation order within a group whatever order runs arrive in
                "env_seed": run.config.env_seed,
                "master_seed": run.config.master_seed,
                "step": checkpoint.step,
                "coverage": checkpoint.coverage,
            }
            for run in runs
            for checkpoint in run.checkpoints
        ]
    )
    if frame.empty:
        return []
    stats = pooled_mean_stderr(frame, "coverage", ["step"])
    return [
        CurvePoint(step=int(row.step), mean=float(row.mean), stderr=float(row.stderr))
        for row in stats.itertuples(index=False)
    ]
