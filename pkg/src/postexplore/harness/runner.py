from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from ..evaluator.heatmap import render_trace
from ..explorer.loop import Explorer
from .config import dump_config
from .schemas import RunConfig, RunLog

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

RUN_CSV = "run.csv"
RUN_JSON = "run.json"


def write_run_csv(log: RunLog, path: Path) -> None:
    frame = pd.DataFrame(
        {"step": [c.step for c in log.checkpoints], "coverage": [c.coverage for c in log.checkpoints]}
    )
    frame.to_csv(path, index=False)


def read_run_log(run_dir: Path) -> RunLog:
    return RunLog.model_validate_json((run_dir / RUN_JSON).read_text(encoding="utf-8"))


def run(config: RunConfig, outdir: Path, dump_q: bool = False) -> RunLog:
    """
    Trains one configuration and writes its artifacts to `outdir`:

    - `run.csv`: evaluation checkpoints (`step,coverage`);
    - `run.json`: config echo, checkpoints, counters, final heat map and last episode trace;
    - `config.txt`, `map.txt`: the exact configuration and the map it ran on;
    - `heatmap.csv`, `heatmap.svg`: training-time visit counts;
    - `goals.csv`: the final goal space with visit counts;
    - `trace.svg`: the last training episode;
    - `qtable.csv` when `dump_q` is set.
    """
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        logger.error("Cannot create output directory %s: %s", outdir, exc)
        raise
    explorer = Explorer(config)
    log = explorer.run()
    try:
        write_run_csv(log, outdir / RUN_CSV)
        (outdir / RUN_JSON).write_text(log.model_dump_json(indent=2), encoding="utf-8")
        (outdir / "config.txt").write_text(dump_config(config), encoding="utf-8")
        (outdir / "map.txt").write_text(explorer.grid.to_text(), encoding="utf-8")
        explorer.heatmap.to_csv(outdir / "heatmap.csv")
        explorer.heatmap.render_svg(
            explorer.grid,
            outdir / "heatmap.svg",
            title=f"{config.env_family.value}: visits after {log.counters.total_steps} steps",
        )
        explorer.goal_space.to_csv(outdir / "goals.csv")
        if log.trace is not None:
            render_trace(
                explorer.grid,
                log.trace.positions,
                log.trace.goal,
                log.trace.pe_boundary,
                outdir / "trace.svg",
            )
        if dump_q:
            explorer.q.to_csv(outdir / "qtable.csv")
    except OSError as exc:
        logger.error("Could not write run artifacts to %s: %s", outdir, exc)
        raise
    final = log.checkpoints[-1].coverage if log.checkpoints else float("nan")
    logger.info("Run written to %s (final coverage %.4f)", outdir, final)
    return log
