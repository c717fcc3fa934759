"""
Seeded experiment sweeps.

A sweep expands each `SweepSpec` into the Cartesian product of its override grid, then
repeats every combination `repetitions` times and, for procedural environment
families, over environment seeds 0..9. Master seeds are hashed from the sweep seed and
the run's override tuple, so every run is reproduced byte for byte whatever the
execution order or the number of worker processes.

Runs that differ only in averaged keys (and environment seed) form one series; the
aggregate CSVs hold the per-series mean and standard error across repetitions.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from ..errors import ConfigError
from ..evaluator.curves import aggregate_curves, pooled_mean_stderr
from ..grid_env.schemas import EnvFamily
from ..utils.seeding import derive_seed
from .config import build_config, read_key_values
from .runner import read_run_log, run
from .schemas import RunConfig, RunLog

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

PROCEDURAL_ENV_SEEDS = tuple(range(10))
AGGREGATE_CSV = "aggregate.csv"
COUNTERS_CSV = "counters.csv"
MANIFEST_JSON = "sweep.json"
AGGREGATED_COUNTERS = ("pe_steps", "relabel_updates")


class SweepSpec(BaseModel):
    grid: Dict[str, List[Any]] = Field(default_factory=dict)
    average: List[str] = Field(default_factory=list)


class SweepJob(BaseModel):
    series: str
    run_dir: str
    config: RunConfig


LAVA_FAMILIES = [EnvFamily.LAVA_CROSSING.value, EnvFamily.LAVA_GAP.value]
EPSILONS = [0.0, 0.1, 0.3, 1.0]
BETAS = [0.0, 0.01, 0.05, 1.0]
P_PES = [0.1, 0.5, 0.8]

PRESETS: Dict[str, List[SweepSpec]] = {
    "rq1": [
        SweepSpec(
            grid={"env_family": ["four_rooms"], "pe_mode": ["always", "off"], "epsilon": [0.0, 0.1, 0.3]},
            average=["epsilon"],
        ),
        SweepSpec(grid={"env_family": LAVA_FAMILIES, "pe_mode": ["always", "off"]}),
    ],
    "rq2": [SweepSpec(grid={"pe_mode": ["always", "off"], "epsilon": EPSILONS})],
    "rq3": [SweepSpec(grid={"pe_mode": ["novelty"], "beta": BETAS})],
    "rq4": [
        SweepSpec(grid={"pe_duration": ["fixed"], "n_pe": [10, 15, 20]}),
        SweepSpec(grid={"pe_duration": ["proportional"], "p_pe": P_PES}),
    ],
    "rq5": [SweepSpec(grid={"episodic": [False], "pe_mode": ["always", "off"]})],
    "eps-lava": [SweepSpec(grid={"env_family": LAVA_FAMILIES, "epsilon": EPSILONS})],
    "beta-lava": [
        SweepSpec(grid={"env_family": LAVA_FAMILIES, "pe_mode": ["novelty"], "beta": BETAS})
    ],
    "ppe-lava": [SweepSpec(grid={"env_family": LAVA_FAMILIES, "p_pe": P_PES})],
}


def read_grid_file(path: Path) -> SweepSpec:
    """`key=v1,v2,...` lines; an `average=key1,key2` line marks averaged keys."""
    values = read_key_values(path)
    average = [k.strip() for k in values.pop("average", "").split(",") if k.strip()]
    grid = {key: [v.strip() for v in raw.split(",")] for key, raw in values.items()}
    missing = set(average) - set(grid)
    if missing:
        raise ConfigError(f"Averaged keys {sorted(missing)} are not part of the grid.")
    return SweepSpec(grid=grid, average=average)


def _label(pairs: List[Tuple[str, Any]]) -> str:
    return ",".join(f"{key}={value}" for key, value in sorted(pairs)) or "base"


def expand_jobs(
    base: RunConfig, specs: List[SweepSpec], repetitions: int, sweep_seed: int = 0
) -> List[SweepJob]:
    if repetitions < 1:
        raise ConfigError("A sweep needs at least one repetition.")
    jobs: List[SweepJob] = []
    for spec in specs:
        keys = list(spec.grid)
        for combo in itertools.product(*(spec.grid[key] for key in keys)):
            overrides = dict(zip(keys, combo))
            series = _label([(k, v) for k, v in overrides.items() if k not in spec.average])
            values = {**base.model_dump(), **overrides}
            family = build_config(values).env_family
            env_seeds = PROCEDURAL_ENV_SEEDS if family.procedural else (base.env_seed,)
            for repetition in range(repetitions):
                for env_seed in env_seeds:
                    parts = [*overrides.items(), ("repetition", repetition), ("env_seed", env_seed)]
                    config = build_config(
                        {
                            **values,
                            "env_seed": env_seed,
                            "repetition": repetition,
                            "master_seed": derive_seed(sweep_seed, parts),
                        }
                    )
                    run_dir = "__".join(
                        [_label(list(overrides.items())).replace("=", "-").replace(",", "__")]
                        + [f"rep{repetition}", f"env{env_seed}"]
                    )
                    jobs.append(SweepJob(series=series, run_dir=run_dir, config=config))
    logger.info("Expanded sweep into %s runs", len(jobs))
    return jobs


def _execute(config: RunConfig, run_dir: Path) -> RunLog:
    return run(config, run_dir)


def execute_jobs(jobs: List[SweepJob], outdir: Path, parallelism: int = 1) -> None:
    runs_dir = outdir / "runs"
    if parallelism <= 1:
        for i, job in enumerate(jobs, start=1):
            _execute(job.config, runs_dir / job.run_dir)
            logger.info("Finished run %s/%s (%s)", i, len(jobs), job.series)
        return
    with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as executor:
        futures = {
            executor.submit(_execute, job.config, runs_dir / job.run_dir): job for job in jobs
        }
        for done, future in enumerate(concurrent.futures.as_completed(futures), start=1):
            future.result()
            logger.info("Finished run %s/%s (%s)", done, len(jobs), futures[future].series)


def aggregate_directory(outdir: Path) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Rebuilds the aggregate tables from the manifest and the per-run `run.json` files."""
    manifest = json.loads((outdir / MANIFEST_JSON).read_text(encoding="utf-8"))
    by_series: Dict[str, List[RunLog]] = {}
    for entry in manifest["runs"]:
        log = read_run_log(outdir / "runs" / entry["run_dir"])
        by_series.setdefault(entry["series"], []).append(log)
    curve_rows, counter_frames = [], []
    for series, logs in by_series.items():
        for point in aggregate_curves(logs):
            curve_rows.append({"series": series, **point.model_dump()})
        counters = pd.DataFrame(
            [
                {
                    "repetition": log.config.repetition,
                    "env_seed": log.config.env_seed,
                    "master_seed": log.config.master_seed,
                    **{name: getattr(log.counters, name) for name in AGGREGATED_COUNTERS},
                }
                for log in logs
            ]
        )
        for name in AGGREGATED_COUNTERS:
            stats = pooled_mean_stderr(counters.assign(counter=name), name, ["counter"])
            stats.insert(0, "series", series)
            counter_frames.append(stats)
    curves = pd.DataFrame(curve_rows, columns=["series", "step", "mean", "stderr"])
    counters_table = (
        pd.concat(counter_frames, ignore_index=True)
        if counter_frames
        else pd.DataFrame(columns=["series", "counter", "mean", "stderr"])
    )
    curves.to_csv(outdir / AGGREGATE_CSV, index=False)
    counters_table[["series", "counter", "mean", "stderr"]].to_csv(outdir / COUNTERS_CSV, index=False)
    return curves, counters_table


def sweep(
    base: RunConfig,
    specs: List[SweepSpec],
    repetitions: int,
    outdir: Path,
    parallelism: int = 1,
    sweep_seed: int = 0,
    name: Optional[str] = None,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    jobs = expand_jobs(base, specs, repetitions, sweep_seed)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "name": name,
        "sweep_seed": sweep_seed,
        "repetitions": repetitions,
        "runs": [{"series": job.series, "run_dir": job.run_dir} for job in jobs],
    }
    (outdir / MANIFEST_JSON).write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    execute_jobs(jobs, outdir, parallelism)
    return aggregate_directory(outdir)
