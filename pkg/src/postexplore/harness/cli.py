"""
Command line entry point.

    postexplore run --config F [--out DIR] [--key value ...]
    postexplore sweep (--preset NAME | --grid F) [--config F] [--reps N] [--jobs J] [--out DIR]
    postexplore plot --in DIR

Exit codes: 0 on success, 2 on configuration errors, 1 on I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from opencensus.ext.azure.log_exporter import AzureLogHandler

from ..errors import ConfigError
from .config import default_outdir, load_config, parse_overrides
from .plots import emit_plots
from .runner import run
from .sweep import PRESETS, read_grid_file, sweep

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="postexplore", description="Goal-conditioned exploration lab.", allow_abbrev=False
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument(
        "--az-monitor",
        default=None,
        help="Azure Monitor connection string for log export (default: $AZ_CONNECTION_LOG)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="train a single configuration", allow_abbrev=False)
    run_cmd.add_argument("--config", type=Path, default=None)
    run_cmd.add_argument("--out", type=Path, default=None)
    run_cmd.add_argument("--dump-q", action="store_true", help="also write qtable.csv")

    sweep_cmd = commands.add_parser("sweep", help="run a grid of configurations", allow_abbrev=False)
    source = sweep_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS))
    source.add_argument("--grid", type=Path)
    sweep_cmd.add_argument("--config", type=Path, default=None)
    sweep_cmd.add_argument("--reps", type=int, default=5)
    sweep_cmd.add_argument("--jobs", type=int, default=1)
    sweep_cmd.add_argument("--seed", type=int, default=0, help="sweep seed")
    sweep_cmd.add_argument("--out", type=Path, default=None)
    sweep_cmd.add_argument("--no-plots", action="store_true")

    plot_cmd = commands.add_parser("plot", help="render SVGs from a sweep directory", allow_abbrev=False)
    plot_cmd.add_argument("--in", dest="indir", type=Path, required=True)
    return parser


def _setup_logging(verbose: bool, az_monitor: Optional[str]) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if not verbose:
        logging.getLogger("postexplore").setLevel(logging.INFO)
        for name in list(logging.root.manager.loggerDict):
            if name.startswith("postexplore."):
                logging.getLogger(name).setLevel(logging.INFO)
    if az_monitor:
        logging.getLogger("postexplore").addHandler(AzureLogHandler(connection_string=az_monitor))


def _command(args: argparse.Namespace, extra: List[str]) -> None:
    match args.command:
        case "run":
            config = load_config(args.config, parse_overrides(extra))
            run(config, args.out or default_outdir() / "run", dump_q=args.dump_q)
        case "sweep":
            base = load_config(args.config, parse_overrides(extra))
            specs = PRESETS[args.preset] if args.preset else [read_grid_file(args.grid)]
            outdir = args.out or default_outdir() / (args.preset or args.grid.stem)
            sweep(base, specs, args.reps, outdir, args.jobs, args.seed, name=args.preset)
            if not args.no_plots:
                emit_plots(outdir)
        case "plot":
            if extra:
                raise ConfigError(f"Unexpected arguments: {' '.join(extra)}")
            emit_plots(args.indir)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args, extra = _parser().parse_known_args(argv)
    _setup_logging(args.verbose, args.az_monitor or os.getenv("AZ_CONNECTION_LOG"))
    try:
        _command(args, extra)
    except ConfigError as exc:
        logger.error("Configuration error: %s", exc)
        return 2
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
