"""
Flat `key=value` configuration files with command-line overrides.

Every key mirrors a `RunConfig` field. Values stay strings until the merged mapping is
validated by pydantic, which also converts them to the field types.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from dotenv import load_dotenv
from dotenv.parser import parse_stream
from pydantic import ValidationError

from ..errors import ConfigError
from .schemas import RunConfig

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

OUTDIR_ENV = "POSTEXPLORE_OUTDIR"
DEFAULT_OUTDIR = "results"
_NONE_VALUES = {"", "none", "null"}


def read_key_values(path: Path) -> Dict[str, str]:
    """`key=value` lines in dotenv syntax; dashes in keys become underscores."""
    values: Dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for binding in parse_stream(f):
            where = f"{path}:{binding.original.line}"
            if binding.error or (binding.key is not None and binding.value is None):
                logger.error("Malformed configuration line %s", where)
                line = binding.original.string.strip()
                raise ConfigError(f"{where}: expected key=value, got {line!r}.")
            if binding.key is not None:
                values[binding.key.replace("-", "_")] = binding.value
    return values


def parse_overrides(args: List[str]) -> Dict[str, str]:
    """Turns `--key value` / `--key=value` pairs into a mapping."""
    overrides: Dict[str, str] = {}
    i = 0
    while i < len(args):
        arg = args[i]
        if not arg.startswith("--"):
            raise ConfigError(f"Unexpected argument {arg!r}; overrides look like --key value.")
        key = arg[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(args):
            value = args[i + 1]
            i += 2
        else:
            raise ConfigError(f"Override {arg!r} has no value.")
        overrides[key.replace("-", "_")] = value
    return overrides


def build_config(values: Mapping[str, Any]) -> RunConfig:
    unknown = set(values) - set(RunConfig.model_fields)
    if unknown:
        logger.error("Unknown configuration keys: %s", sorted(unknown))
        raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}.")
    cleaned = {
        key: None if isinstance(value, str) and value.lower() in _NONE_VALUES else value
        for key, value in values.items()
    }
    try:
        return RunConfig(**cleaned)
    except ValidationError as exc:
        logger.error("Invalid configuration: %s", exc)
        raise ConfigError(str(exc)) from exc


def load_config(path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    values: Dict[str, Any] = dict(read_key_values(path)) if path else {}
    values.update(overrides or {})
    return build_config(values)


def dump_config(config: RunConfig) -> str:
    lines = []
    for key, value in config.model_dump(mode="json").items():
        if isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key}={'none' if value is None else value}")
    return "\n".join(lines) + "\n"


def default_outdir() -> Path:
    load_dotenv()
    return Path(os.getenv(OUTDIR_ENV, DEFAULT_OUTDIR))
