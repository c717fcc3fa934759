"""
Map builders for the three environment families.

FourRooms has a single fixed layout. LavaCrossing and LavaGap are drawn from a
`numpy.random.Generator` seeded with the environment seed, so `(family, env_seed)`
determines a map bit for bit.
"""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from ..errors import GenerationError
from .schemas import Cell, EnvFamily, GridMap, Position
from .world import reachable_cells

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

FOUR_ROOMS_SIZE = 19
FOUR_ROOMS_DOORWAYS = ((9, 4), (9, 14), (4, 9), (14, 9))
FOUR_ROOMS_START = (14, 14)

LAVA_CROSSING_SIZE = 11
LAVA_CROSSING_RIVERS = 5
LAVA_CROSSING_MAX_ATTEMPTS = 1000
RIVER_COORDINATES = (2, 4, 6, 8)

LAVA_GAP_SIZE = 7
LAVA_GAP_COLUMN = 3


def _walled_grid(size: int) -> List[List[Cell]]:
    grid = [[Cell.FREE] * size for _ in range(size)]
    for i in range(size):
        grid[0][i] = grid[-1][i] = grid[i][0] = grid[i][-1] = Cell.WALL
    return grid


def _freeze(grid: List[List[Cell]], start: Position, env_seed: Optional[int]) -> GridMap:
    return GridMap(
        width=len(grid[0]),
        height=len(grid),
        cells=tuple(tuple(row) for row in grid),
        start=start,
        env_seed=env_seed,
    )


def build_four_rooms() -> GridMap:
    grid = _walled_grid(FOUR_ROOMS_SIZE)
    middle = FOUR_ROOMS_SIZE // 2
    for i in range(FOUR_ROOMS_SIZE):
        grid[middle][i] = Cell.WALL
        grid[i][middle] = Cell.WALL
    for x, y in FOUR_ROOMS_DOORWAYS:
        grid[y][x] = Cell.FREE
    return _freeze(grid, FOUR_ROOMS_START, None)


def _draw_lava_crossing(rng: np.random.Generator) -> List[List[Cell]]:
    grid = _walled_grid(LAVA_CROSSING_SIZE)
    interior = range(1, LAVA_CROSSING_SIZE - 1)
    n_vertical = int(rng.integers(1, len(RIVER_COORDINATES) + 1))
    columns = sorted(int(c) for c in rng.choice(RIVER_COORDINATES, n_vertical, replace=False))
    rows = sorted(
        int(r)
        for r in rng.choice(RIVER_COORDINATES, LAVA_CROSSING_RIVERS - n_vertical, replace=False)
    )
    for x in columns:
        for y in interior:
            grid[y][x] = Cell.LAVA
    for y in rows:
        for x in interior:
            grid[y][x] = Cell.LAVA
    # openings avoid crossings, so every river keeps exactly one Free cell
    for x in columns:
        grid[int(rng.choice([y for y in interior if y not in rows]))][x] = Cell.FREE
    for y in rows:
        grid[y][int(rng.choice([x for x in interior if x not in columns]))] = Cell.FREE
    return grid


def build_lava_crossing(env_seed: int) -> GridMap:
    rng = np.random.default_rng(env_seed)
    start = (1, 1)
    corner = (LAVA_CROSSING_SIZE - 2, LAVA_CROSSING_SIZE - 2)
    for attempt in range(LAVA_CROSSING_MAX_ATTEMPTS):
        grid = _draw_lava_crossing(rng)
        try:
            candidate = _freeze(grid, start, env_seed)
        except ValidationError:
            continue
        if corner in reachable_cells(candidate, start):
            logger.debug("LavaCrossing seed %s accepted after %s attempts", env_seed, attempt + 1)
            return candidate
    logger.error("LavaCrossing generator exhausted %s attempts", LAVA_CROSSING_MAX_ATTEMPTS)
    raise GenerationError(
        f"No valid LavaCrossing map for seed {env_seed} "
        f"within {LAVA_CROSSING_MAX_ATTEMPTS} attempts."
    )


def build_lava_gap(env_seed: int) -> GridMap:
    rng = np.random.default_rng(env_seed)
    grid = _walled_grid(LAVA_GAP_SIZE)
    interior = range(1, LAVA_GAP_SIZE - 1)
    for y in interior:
        grid[y][LAVA_GAP_COLUMN] = Cell.LAVA
    gap = int(rng.integers(1, LAVA_GAP_SIZE - 1))
    grid[gap][LAVA_GAP_COLUMN] = Cell.FREE
    return _freeze(grid, (1, 1), env_seed)


def build_map(family: EnvFamily, env_seed: Optional[int] = None) -> GridMap:
    match family:
        case EnvFamily.FOUR_ROOMS:
            return build_four_rooms()
        case EnvFamily.LAVA_CROSSING:
            return build_lava_crossing(env_seed or 0)
        case EnvFamily.LAVA_GAP:
            return build_lava_gap(env_seed or 0)
        case _:
            raise ValueError(f"Unknown environment family: {family}")
