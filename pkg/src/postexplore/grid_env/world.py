from __future__ import annotations

import logging
from collections import deque
from typing import Dict, Set

from .schemas import Action, Cell, EnvState, GridMap, Position

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


def step(grid: GridMap, state: EnvState, action: Action) -> EnvState:
    """
    Deterministic transition. A wall bump leaves the agent in place, entering lava ends
    the episode with the agent on the lava cell, anything else moves one cell.
    """
    if state.terminal:
        logger.error("Step requested from terminal state %s", state)
        raise ValueError("Cannot step a terminal state.")
    dx, dy = action.delta
    x, y = state.pos
    target = (x + dx, y + dy)
    cell = grid.cells[target[1]][target[0]]
    if cell is Cell.WALL:
        return state
    if cell is Cell.LAVA:
        return EnvState(target, True)
    return EnvState(target, False)


def bfs_distances(grid: GridMap, origin: Position) -> Dict[Position, int]:
    """Shortest move counts from `origin` to every Free cell reachable through Free cells."""
    if not grid.is_free(origin):
        raise ValueError(f"BFS origin {origin} is not a Free cell.")
    distances = {origin: 0}
    frontier = deque([origin])
    while frontier:
        x, y = frontier.popleft()
        for action in Action:
            dx, dy = action.delta
            nxt = (x + dx, y + dy)
            if nxt not in distances and grid.in_bounds(nxt) and grid.is_free(nxt):
                distances[nxt] = distances[(x, y)] + 1
                frontier.append(nxt)
    return distances


def reachable_cells(grid: GridMap, origin: Position) -> Set[Position]:
    # lava is impassable here: entering it ends the episode
    return set(bfs_distances(grid, origin))
