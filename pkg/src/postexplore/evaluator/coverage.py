"""
Greedy coverage evaluation: for every BFS-reachable Free cell, roll the greedy
goal-conditioned policy from the start and record whether (and how fast) it gets there.
Rollouts read the Q-table only; no table entry, visit count or goal is touched.
"""

from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Optional

import numpy as np

from ..gcq_agent.qtable import QTable, select_action
from ..grid_env.schemas import EnvState, GridMap, Position
from ..grid_env.world import reachable_cells, step
from .schemas import EvalReport, GoalOutcome

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


def evaluation_goals(grid: GridMap) -> List[Position]:
    return sorted(reachable_cells(grid, grid.start))


def greedy_path_length(
    q: QTable, grid: GridMap, goal: Position, eval_cap: int, rng: np.random.Generator
) -> Optional[int]:
    """Steps the greedy policy needs to reach `goal` from the start, or None on cap or lava."""
    state = EnvState(grid.start)
    if state.pos == goal:
        return 0
    for length in range(1, eval_cap + 1):
        state = step(grid, state, select_action(q, state.pos, goal, 0.0, rng))
        if state.terminal:
            return None
        if state.pos == goal:
            return length
    return None


def evaluate_coverage(
    q: QTable,
    grid: GridMap,
    eval_cap: int,
    rng: np.random.Generator,
    step_index: int = 0,
    goals: Optional[Iterable[Position]] = None,
) -> EvalReport:
    if eval_cap < 1:
        raise ValueError("Evaluation needs a step cap of at least one.")
    per_goal: Dict[Position, GoalOutcome] = {}
    for goal in goals if goals is not None else evaluation_goals(grid):
        length = greedy_path_length(q, grid, goal, eval_cap, rng)
        per_goal[goal] = GoalOutcome(reached=length is not None, path_length=length)
    reached = sum(outcome.reached for outcome in per_goal.values())
    coverage = reached / len(per_goal) if per_goal else 0.0
    return EvalReport(step=step_index, coverage=coverage, per_goal=per_goal)
