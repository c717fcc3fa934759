"""
The discovered goal set G with per-state visit counts n(g), uniform goal sampling
and the novelty-gated post-exploration probability (1 / n(g)) ** beta.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Iterator, List, Tuple

import numpy as np
import pandas as pd

from ..errors import EmptyGoalSpaceError
from ..grid_env.schemas import Action, EnvState, GridMap, Position
from ..grid_env.world import step

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

# a start cell always has a Free neighbour, so each episode leaves it with probability >= 1/4
INIT_MAX_EPISODES = 1000


class GoalSpace:
    """
    Ordered set of goal cells with visit counts. Goals are only ever added, in the
    order they were first observed, and every goal has a count of at least one.
    """

    def __init__(self) -> None:
        self._counts: Dict[Position, int] = {}
        self._goals: List[Position] = []
        self.init_episode_length: int = 0

    def __len__(self) -> int:
        return len(self._goals)

    def __contains__(self, state: Position) -> bool:
        return state in self._counts

    def __iter__(self) -> Iterator[Position]:
        return iter(self._goals)

    @property
    def goals(self) -> List[Position]:
        return list(self._goals)

    @property
    def total_observations(self) -> int:
        return sum(self._counts.values())

    def items(self) -> Iterator[Tuple[Position, int]]:
        return iter(self._counts.items())

    def count(self, state: Position) -> int:
        return self._counts.get(state, 0)

    def add_observation(self, state: Position) -> None:
        if state in self._counts:
            self._counts[state] += 1
            return
        self._counts[state] = 1
        self._goals.append(state)

    def sample_goal(self, rng: np.random.Generator) -> Position:
        if not self._goals:
            raise EmptyGoalSpaceError("Cannot sample a goal from an empty goal space.")
        return self._goals[int(rng.integers(len(self._goals)))]

    def to_csv(self, path: Path) -> None:
        rows = [(x, y, n) for (x, y), n in self._counts.items()]
        pd.DataFrame(rows, columns=["x", "y", "n"]).to_csv(path, index=False)


def random_rollout(
    grid: GridMap, start: EnvState, episode_cap: int, rng: np.random.Generator
) -> List[EnvState]:
    """Uniform-random actions from `start` until lava or `episode_cap` steps; returns every s'."""
    visited = []
    state = start
    for _ in range(episode_cap):
        state = step(grid, state, Action(int(rng.integers(len(Action)))))
        visited.append(state)
        if state.terminal:
            break
    return visited


def init_goal_space(grid: GridMap, episode_cap: int, rng: np.random.Generator) -> GoalSpace:
    """
    Seeds the goal space with the start cell and the states of random-policy episodes
    from it. Episodes are repeated until a Free cell other than the start has been
    observed, so goal sampling can always lead somewhere; `init_episode_length` holds
    the steps of all of them.
    """
    if episode_cap < 1:
        raise ValueError("The initialization episode needs a cap of at least one step.")
    goal_space = GoalSpace()
    goal_space.add_observation(grid.start)
    steps = 0
    for episode in range(1, INIT_MAX_EPISODES + 1):
        visited = random_rollout(grid, EnvState(grid.start), episode_cap, rng)
        steps += len(visited)
        for state in visited:
            if not state.terminal:
                goal_space.add_observation(state.pos)
        if len(goal_space) > 1:
            logger.debug(
                "Initialized goal space with %s goals from %s random episodes (%s steps)",
                len(goal_space),
                episode,
                steps,
            )
            goal_space.init_episode_length = steps
            return goal_space
    logger.error("No goal besides the start after %s random episodes", INIT_MAX_EPISODES)
    raise EmptyGoalSpaceError("Random initialization never left the start cell.")


def post_explore_probability(n: int, beta: float) -> float:
    if n < 1:
        raise ValueError(f"Visit count must be positive, got {n}.")
    if beta < 0:
        raise ValueError(f"Beta must be non-negative, got {beta}.")
    return (1.0 / n) ** beta
