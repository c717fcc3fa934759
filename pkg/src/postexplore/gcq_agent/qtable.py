"""
Tabular goal-conditioned Q-learning.

Values live in a sparse dict keyed by `(state, goal)` with one numpy row of action
values per key; pairs that were never updated read as zeros without being stored.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from ..grid_env.schemas import ACTIONS, Action, Position
from .schemas import Transition

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

_ZEROS = np.zeros(len(ACTIONS))
_ZEROS.flags.writeable = False


class QTable:
    def __init__(self, alpha: float = 0.1, gamma: float = 0.99) -> None:
        if not 0.0 <= alpha <= 1.0 or not 0.0 <= gamma <= 1.0:
            raise ValueError(f"alpha and gamma must lie in [0, 1], got {alpha}, {gamma}.")
        self.alpha = alpha
        self.gamma = gamma
        self.values: Dict[Tuple[Position, Position], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.values)

    def action_values(self, s: Position, goal: Position) -> np.ndarray:
        """Read-only action values for `(s, goal)`; never inserts."""
        return self.values.get((s, goal), _ZEROS)

    def value(self, s: Position, a: Action, goal: Position) -> float:
        return float(self.action_values(s, goal)[a])

    def set_value(self, s: Position, a: Action, goal: Position, value: float) -> None:
        row = self.values.get((s, goal))
        if row is None:
            row = self.values[(s, goal)] = np.zeros(len(ACTIONS))
        row[a] = value

    def copy(self) -> "QTable":
        clone = QTable(self.alpha, self.gamma)
        clone.values = {key: row.copy() for key, row in self.values.items()}
        return clone

    def to_csv(self, path: Path) -> None:
        rows = [
            (sx, sy, action.name, gx, gy, float(row[action]))
            for ((sx, sy), (gx, gy)), row in sorted(self.values.items())
            for action in ACTIONS
            if row[action] != 0.0
        ]
        pd.DataFrame(rows, columns=["sx", "sy", "action", "gx", "gy", "value"]).to_csv(
            path, index=False
        )


def reward(s_next: Position, goal: Optional[Position]) -> float:
    return 1.0 if s_next == goal else 0.0


def q_update(q: QTable, t: Transition) -> None:
    if t.goal is None:
        raise ValueError("Cannot update on a transition without a goal.")
    if t.terminal or t.s_next == t.goal:
        target = t.r
    else:
        target = t.r + q.gamma * float(q.action_values(t.s_next, t.goal).max())
    current = q.value(t.s, t.a, t.goal)
    q.set_value(t.s, t.a, t.goal, current + q.alpha * (target - current))


def select_action(
    q: QTable, s: Position, goal: Position, epsilon: float, rng: np.random.Generator
) -> Action:
    """Epsilon-greedy over Q(s, ., goal) with uniform tie-breaking; epsilon=0 is greedy."""
    if rng.random() < epsilon:
        return ACTIONS[int(rng.integers(len(ACTIONS)))]
    row = q.action_values(s, goal)
    best = np.flatnonzero(row == row.max())
    if len(best) == 1:
        return ACTIONS[int(best[0])]
    return ACTIONS[int(rng.choice(best))]
