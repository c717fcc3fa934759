"""
Hindsight goal relabelling.

Half of every trajectory (rounded up) is replayed with counterfactual goals. States
reached during post-exploration are relabelled first; whatever budget is left is drawn
from the goal-reaching part. Each replay walks the trajectory from its start up to the
chosen state and applies the goal-conditioned Q update with reward on s_{t+1} == g.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, List

import numpy as np

from ..gcq_agent.qtable import QTable, q_update, reward
from ..gcq_agent.schemas import Transition
from .schemas import RelabelPlan

if TYPE_CHECKING:
    from ..explorer.schemas import Trajectory

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

RELABEL_FRACTION = 0.5


def _sample_sorted(candidates: List[int], size: int, rng: np.random.Generator) -> List[int]:
    if size <= 0 or not candidates:
        return []
    chosen = rng.choice(candidates, size=min(size, len(candidates)), replace=False)
    return sorted(int(i) for i in chosen)


def plan_relabels(traj: Trajectory, rng: np.random.Generator) -> RelabelPlan:
    length = len(traj)
    if length == 0:
        raise ValueError("Cannot plan relabels for an empty trajectory.")
    k = math.ceil(RELABEL_FRACTION * length)
    # a lava cell ends the episode and is never a goal
    last = length - 1 if traj.ended_terminal else length
    post = list(range(traj.pe_boundary + 1, last + 1))
    pre = list(range(1, min(traj.pe_boundary, last) + 1))
    if len(post) >= k:
        indices = _sample_sorted(post, k, rng)
    else:
        indices = post + _sample_sorted(pre, k - len(post), rng)
    return RelabelPlan(indices=indices, k=k)


def apply_relabel(q: QTable, traj: Trajectory, goal_index: int) -> int:
    """Replays transitions 0..i-1 with goal s_i; returns the number of Q updates applied."""
    if not 1 <= goal_index <= len(traj):
        logger.error("Relabel index %s outside 1..%s", goal_index, len(traj))
        raise ValueError(f"Relabel index {goal_index} is outside the trajectory.")
    goal = traj.state(goal_index)
    for t in traj.transitions[:goal_index]:
        q_update(q, Transition(t.s, t.a, reward(t.s_next, goal), t.s_next, t.terminal, goal))
    return goal_index


def relabel_trajectory(q: QTable, traj: Trajectory, rng: np.random.Generator) -> int:
    if not traj.transitions:
        return 0
    plan = plan_relabels(traj, rng)
    updates = sum(apply_relabel(q, traj, i) for i in plan.indices)
    logger.debug("Relabelled %s goals with %s updates", len(plan.indices), updates)
    return updates
