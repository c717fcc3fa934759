from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..gcq_agent.schemas import Transition
from ..grid_env.schemas import Position


class PeMode(str, Enum):
    ALWAYS = "always"
    NOVELTY = "novelty"
    OFF = "off"


class PeDurationKind(str, Enum):
    FIXED = "fixed"
    PROPORTIONAL = "proportional"


class PeSchedule(BaseModel):
    """When to post-explore (mode, beta) and for how long (fixed n_pe or proportional p_pe)."""

    model_config = ConfigDict(frozen=True)

    mode: PeMode = PeMode.ALWAYS
    beta: float = Field(default=0.0, ge=0.0)
    duration: PeDurationKind = PeDurationKind.PROPORTIONAL
    n_pe: int = Field(default=10, ge=1)
    p_pe: float = Field(default=0.5, gt=0.0, le=1.0)


@dataclass
class Trajectory:
    """
    Episode memory: the goal-reaching transitions followed by the post-exploration
    segment, which starts at `pe_boundary`. State `s_i` is the start state for
    `i == 0` and `transitions[i - 1].s_next` otherwise; `start` keeps the cell of an
    episode that took no step.
    """

    goal: Position
    transitions: List[Transition] = field(default_factory=list)
    pe_boundary: int = 0
    goal_reached: bool = False
    start: Optional[Position] = None

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def goal_phase_length(self) -> int:
        return self.pe_boundary

    @property
    def post_exploration_length(self) -> int:
        return len(self.transitions) - self.pe_boundary

    @property
    def ended_terminal(self) -> bool:
        return bool(self.transitions) and self.transitions[-1].terminal

    def state(self, i: int) -> Position:
        if i == 0:
            return self.transitions[0].s if self.transitions else self.start
        return self.transitions[i - 1].s_next

    def states(self) -> List[Position]:
        if not self.transitions:
            return [] if self.start is None else [self.start]
        return [self.transitions[0].s] + [t.s_next for t in self.transitions]

    def append_goal_step(self, transition: Transition) -> None:
        if self.post_exploration_length:
            raise ValueError("Goal-phase steps cannot follow post-exploration.")
        self.transitions.append(transition)
        self.pe_boundary = len(self.transitions)

    def extend_post_exploration(self, segment: List[Transition]) -> None:
        self.transitions.extend(segment)
