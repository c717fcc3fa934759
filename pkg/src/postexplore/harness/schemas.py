"""
Run configuration and the record a run produces.

`RunConfig` defaults: alpha=0.1, gamma=0.99, epsilon=0.1, beta=0, p_pe=0.5 and fully random
post-exploration (pe_epsilon=1.0).
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..explorer.schemas import PeDurationKind, PeMode, PeSchedule
from ..grid_env.schemas import EnvFamily, Position


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    env_family: EnvFamily = EnvFamily.FOUR_ROOMS
    env_seed: int = Field(default=0, ge=0)
    master_seed: int = Field(default=0, ge=0)
    repetition: int = Field(default=0, ge=0)
    budget: int = Field(default=200_000, ge=0)
    epsilon: float = Field(default=0.1, ge=0.0, le=1.0)
    pe_mode: PeMode = PeMode.ALWAYS
    beta: float = Field(default=0.0, ge=0.0)
    pe_duration: PeDurationKind = PeDurationKind.PROPORTIONAL
    n_pe: int = Field(default=10, ge=1)
    p_pe: float = Field(default=0.5, gt=0.0, le=1.0)
    pe_epsilon: float = 1.0
    alpha: float = Field(default=0.1, ge=0.0, le=1.0)
    gamma: float = Field(default=0.99, ge=0.0, le=1.0)
    episodic: bool = True
    step_cap: int = Field(default=100, ge=1)
    init_cap: Optional[int] = Field(default=None, ge=1)
    eval_interval: int = Field(default=2000, ge=1)
    eval_cap: int = Field(default=100, ge=1)

    @field_validator("pe_epsilon")
    @classmethod
    def check_pe_epsilon(cls, value: float) -> float:
        if value != 1.0:
            raise ValueError("Post-exploration is always fully random (pe_epsilon=1.0).")
        return value

    @model_validator(mode="after")
    def check_budget(self) -> "RunConfig":
        # budget=0 is a smoke run: initialization episode only
        if self.budget != 0 and self.budget <= self.eval_interval:
            raise ValueError(
                f"budget ({self.budget}) must exceed eval_interval ({self.eval_interval})."
            )
        return self

    @property
    def schedule(self) -> PeSchedule:
        return PeSchedule(
            mode=self.pe_mode,
            beta=self.beta,
            duration=self.pe_duration,
            n_pe=self.n_pe,
            p_pe=self.p_pe,
        )

    @property
    def init_episode_cap(self) -> int:
        return self.init_cap or self.step_cap


class Checkpoint(BaseModel):
    step: int
    coverage: float = Field(ge=0.0, le=1.0)
    goals: int = 0


class Counters(BaseModel):
    total_steps: int = Field(default=0, ge=0)
    init_steps: int = Field(default=0, ge=0)
    pe_steps: int = Field(default=0, ge=0)
    relabel_updates: int = Field(default=0, ge=0)
    episodes: int = Field(default=0, ge=0)
    goal_reaches: int = Field(default=0, ge=0)
    pe_episodes: int = Field(default=0, ge=0)
    lava_deaths: int = Field(default=0, ge=0)


class EpisodeTrace(BaseModel):
    goal: Position
    positions: List[Position]
    pe_boundary: int


class RunLog(BaseModel):
    config: RunConfig
    checkpoints: List[Checkpoint] = Field(default_factory=list)
    counters: Counters = Field(default_factory=Counters)
    heatmap: List[List[int]] = Field(default_factory=list)
    trace: Optional[EpisodeTrace] = None

    @field_validator("checkpoints")
    @classmethod
    def check_increasing(cls, value: List[Checkpoint]) -> List[Checkpoint]:
        steps = [c.step for c in value]
        if any(a >= b for a, b in zip(steps, steps[1:])):
            raise ValueError("Checkpoints must be strictly increasing in step.")
        return value
