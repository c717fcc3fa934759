from typing import Dict, Optional

from pydantic import BaseModel, Field, model_validator

from ..grid_env.schemas import Position


class GoalOutcome(BaseModel):
    reached: bool
    path_length: Optional[int] = None


class EvalReport(BaseModel):
    step: int = Field(ge=0)
    coverage: float = Field(ge=0.0, le=1.0)
    per_goal: Dict[Position, GoalOutcome]

    @model_validator(mode="after")
    def check_coverage(self) -> "EvalReport":
        reached = sum(outcome.reached for outcome in self.per_goal.values())
        if self.per_goal and abs(self.coverage - reached / len(self.per_goal)) > 1e-12:
            raise ValueError("Coverage must equal the fraction of reached goals.")
        return self


class CurvePoint(BaseModel):
    step: int
    mean: float
    stderr: float
