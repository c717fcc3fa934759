from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator


class RelabelPlan(BaseModel):
    """Trajectory indices whose states become hindsight goals, in the order they are replayed."""

    model_config = ConfigDict(frozen=True)

    indices: List[int]
    k: int = Field(ge=0)

    @field_validator("indices")
    @classmethod
    def check_distinct(cls, value: List[int]) -> List[int]:
        if len(set(value)) != len(value):
            raise ValueError(f"Relabel indices must be distinct, got {value}.")
        if any(i < 1 for i in value):
            raise ValueError("Index 0 is the episode start and cannot be a hindsight goal.")
        return value
