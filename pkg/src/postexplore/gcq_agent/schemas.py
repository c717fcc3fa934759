from __future__ import annotations

from typing import NamedTuple, Optional

from ..grid_env.schemas import Action, Position


class Transition(NamedTuple):
    """One environment step <s, a, r, s', g>; post-exploration steps carry no goal."""

    s: Position
    a: Action
    r: float
    s_next: Position
    terminal: bool
    goal: Optional[Position]
