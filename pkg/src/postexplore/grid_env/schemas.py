"""
Static world types for the gridworlds: cell kinds, the four cardinal actions, the
agent's state and the immutable `GridMap`.

Coordinates are `(x, y)` tuples with `x` the column and `y` the row, row 0 at the top.
`GridMap.cells` is row-major, so a cell is read as `cells[y][x]`.
"""

from __future__ import annotations

from enum import Enum, IntEnum
from typing import List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

Position = Tuple[int, int]


class Cell(str, Enum):
    FREE = "."
    WALL = "#"
    LAVA = "L"


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3

    @property
    def delta(self) -> Position:
        return _DELTAS[self]


_DELTAS = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}

ACTIONS: Tuple[Action, ...] = tuple(Action)


class EnvFamily(str, Enum):
    FOUR_ROOMS = "four_rooms"
    LAVA_CROSSING = "lava_crossing"
    LAVA_GAP = "lava_gap"

    @property
    def procedural(self) -> bool:
        return self is not EnvFamily.FOUR_ROOMS


class EnvState(NamedTuple):
    pos: Position
    terminal: bool = False


class GridMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int
    height: int
    cells: Tuple[Tuple[Cell, ...], ...]
    start: Position
    env_seed: Optional[int] = None

    @model_validator(mode="after")
    def check_layout(self) -> "GridMap":
        if len(self.cells) != self.height or any(len(row) != self.width for row in self.cells):
            raise ValueError(f"Cell grid does not match declared size {self.width}x{self.height}.")
        for x in range(self.width):
            if self.cells[0][x] is not Cell.WALL or self.cells[-1][x] is not Cell.WALL:
                raise ValueError("The outer border must be entirely Wall.")
        for y in range(self.height):
            if self.cells[y][0] is not Cell.WALL or self.cells[y][-1] is not Cell.WALL:
                raise ValueError("The outer border must be entirely Wall.")
        if not self.in_bounds(self.start) or not self.is_free(self.start):
            raise ValueError(f"Start {self.start} is not a Free cell.")
        sx, sy = self.start
        if not any(self.is_free((sx + dx, sy + dy)) for dx, dy in _DELTAS.values()):
            raise ValueError(f"Start {self.start} cannot reach any other Free cell.")
        return self

    def in_bounds(self, pos: Position) -> bool:
        x, y = pos
        return 0 <= x < self.width and 0 <= y < self.height

    def cell(self, pos: Position) -> Cell:
        x, y = pos
        return self.cells[y][x]

    def is_free(self, pos: Position) -> bool:
        return self.cells[pos[1]][pos[0]] is Cell.FREE

    def free_cells(self) -> List[Position]:
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.cells[y][x] is Cell.FREE
        ]

    def to_text(self) -> str:
        """Plain-text grid: `#` wall, `.` free, `L` lava, `S` start; one line per row."""
        lines = []
        for y, row in enumerate(self.cells):
            chars = [cell.value for cell in row]
            if y == self.start[1]:
                chars[self.start[0]] = "S"
            lines.append("".join(chars))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, env_seed: Optional[int] = None) -> "GridMap":
        rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
        start: Optional[Position] = None
        cells = []
        for y, line in enumerate(rows):
            row = []
            for x, char in enumerate(line):
                if char == "S":
                    start = (x, y)
                    char = Cell.FREE.value
                row.append(Cell(char))
            cells.append(tuple(row))
        if start is None:
            raise ValueError("Map text has no start cell 'S'.")
        return cls(
            width=len(rows[0]),
            height=len(rows),
            cells=tuple(cells),
            start=start,
            env_seed=env_seed,
        )
