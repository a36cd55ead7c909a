from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ribnet.core.errors import InvalidDataError

DEFAULT_COUNT = 33


@dataclass(frozen=True)
class GridAxis:
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise InvalidDataError(f"grid axis needs at least one point (got {self.count})")
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise InvalidDataError("grid axis bounds must be finite")

    @property
    def step(self) -> float:
        return 0.0 if self.count == 1 else (self.stop - self.start) / (self.count - 1)

    def values(self) -> NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.count)

    def refined(self) -> "GridAxis":
        """Same interval, half the step."""
        return GridAxis(self.start, self.stop, 2 * self.count - 1)


@dataclass(frozen=True)
class Grid:
    axes: Tuple[GridAxis, ...]

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> NDArray[np.float64]:
        """All lattice points, shape (size, n), first axis slowest."""
        mesh = np.meshgrid(*(a.values() for a in self.axes), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def refined(self) -> "Grid":
        return Grid(tuple(a.refined() for a in self.axes))

    def to_json_dict(self) -> dict:
        return {"axes": [{"start": a.start, "stop": a.stop, "count": a.count} for a in self.axes]}


def default_grid(n: int, count: int = DEFAULT_COUNT) -> Grid:
    return Grid(tuple(GridAxis(-1.0, 1.0, count) for _ in range(n)))


def parse_grid(text: Optional[str], n: int) -> Grid:
    """Parse ``a,b,count[;a,b,count...]``; a single axis is repeated for every axis."""
    if text is None or not text.strip():
        return default_grid(n)
    axes = []
    for part in text.split(";"):
        fields = [f.strip() for f in part.split(",")]
        if len(fields) != 3:
            raise InvalidDataError(f"grid axis must look like start,stop,count: {part!r}")
        try:
            axes.append(GridAxis(float(fields[0]), float(fields[1]), int(fields[2])))
        except ValueError as e:
            raise InvalidDataError(f"bad grid axis {part!r}: {e}") from e
    if len(axes) == 1:
        axes = axes * n
    if len(axes) != n:
        raise InvalidDataError(f"grid has {len(axes)} axes, dataset has n = {n}")
    return Grid(tuple(axes))
