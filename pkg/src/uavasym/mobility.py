"""Markov random walk of the UAV over a square grid centred on the RC."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import ConfigError

# east, north, west, south
MOVES = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass(frozen=True)
class UavState:
    """UAV position as integer lattice indices; ``pos`` gives metres."""

    ij: tuple[int, int] = (0, 0)
    altitude: float = 30.0
    step: float = 10.0
    d_max: float = 100.0

    def __post_init__(self):
        if self.step <= 0 or self.altitude <= 0:
            raise ValueError("step and altitude must be > 0")
        if self.d_max < self.step:
            raise ConfigError(f"d_max={self.d_max} < step={self.step}: the UAV cannot leave the origin")
        if not self.allows(*self.ij):
            raise ValueError(f"start position {self.pos} lies outside d_max")

    @property
    def pos(self) -> tuple[float, float]:
        return (self.ij[0] * self.step, self.ij[1] * self.step)

    @property
    def distance(self) -> float:
        return math.hypot(*self.pos)

    def allows(self, i: int, j: int) -> bool:
        # small slack so lattice points exactly on the circle stay legal
        return math.hypot(i * self.step, j * self.step) <= self.d_max * (1 + 1e-12)


def random_walk_step(state: UavState, rng: np.random.Generator) -> UavState:
    """Move one cell in a uniformly drawn direction, redrawing illegal moves."""
    i, j = state.ij
    while True:
        di, dj = MOVES[rng.integers(4)]
        if state.allows(i + di, j + dj):
            return replace(state, ij=(i + di, j + dj))


def random_walk(state: UavState, steps: int, rng: np.random.Generator, chunk: int = 4096) -> np.ndarray:
    """Trajectory of ``steps`` moves as an ``(steps + 1, 2)`` array of lattice indices."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    path = np.empty((steps + 1, 2), dtype=np.int64)
    i, j = state.ij
    path[0] = i, j
    t = 0
    while t < steps:
        for k in rng.integers(4, size=chunk).tolist():
            di, dj = MOVES[k]
            if state.allows(i + di, j + dj):
                i += di
                j += dj
                t += 1
                path[t] = i, j
                if t == steps:
                    break
    return path
