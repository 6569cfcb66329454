"""Persistence landscapes sampled on a uniform grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GridMismatchError
from .homology import PersistenceDiagram

DEFAULT_GRID = (0.0, 5.0, 500)


def default_grid(t_min=DEFAULT_GRID[0], t_max=DEFAULT_GRID[1], points=DEFAULT_GRID[2]) -> np.ndarray:
    if not t_max > t_min or points < 2:
        raise ValueError("landscape grid needs t_min < t_max and at least two points")
    return np.linspace(t_min, t_max, int(points))


@dataclass(frozen=True, eq=False)
class PersistenceLandscape:
    """``levels[k - 1, i]`` holds ``lambda_k(grid[i])``."""

    grid: np.ndarray
    levels: np.ndarray

    @property
    def k_max(self) -> int:
        return self.levels.shape[0]

    def values(self, k: int = 1) -> np.ndarray:
        return landscape_values(self, k)


def _truncate(pairs, max_scale):
    pairs = np.array(pairs, dtype=float).reshape(-1, 2)
    inf = ~np.isfinite(pairs[:, 1])
    if np.any(inf):
        if not np.isfinite(max_scale):
            raise ValueError("infinite deaths need a finite max_scale to truncate at")
        pairs[inf, 1] = max_scale
    return pairs[pairs[:, 1] > pairs[:, 0]]


def landscape(diagram: PersistenceDiagram, dim: int, grid, k_max: int = 1,
              max_scale: float | None = None) -> PersistenceLandscape:
    """Landscape levels ``lambda_1 .. lambda_kmax`` of one homology dimension.

    ``lambda_k(t)`` is the k-th largest tent height ``max(0, min(t - b, d - t))``
    over the diagram's pairs, with infinite deaths cut at ``max_scale``
    (the diagram's own cap by default).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("landscape grid must be strictly increasing")
    cap = diagram.max_scale if max_scale is None else max_scale
    pairs = _truncate(diagram[dim], cap)
    levels = np.zeros((k_max, len(grid)))
    if len(pairs):
        tents = np.minimum(grid[:, None] - pairs[:, 0], pairs[:, 1] - grid[:, None])
        np.maximum(tents, 0.0, out=tents)
        kk = min(k_max, len(pairs))
        if kk < len(pairs):
            top = -np.partition(-tents, kk - 1, axis=1)[:, :kk]
        else:
            top = tents
        levels[:kk] = -np.sort(-top, axis=1)[:, :kk].T
    levels.setflags(write=False)
    grid = grid.copy()
    grid.setflags(write=False)
    return PersistenceLandscape(grid, levels)


def landscape_mean(landscapes) -> PersistenceLandscape:
    """Pointwise mean of landscapes sharing one grid and level count."""
    landscapes = list(landscapes)
    if not landscapes:
        raise ValueError("no landscapes to average")
    first = landscapes[0]
    for other in landscapes[1:]:
        if (other.grid.shape != first.grid.shape or not np.array_equal(other.grid, first.grid)
                or other.k_max != first.k_max):
            raise GridMismatchError("landscapes differ in grid or number of levels")
    levels = np.mean([l.levels for l in landscapes], axis=0)
    return PersistenceLandscape(first.grid, levels)


def landscape_values(landscape: PersistenceLandscape, k: int = 1) -> np.ndarray:
    """``(lambda_k(t_1), ..., lambda_k(t_G))`` in grid order."""
    if not 1 <= k <= landscape.k_max:
        raise ValueError(f"level {k} outside 1..{landscape.k_max}")
    return np.array(landscape.levels[k - 1])
