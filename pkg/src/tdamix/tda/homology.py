"""Vietoris-Rips filtrations and persistent homology over Z/2."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..errors import EmptyInputError, InvalidFiltrationError, InvalidIntervalError
from ._rips import rips_pairs


@dataclass(frozen=True, eq=False)
class Filtration:
    """Simplices with filtration values, sorted by (value, dimension, vertices)."""

    simplices: list
    max_dim: int
    max_scale: float

    def __len__(self):
        return len(self.simplices)

    def by_dim(self, dim: int) -> list:
        return [(s, v) for s, v in self.simplices if len(s) == dim + 1]


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Persistence pairs per homology dimension.

    ``pairs[dim]`` is an ``(m, 2)`` array of (birth, death); deaths may be
    ``inf``. Only pairs with ``death > birth`` are kept.
    """

    pairs: dict
    max_scale: float = np.inf

    def __post_init__(self):
        clean = {}
        for dim, arr in self.pairs.items():
            arr = np.asarray(arr, dtype=float).reshape(-1, 2)
            if np.any(arr[:, 0] > arr[:, 1]):
                raise InvalidIntervalError("birth after death in diagram")
            arr = arr[arr[:, 1] > arr[:, 0]]
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            clean[int(dim)] = arr[order]
        object.__setattr__(self, "pairs", clean)

    def __getitem__(self, dim: int) -> np.ndarray:
        return self.pairs.get(dim, np.empty((0, 2)))

    @property
    def dims(self):
        return sorted(self.pairs)

    def persistence(self, dim: int) -> np.ndarray:
        """Lifetimes of dimension ``dim`` features, infinite deaths capped at ``max_scale``."""
        p = self[dim]
        return np.minimum(p[:, 1], self.max_scale) - p[:, 0]


def build_rips(points, max_scale: float, max_homology_dim: int = 1) -> Filtration:
    """Explicit Rips filtration with simplices up to dimension ``max_homology_dim + 1``.

    Enumerates every simplex, so it is meant for small clouds; see
    :func:`rips_persistence` for large ones.
    """
    pts = _as_cloud(points)
    if not max_scale > 0:
        raise ValueError("max_scale must be positive")
    if max_homology_dim not in (0, 1):
        raise ValueError("max_homology_dim must be 0 or 1")
    n = len(pts)
    D = squareform(pdist(pts)) if n > 1 else np.zeros((1, 1))
    simplices = [((i,), 0.0) for i in range(n)]
    close = D <= max_scale
    for i, j in combinations(range(n), 2):
        if close[i, j]:
            simplices.append(((i, j), float(D[i, j])))
    if max_homology_dim == 1:
        for i, j, k in combinations(range(n), 3):
            if close[i, j] and close[i, k] and close[j, k]:
                simplices.append(((i, j, k), float(max(D[i, j], D[i, k], D[j, k]))))
    simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return Filtration(simplices, max_homology_dim + 1, float(max_scale))


def _as_cloud(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.size == 0 or len(pts) == 0:
        raise EmptyInputError("point cloud is empty")
    return pts


def _index_filtration(filtration: Filtration):
    index = {}
    values = []
    dims = []
    boundaries = []
    for pos, (simplex, value) in enumerate(filtration.simplices):
        simplex = tuple(simplex)
        if simplex in index:
            raise InvalidFiltrationError(f"simplex {simplex} listed twice")
        if pos and value < values[-1]:
            raise InvalidFiltrationError("filtration values must be non-decreasing")
        faces = []
        if len(simplex) > 1:
            for omit in range(len(simplex)):
                face = simplex[:omit] + simplex[omit + 1:]
                f = index.get(face)
                if f is None:
                    raise InvalidFiltrationError(f"face {face} of {simplex} appears after it")
                if values[f] > value:
                    raise InvalidFiltrationError(f"face {face} has a larger value than {simplex}")
                faces.append(f)
        index[simplex] = pos
        values.append(float(value))
        dims.append(len(simplex) - 1)
        boundaries.append(faces)
    return np.array(values), np.array(dims, dtype=int), boundaries


def reduce_boundary(filtration: Filtration) -> dict:
    """All persistence pairs, zero-length ones included, keyed by dimension.

    Standard column reduction of the boundary matrix with clearing:
    dimensions are reduced from the top down, and a column whose index
    turned up as a pivot one dimension higher is known to reduce to zero and
    is skipped. Homology is reported up to ``max_dim - 1``.
    """
    values, dims, boundaries = _index_filtration(filtration)
    top = filtration.max_dim
    n = len(values)
    low_to_col = {}
    reduced = {}
    cleared = np.zeros(n, dtype=bool)
    negative = np.zeros(n, dtype=bool)
    pairs = {d: [] for d in range(top)}
    for d in range(top, 0, -1):
        for j in np.nonzero(dims == d)[0]:
            if cleared[j]:
                continue
            col = set(boundaries[j])
            while col:
                other = low_to_col.get(max(col))
                if other is None:
                    break
                col ^= reduced[other]
            if col:
                low = max(col)
                low_to_col[low] = j
                reduced[j] = col
                cleared[low] = True
                negative[j] = True
                pairs[d - 1].append((values[low], values[j]))
    for i in range(n):
        if dims[i] < top and not negative[i] and i not in low_to_col:
            pairs[dims[i]].append((values[i], np.inf))
    return pairs


def compute_persistence(filtration: Filtration) -> PersistenceDiagram:
    """Persistence diagram of an explicit filtration (zero-length pairs dropped)."""
    return PersistenceDiagram(reduce_boundary(filtration), filtration.max_scale)


def rips_persistence(points, max_scale: float, max_homology_dim: int = 1) -> PersistenceDiagram:
    """Rips persistence straight from a point cloud, without listing simplices.

    Gives the same diagram as ``compute_persistence(build_rips(...))`` but
    scales to thousands of points.
    """
    pts = _as_cloud(points)
    if not max_scale > 0:
        raise ValueError("max_scale must be positive")
    if max_homology_dim not in (0, 1):
        raise ValueError("max_homology_dim must be 0 or 1")
    h0, n_comp, h1b, h1d = rips_pairs(pts, max_scale, max_homology_dim)
    pairs = {0: np.vstack([np.column_stack([np.zeros_like(h0), h0]),
                           np.column_stack([np.zeros(n_comp), np.full(n_comp, np.inf)])])}
    if max_homology_dim == 1:
        pairs[1] = np.column_stack([h1b, h1d])
    return PersistenceDiagram(pairs, float(max_scale))


def betti_at(diagram: PersistenceDiagram, dim: int, b, d):
    """Number of features born by ``b`` and still alive after ``d``.

    ``b`` and ``d`` may be arrays (broadcast together).
    """
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(b > d):
        raise InvalidIntervalError("betti_at needs b <= d")
    p = diagram[dim]
    if p.size == 0:
        return np.zeros(np.broadcast(b, d).shape, dtype=int) if (b.ndim or d.ndim) else 0
    alive = (p[:, 0] <= b[..., None]) & (p[:, 1] > d[..., None])
    out = alive.sum(axis=-1)
    return int(out) if out.ndim == 0 else out
