"""Rips filtrations, persistent homology (H0, H1) and persistence landscapes."""

from .homology import (
    Filtration,
    PersistenceDiagram,
    betti_at,
    build_rips,
    compute_persistence,
    reduce_boundary,
    rips_persistence,
)
from .landscape import (
    PersistenceLandscape,
    default_grid,
    landscape,
    landscape_mean,
    landscape_values,
)

__all__ = [
    "Filtration",
    "PersistenceDiagram",
    "PersistenceLandscape",
    "betti_at",
    "build_rips",
    "compute_persistence",
    "default_grid",
    "landscape",
    "landscape_mean",
    "landscape_values",
    "reduce_boundary",
    "rips_persistence",
]
