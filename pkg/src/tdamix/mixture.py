"""Finite mixtures of component densities and choice of the component count
by mean integrated squared error over repeated runs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .density import imse
from .errors import ComponentFactoryError
from .rng import substream

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixtureModel:
    """``f(y) = sum_i pi_i f_i(y)`` with fixed mixing proportions."""

    weights: np.ndarray
    components: tuple

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValueError("a mixture needs at least one component")
        if len(w) != len(comps):
            raise ValueError(f"{len(w)} weights for {len(comps)} components")
        if np.any(w < 0) or np.any(w > 1):
            raise ValueError("mixing proportions must lie in [0, 1]")
        if np.any(w == 0):
            raise ValueError("zero mixing proportion: drop the component instead")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixing proportions sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def g(self) -> int:
        return len(self.components)

    def __call__(self, x):
        return mix_evaluate(self, x)


def mix_evaluate(model: MixtureModel, x):
    x = np.asarray(x, dtype=float)
    # repeated component objects are evaluated once with their pooled weight;
    # a mixture of one distinct density is that density, weights summing to 1
    groups = {}
    for w, f in zip(model.weights, model.components):
        groups.setdefault(id(f), [f, []])[1].append(w)
    if len(groups) == 1:
        (f, _), = groups.values()
        total = np.asarray(f(x), dtype=float)
    else:
        total = np.zeros(x.shape)
        for f, ws in groups.values():
            total = total + math.fsum(ws) * np.asarray(f(x), dtype=float)
    return float(total) if total.ndim == 0 else total


def build_equal_mixture(components) -> MixtureModel:
    comps = tuple(components)
    if not comps:
        raise ValueError("no components given")
    return MixtureModel(np.full(len(comps), 1.0 / len(comps)), comps)


@dataclass(frozen=True)
class ModelSelectionReport:
    raw: dict          # g -> per-run IMSE array
    means: dict        # g -> mean IMSE
    runs: int
    g_star: int

    @property
    def g_values(self) -> list:
        return sorted(self.raw)


def select_g(component_factory, g_range, runs: int, reference, range_, seed: int = 0,
             workers: int = 1) -> ModelSelectionReport:
    """Mean IMSE of equal-weight mixtures for each component count in ``g_range``.

    ``component_factory(g, run, i, rng)`` returns a fresh density for
    component ``i`` of run ``run``. Cell ``(g, run)`` draws its components
    from the substream ``(seed, "mixture", g, run)``, so the report does not
    depend on ``workers``. Ties in the mean go to the smallest ``g``.
    """
    gs = sorted(set(int(g) for g in g_range))
    if not gs:
        raise ValueError("g_range is empty")
    if gs[0] < 1:
        raise ValueError("component counts must be at least 1")
    if runs < 1:
        raise ValueError("runs must be at least 1")

    def cell(g, run):
        rng = substream(seed, "mixture", g, run)
        comps = []
        for i in range(g):
            try:
                comps.append(component_factory(g, run, i, rng))
            except Exception as exc:
                raise ComponentFactoryError(
                    f"component {i} of g={g}, run={run} failed: {exc}") from exc
        return imse(build_equal_mixture(comps), reference, range_)

    cells = [(g, run) for g in gs for run in range(runs)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda c: cell(*c), cells))
    else:
        values = [cell(g, run) for g, run in cells]
    raw = {g: np.array(values[i * runs:(i + 1) * runs]) for i, g in enumerate(gs)}
    means = {g: float(np.mean(v)) for g, v in raw.items()}
    g_star = min(gs, key=lambda g: (means[g], g))
    return ModelSelectionReport(raw, means, runs, g_star)
