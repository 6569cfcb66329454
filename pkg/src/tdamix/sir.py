"""Sampling importance resampling of landmark parameters.

A pool of ``M`` landmark sets is drawn from the order-statistics prior, each
set is weighted by the likelihood of the curve given its linear
interpolation (with the variance ``eta`` integrated out), and ``s`` sets are
resampled in proportion to their weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .curve import (
    LandmarkSet,
    ParametrizedCurve,
    _check_landmarks,
    interpolation_points,
    srvf,
    srvf_values,
)
from .errors import DegenerateWeightsError, InvalidDomainError

ETA_FLOOR = 1e-8
DISTANCE_FLOOR = 1e-9
_PANELS = 32
_NODES_PER_PANEL = 8  # 256 nodes in total


@dataclass(frozen=True)
class SirConfig:
    M: int
    s: int
    k: int
    eta_upper: float = np.pi
    seed: int = 0

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if not 1 <= self.s <= self.M:
            raise ValueError(f"need 1 <= s <= M, got s={self.s}, M={self.M}")
        if self.k < 2:
            raise ValueError("k must be at least 2 for a linear interpolation")
        if not self.eta_upper > ETA_FLOOR:
            raise ValueError("eta_upper must be positive")


@dataclass(frozen=True)
class WeightedDraw:
    landmarks: LandmarkSet
    distance: float
    log_weight: float
    normalized_weight: float

    @property
    def weight(self) -> float:
        return float(np.exp(self.log_weight))


@dataclass
class SirResult:
    config: SirConfig
    pool: list
    posterior_indices: np.ndarray
    distances: np.ndarray = field(repr=False)

    @property
    def posterior(self) -> list:
        return [self.pool[i].landmarks for i in self.posterior_indices]

    @property
    def normalized_weights(self) -> np.ndarray:
        return np.array([w.normalized_weight for w in self.pool])

    @property
    def mean_distance(self) -> float:
        """Mean elastic distance over the resampled (posterior) draws."""
        return float(np.mean(self.distances[self.posterior_indices]))


# ---------------------------------------------------------------------------
# prior


def draw_prior(config: SirConfig, domain, rng: np.random.Generator, support=None) -> list:
    """Draw ``config.M`` sorted landmark sets of size ``config.k``.

    With ``support=None`` each set is the order statistics of ``k`` i.i.d.
    uniforms on ``domain = (lo, hi)``. When ``support`` is given (a finite
    set of admissible parameters, e.g. the population's), ``k`` distinct
    values are drawn uniformly from it instead.
    """
    lo, hi = (float(v) for v in domain)
    if not hi > lo:
        raise InvalidDomainError(f"empty landmark domain [{lo}, {hi})")
    M, k = config.M, config.k
    if support is not None:
        support = np.sort(np.asarray(support, dtype=float))
        support = support[(support >= lo) & (support < hi)]
        if len(support) < k:
            raise InvalidDomainError(f"support has {len(support)} values, need {k}")
        rows = np.empty((M, k))
        for m in range(M):
            idx = rng.choice(len(support), size=k, replace=False)
            rows[m] = support[np.sort(idx)]
    else:
        rows = np.sort(rng.uniform(lo, hi, size=(M, k)), axis=1)
        tied = np.nonzero(np.any(np.diff(rows, axis=1) <= 0, axis=1))[0]
        for m in tied:  # measure-zero event; redraw
            while np.any(np.diff(rows[m]) <= 0):
                rows[m] = np.sort(rng.uniform(lo, hi, size=k))
    return [LandmarkSet(row) for row in rows]


# ---------------------------------------------------------------------------
# likelihood


@lru_cache(maxsize=32)
def _log_eta_rule(eta_upper: float):
    # composite Gauss-Legendre in u = log(eta) on [log ETA_FLOOR, log eta_upper]
    x, w = np.polynomial.legendre.leggauss(_NODES_PER_PANEL)
    edges = np.linspace(np.log(ETA_FLOOR), np.log(eta_upper), _PANELS + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * x).ravel()
    logw = np.log((half[:, None] * w).ravel())
    return u, logw


def log_marginal_likelihood(d, n: int, eta_upper: float = np.pi):
    """``log of int_0^eta_upper eta^-n exp(-d^2 / (2 eta)) d eta``.

    The lower limit is ``ETA_FLOOR`` and distances below ``DISTANCE_FLOOR``
    are raised to it, which keeps the value finite at ``d = 0``.
    """
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(d)):
        raise FloatingPointError("non-finite elastic distance")
    if not eta_upper > ETA_FLOOR:
        raise ValueError("eta_upper must exceed the integration floor")
    d = np.maximum(d, DISTANCE_FLOOR)
    u, logw = _log_eta_rule(float(eta_upper))
    # d(eta) = eta du, hence the (1 - n) exponent
    terms = logw + (1 - n) * u - (d[..., None] ** 2) / (2.0 * np.exp(u))
    out = logsumexp(terms, axis=-1)
    return float(out) if out.ndim == 0 else out


def log_weight(curve: ParametrizedCurve, landmarks: LandmarkSet, eta_upper=np.pi, n=None) -> float:
    """Log likelihood weight of a landmark set; ``n`` defaults to the landmark count."""
    d = _PoolEvaluator(curve).distance(landmarks.thetas)
    return log_marginal_likelihood(d, landmarks.k if n is None else n, eta_upper)


class _PoolEvaluator:
    """Elastic distances from one curve to many landmark interpolations."""

    def __init__(self, curve: ParametrizedCurve):
        self.curve = curve
        self.q = srvf(curve).values
        t = curve.params
        dt = np.diff(t)
        self.trap = np.concatenate([[dt[0] / 2], (dt[1:] + dt[:-1]) / 2, [dt[-1] / 2]])

    def distance(self, thetas) -> float:
        thetas = np.asarray(thetas, dtype=float)
        if len(thetas) < 2:
            raise ValueError("interpolation needs at least two landmarks")
        c = self.curve
        _check_landmarks(c, thetas)
        knots = c.evaluate(thetas)
        pts = interpolation_points(c.params, thetas, knots, c.period)
        if c.periodic:
            pts[-1] = pts[0]
        q = srvf_values(c.params, pts, c.period)
        sq = np.sum((self.q - q) ** 2, axis=1)
        return float(np.sqrt(max(np.dot(self.trap, sq), 0.0)))


# ---------------------------------------------------------------------------
# weights and resampling


def normalize_log_weights(log_weights) -> np.ndarray:
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0 or np.any(np.isnan(lw)) or not np.any(np.isfinite(lw)):
        raise DegenerateWeightsError("no positive weight in the pool")
    w = np.exp(lw - np.max(lw))
    return w / w.sum()


def make_pool(landmark_sets, log_weights, distances=None) -> list:
    with np.errstate(divide="ignore"):
        lw = np.asarray(log_weights, dtype=float)
    norm = normalize_log_weights(lw)
    if distances is None:
        distances = np.full(len(lw), np.nan)
    return [
        WeightedDraw(ls, float(d), float(l), float(p))
        for ls, d, l, p in zip(landmark_sets, distances, lw, norm)
    ]


def evaluate_pool(curve: ParametrizedCurve, landmark_sets, eta_upper=np.pi, n=None) -> list:
    ev = _PoolEvaluator(curve)
    d = np.array([ev.distance(ls.thetas) for ls in landmark_sets])
    lw = np.array(
        [log_marginal_likelihood(di, ls.k if n is None else n, eta_upper) for di, ls in zip(d, landmark_sets)]
    )
    return make_pool(landmark_sets, lw, d)


def resample_indices(normalized_weights, s: int, rng: np.random.Generator) -> np.ndarray:
    p = np.asarray(normalized_weights, dtype=float)
    if p.size == 0 or not np.all(np.isfinite(p)) or np.any(p < 0) or p.sum() <= 0:
        raise DegenerateWeightsError("cannot resample from all-zero weights")
    return rng.choice(len(p), size=s, replace=True, p=p / p.sum())


def resample(pool, s: int, rng: np.random.Generator) -> list:
    """Draw ``s`` landmark sets with replacement, proportionally to weight."""
    idx = resample_indices([w.normalized_weight for w in pool], s, rng)
    return [pool[i].landmarks for i in idx]


def run_sir(curve: ParametrizedCurve, config: SirConfig, rng: np.random.Generator,
            support=None, n=None) -> SirResult:
    lo, hi = curve.domain
    if not curve.periodic:
        hi = np.nextafter(hi, np.inf)
    prior = draw_prior(config, (lo, hi), rng, support=support)
    pool = evaluate_pool(curve, prior, config.eta_upper, n=n)
    idx = resample_indices([w.normalized_weight for w in pool], config.s, rng)
    return SirResult(config, pool, idx, np.array([w.distance for w in pool]))


@dataclass
class KSelection:
    k_star: int
    table: dict
    results: dict = field(repr=False)


def select_k(curve: ParametrizedCurve, template: SirConfig, k_range, rng: np.random.Generator,
             support=None) -> KSelection:
    """Run SIR for every ``k`` and keep the one with the smallest mean posterior distance.

    Ties go to the smaller ``k``. Each ``k`` gets its own child generator so
    the table does not depend on the order of ``k_range``.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range is empty")
    if ks[0] < 2:
        raise ValueError("every k must be at least 2; a single landmark has no interpolation")
    children = rng.spawn(len(ks))
    results, table = {}, {}
    for k, child in zip(ks, children):
        cfg = SirConfig(template.M, template.s, k, template.eta_upper, template.seed)
        results[k] = run_sir(curve, cfg, child, support=support)
        table[k] = results[k].mean_distance
    k_star = min(ks, key=lambda k: (table[k], k))
    return KSelection(k_star, table, results)
