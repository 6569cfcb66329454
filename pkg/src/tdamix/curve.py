"""Discretized parametrized curves, square root velocity functions and the
elastic distance between a curve and a landmark interpolation of it.

A curve is stored as samples ``points[j] = C(params[j])``. Closed curves carry
their period and repeat the first point at ``params[0] + period``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCurveError,
    GridMismatchError,
    InvalidGeometryError,
    OutOfDomainError,
)

CLOSURE_TOL = 1e-9
ZERO_SPEED = 1e-12


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParametrizedCurve:
    """Samples of a map ``C: I -> R^n``.

    Parameters
    ----------
    params : array_like, shape (N,)
        Strictly increasing parameter values.
    points : array_like, shape (N, n)
        Curve positions at ``params``.
    period : float, optional
        Period ``L`` of a closed curve. When set, ``params[-1] - params[0]``
        must equal ``L`` and the first and last points must coincide.
    """

    params: np.ndarray
    points: np.ndarray
    period: float | None = None

    def __post_init__(self):
        params = _frozen(self.params)
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        points.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        if params.ndim != 1 or len(params) < 2:
            raise InvalidGeometryError("a curve needs at least two parameter values")
        if len(points) != len(params):
            raise InvalidGeometryError(
                f"{len(params)} parameter values but {len(points)} points"
            )
        if not np.all(np.diff(params) > 0):
            raise InvalidGeometryError("parameter values must be strictly increasing")
        if not np.all(np.isfinite(points)):
            raise InvalidGeometryError("curve points must be finite")
        if self.period is not None:
            L = float(self.period)
            object.__setattr__(self, "period", L)
            if L <= 0:
                raise InvalidGeometryError("period must be positive")
            if abs((params[-1] - params[0]) - L) > CLOSURE_TOL * max(1.0, L):
                raise InvalidGeometryError("periodic curve grid must span exactly one period")
            if np.max(np.abs(points[-1] - points[0])) > CLOSURE_TOL:
                raise InvalidGeometryError("periodic curve must end where it starts")

    @property
    def periodic(self) -> bool:
        return self.period is not None

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.params[0]), float(self.params[-1])

    def __len__(self):
        return len(self.params)

    def evaluate(self, t) -> np.ndarray:
        """Piecewise-linear evaluation of the curve at parameter values ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.periodic:
            t = self.params[0] + np.mod(t - self.params[0], self.period)
        return np.column_stack(
            [np.interp(t, self.params, self.points[:, c]) for c in range(self.dim)]
        )

    def translate(self, offset) -> "ParametrizedCurve":
        return ParametrizedCurve(self.params, self.points + np.asarray(offset, float), self.period)


@dataclass(frozen=True, eq=False)
class SRVF:
    """Square root velocity function ``q(t) = C'(t) / sqrt(|C'(t)|)`` on a grid."""

    params: np.ndarray
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class LandmarkSet:
    """Sorted landmark parameters ``theta_(1) < ... < theta_(k)``."""

    thetas: np.ndarray

    def __post_init__(self):
        thetas = _frozen(np.atleast_1d(self.thetas))
        object.__setattr__(self, "thetas", thetas)
        if thetas.ndim != 1 or len(thetas) < 1:
            raise InvalidGeometryError("a landmark set needs at least one parameter")
        if not np.all(np.diff(thetas) > 0):
            raise InvalidGeometryError("landmark parameters must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.thetas)


# ---------------------------------------------------------------------------
# generators


def torus_point(phi, psi, R: float, r: float) -> np.ndarray:
    """Embed torus angles (``phi`` around the axis, ``psi`` around the tube)."""
    _check_torus(R, r)
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    ring = R + r * np.cos(psi)
    return np.stack([ring * np.cos(phi), ring * np.sin(phi), r * np.sin(psi)], axis=-1)


def _check_torus(R, r):
    if not (r > 0 and R > r):
        raise InvalidGeometryError(f"torus needs R > r > 0, got R={R}, r={r}")


def torus_sample(M: int, R: float, r: float, rng: np.random.Generator, return_angles=False):
    """Draw ``M`` torus points with both angles uniform on ``[0, 2*pi)``.

    Uniformity is in the intrinsic angles, not in surface area, so the inner
    side of the ring is sampled more densely.
    """
    _check_torus(R, r)
    if M < 1:
        raise ValueError("M must be at least 1")
    phi = rng.uniform(0.0, 2 * np.pi, M)
    psi = rng.uniform(0.0, 2 * np.pi, M)
    pts = torus_point(phi, psi, R, r)
    if return_angles:
        return pts, phi, psi
    return pts


def circle_curve(r: float, grid) -> ParametrizedCurve:
    """Circle of radius ``r`` about the origin; closed when ``grid`` spans one turn."""
    if not r > 0:
        raise InvalidGeometryError("circle radius must be positive")
    grid = np.asarray(grid, dtype=float)
    pts = np.column_stack([r * np.cos(grid), r * np.sin(grid)])
    period = None
    if len(grid) >= 2 and abs(grid[-1] - grid[0] - 2 * np.pi) <= CLOSURE_TOL:
        pts[-1] = pts[0]
        period = 2 * np.pi
    return ParametrizedCurve(grid, pts, period)


def closed_curve_from_cloud(points, angles) -> ParametrizedCurve:
    """Order a point cloud by an angular coordinate and close it into a loop.

    The result is periodic with period ``2*pi``; parameter ``t`` of each sample
    is its angle, shifted so the smallest angle comes first.
    """
    points = np.asarray(points, dtype=float)
    angles = np.mod(np.asarray(angles, dtype=float), 2 * np.pi)
    order = np.argsort(angles, kind="stable")
    t = angles[order]
    pts = points[order]
    return ParametrizedCurve(
        np.append(t, t[0] + 2 * np.pi), np.vstack([pts, pts[:1]]), 2 * np.pi
    )


# ---------------------------------------------------------------------------
# SRVF and distances


def _velocity(params, points, period):
    # two-point central differences; np.gradient's three-point stencil for
    # uneven spacing amplifies noise badly when neighbouring gaps differ a lot
    if period is None:
        vel = np.empty_like(points)
        vel[1:-1] = (points[2:] - points[:-2]) / (params[2:] - params[:-2])[:, None]
        vel[0] = (points[1] - points[0]) / (params[1] - params[0])
        vel[-1] = (points[-1] - points[-2]) / (params[-1] - params[-2])
        return vel
    # wrap: the closing sample duplicates the first one
    t = np.concatenate([[params[-2] - period], params, [params[1] + period]])
    p = np.vstack([points[-2:-1], points, points[1:2]])
    return (p[2:] - p[:-2]) / (t[2:] - t[:-2])[:, None]


def srvf_values(params, points, period=None) -> np.ndarray:
    vel = _velocity(params, points, period)
    speed = np.linalg.norm(vel, axis=1)
    q = np.zeros_like(vel)
    moving = speed >= ZERO_SPEED
    q[moving] = vel[moving] / np.sqrt(speed[moving])[:, None]
    return q


def srvf(curve: ParametrizedCurve) -> SRVF:
    """Square root velocity function of ``curve`` on its own grid.

    Velocities use central differences inside the grid and one-sided
    differences at open ends; closed curves wrap around.
    """
    if np.all(np.ptp(curve.points, axis=0) == 0):
        raise DegenerateCurveError("all curve points coincide")
    return SRVF(curve.params, _frozen(srvf_values(curve.params, curve.points, curve.period)))


def srvf_distance(q1: SRVF, q2: SRVF) -> float:
    if q1.params.shape != q2.params.shape or not np.array_equal(q1.params, q2.params):
        raise GridMismatchError("SRVFs live on different parameter grids")
    sq = np.sum((q1.values - q2.values) ** 2, axis=1)
    return float(np.sqrt(max(np.trapezoid(sq, q1.params), 0.0)))


def elastic_distance(c1: ParametrizedCurve, c2: ParametrizedCurve) -> float:
    """L2 distance between the SRVFs of two curves sharing one grid (trapezoid rule)."""
    if c1.params.shape != c2.params.shape or not np.array_equal(c1.params, c2.params):
        raise GridMismatchError("curves must share a parameter grid; resample first")
    return srvf_distance(srvf(c1), srvf(c2))


def _check_landmarks(curve, thetas):
    lo, hi = curve.domain
    if curve.periodic:
        ok = (thetas[0] >= lo) and (thetas[-1] < hi)
    else:
        ok = (thetas[0] >= lo) and (thetas[-1] <= hi)
    if not ok:
        raise OutOfDomainError(
            f"landmarks [{thetas[0]}, {thetas[-1]}] outside curve domain [{lo}, {hi}]"
        )


def interpolation_points(params, thetas, knots, period=None) -> np.ndarray:
    """Polyline through ``knots`` placed at ``thetas``, sampled at ``params``.

    Open curves hold the end knots constant outside ``[thetas[0], thetas[-1]]``;
    closed curves join the last knot back to the first.
    """
    if period is not None:
        thetas = np.append(thetas, thetas[0] + period)
        knots = np.vstack([knots, knots[:1]])
        params = thetas[0] + np.mod(params - thetas[0], period)
    return np.column_stack(
        [np.interp(params, thetas, knots[:, c]) for c in range(knots.shape[1])]
    )


def linear_interpolation(curve: ParametrizedCurve, landmarks: LandmarkSet) -> ParametrizedCurve:
    """Linear interpolation of ``curve`` through its landmark points, on the curve's grid."""
    thetas = landmarks.thetas
    if len(thetas) < 2:
        raise OutOfDomainError("interpolation needs at least two landmarks")
    _check_landmarks(curve, thetas)
    knots = curve.evaluate(thetas)
    pts = interpolation_points(curve.params, thetas, knots, curve.period)
    if curve.periodic:
        pts[-1] = pts[0]
    return ParametrizedCurve(curve.params, pts, curve.period)
