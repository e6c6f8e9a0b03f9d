"""Tetrahedral projection onto the pivot plane and the exclusion predicates built on it.

Pivot ``p1`` sits at (-delta/2, 0) and ``p2`` at (+delta/2, 0); every other
object is drawn at the apex of the triangle whose sides are its distances to
the two pivots, always above the X-axis.  For metrics with the four-point
property the planar distance between two apexes never exceeds the true
distance, which is what makes every predicate here sound.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NonMetricInput

TRIANGLE_TOLERANCE = 1e-9


class PlanarPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class RotationParams:
    theta: float
    h: float
    m: float  # slope; math.inf when the fit is vertical


class Verdict(enum.Enum):
    EXCLUDE_P1_SIDE = "exclude_p1_side"
    EXCLUDE_P2_SIDE = "exclude_p2_side"
    NONE = "none"


def project(d1: float, d2: float, delta: float) -> PlanarPoint:
    """Apex of the triangle with base ``delta`` and sides ``d1`` (to p1) and ``d2`` (to p2)."""
    if not delta > 0:
        raise NonMetricInput(f"pivot separation must be positive, got {delta}")
    if d1 < 0 or d2 < 0:
        raise NonMetricInput("distances must be nonnegative")
    tol = TRIANGLE_TOLERANCE * max(d1, d2, delta)
    if d1 > d2 + delta + tol or d2 > d1 + delta + tol or delta > d1 + d2 + tol:
        raise NonMetricInput(f"({d1}, {d2}, {delta}) violates the triangle inequality")
    x = (d1 * d1 - d2 * d2) / (2.0 * delta)
    a = x + 0.5 * delta
    return PlanarPoint(x, math.sqrt(max(0.0, d1 * d1 - a * a)))


def project_many(d1: np.ndarray, d2: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`project` without the triangle check."""
    if not delta > 0:
        raise NonMetricInput(f"pivot separation must be positive, got {delta}")
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    x = (d1 * d1 - d2 * d2) / (2.0 * delta)
    a = x + 0.5 * delta
    y = np.sqrt(np.maximum(0.0, d1 * d1 - a * a))
    return x, y


def planar_lower_bound(a: PlanarPoint, b: PlanarPoint) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def hyperbolic_excludes(d1: float, d2: float, t: float) -> Verdict:
    """Triangle-inequality exclusion: needs |d1 - d2| > 2t; drops the farther pivot's side."""
    if d1 - d2 > 2.0 * t:
        return Verdict.EXCLUDE_P1_SIDE
    if d2 - d1 > 2.0 * t:
        return Verdict.EXCLUDE_P2_SIDE
    return Verdict.NONE


def hilbert_excludes(d1: float, d2: float, delta: float, t: float) -> Verdict:
    """Four-point exclusion: |d1^2 - d2^2| / delta > 2t, i.e. the query apex is more than t off the Y-axis."""
    if not delta > 0:
        raise ValueError(f"pivot separation must be positive, got {delta}")
    v = (d1 * d1 - d2 * d2) / delta
    if v > 2.0 * t:
        return Verdict.EXCLUDE_P1_SIDE
    if -v > 2.0 * t:
        return Verdict.EXCLUDE_P2_SIDE
    return Verdict.NONE


def cover_radius_excludes(dq: float, cr: float, t: float) -> bool:
    """True when the ball of radius ``cr`` around the pivot cannot meet the query ball."""
    return dq > cr + t


def fit_line(points: Sequence[PlanarPoint] | np.ndarray) -> RotationParams:
    """Least-squares line y = m x + b through the points, as a rotation about its X-intercept."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("fit_line needs at least two points")
    return fit_line_xy(pts[:, 0], pts[:, 1])


def fit_line_xy(xs: np.ndarray, ys: np.ndarray) -> RotationParams:
    xbar = float(np.mean(xs))
    ybar = float(np.mean(ys))
    dx = xs - xbar
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        return RotationParams(theta=math.pi / 2, h=xbar, m=math.inf)
    m = float(np.dot(dx, ys - ybar)) / sxx
    if abs(m) < 1e-12:
        return RotationParams(theta=0.0, h=xbar, m=0.0)
    return RotationParams(theta=math.atan(m), h=xbar - ybar / m, m=m)


def rotate(p: PlanarPoint, params: RotationParams) -> tuple[float, float]:
    c, s = math.cos(params.theta), math.sin(params.theta)
    dx = p[0] - params.h
    return dx * c - p[1] * s, dx * s + p[1] * c


def align_to_line(xs: np.ndarray, ys: np.ndarray, params: RotationParams) -> np.ndarray:
    """Coordinate of each point along the fitted line (origin-free; splits are translation invariant)."""
    return xs * math.cos(params.theta) + ys * math.sin(params.theta)


STRATEGIES = (
    "split_x_median",
    "split_y_median",
    "pca_major",
    "pca_minor",
    "lr_orthogonal",
    "lr_parallel",
    "radial_centre",
    "radial_corner",
)


def strategy_scores(xs: np.ndarray, ys: np.ndarray, strategy: str) -> np.ndarray:
    """Scalar whose median bisects the cloud; the strategy name describes the dividing line."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if strategy == "split_x_median":
        return xs
    if strategy == "split_y_median":
        return ys
    if strategy in ("pca_major", "pca_minor"):
        pts = np.column_stack([xs, ys])
        centred = pts - pts.mean(axis=0)
        _, vecs = np.linalg.eigh(centred.T @ centred)
        # eigh sorts ascending: column 0 is the minor axis, column 1 the major axis
        normal = vecs[:, 0] if strategy == "pca_major" else vecs[:, 1]
        return centred @ normal
    if strategy in ("lr_orthogonal", "lr_parallel"):
        params = fit_line_xy(xs, ys)
        along = align_to_line(xs, ys, params)
        if strategy == "lr_orthogonal":
            return along
        return -xs * math.sin(params.theta) + ys * math.cos(params.theta)
    if strategy == "radial_centre":
        return np.hypot(xs - xs.mean(), ys - ys.mean())
    if strategy == "radial_corner":
        return np.hypot(xs - xs.min(), ys - ys.max())
    raise ValueError(f"unknown partition strategy {strategy!r}; choose from {STRATEGIES}")


def partition_strategies(points, strategy: str) -> np.ndarray:
    """Median bisection of planar points: 0/1 labels with class sizes floor(n/2) and ceil(n/2)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    score = strategy_scores(pts[:, 0], pts[:, 1], strategy)
    labels = np.zeros(len(pts), dtype=np.int8)
    order = np.argsort(score, kind="stable")
    labels[order[len(pts) // 2:]] = 1
    return labels
