from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from _oracles import normal_equations_fit
from supermetric.errors import NonMetricInput
from supermetric.planar import (
    STRATEGIES,
    PlanarPoint,
    RotationParams,
    Verdict,
    cover_radius_excludes,
    fit_line,
    hilbert_excludes,
    hyperbolic_excludes,
    partition_strategies,
    planar_lower_bound,
    project,
    project_many,
    rotate,
)


def test_project_isoceles_right():
    p = project(math.sqrt(2), math.sqrt(2), 2.0)
    assert p.x == pytest.approx(0.0, abs=1e-15)
    assert p.y == pytest.approx(1.0, rel=1e-14)


def test_project_onto_pivot():
    p = project(0.0, 3.0, 3.0)
    assert p == (pytest.approx(-1.5), pytest.approx(0.0))


def test_project_errors():
    with pytest.raises(NonMetricInput):
        project(1.0, 1.0, 0.0)
    with pytest.raises(NonMetricInput):
        project(1.0, 5.0, 1.0)


sides = st.floats(0.01, 10.0, allow_nan=False)


@given(sides, sides, sides)
def test_project_reconstructs_sides(a, b, c):
    assume(a <= b + c and b <= a + c and c <= a + b)
    p = project(a, b, c)
    assert p.y >= 0
    assert math.hypot(p.x + c / 2, p.y) == pytest.approx(a, rel=1e-9, abs=1e-9)
    assert math.hypot(p.x - c / 2, p.y) == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_project_many_matches_scalar(rng):
    d1 = rng.random(50) + 1
    d2 = rng.random(50) + 1
    xs, ys = project_many(d1, d2, 1.0)
    for i in range(50):
        p = project(d1[i], d2[i], 1.0)
        assert (xs[i], ys[i]) == (pytest.approx(p.x), pytest.approx(p.y))


def test_lower_bound_examples():
    assert planar_lower_bound(PlanarPoint(1, 1), PlanarPoint(1, 1)) == 0
    assert planar_lower_bound(PlanarPoint(0, 0), PlanarPoint(3, 4)) == 5


def test_lower_bound_holds_in_euclidean_space(rng):
    X = rng.random((10_000, 4, 8))
    d = lambda a, b: np.linalg.norm(a - b, axis=1)  # noqa: E731
    p1, p2, a, b = (X[:, k] for k in range(4))
    delta = d(p1, p2)
    xa = (d(a, p1) ** 2 - d(a, p2) ** 2) / (2 * delta)
    ya = np.sqrt(np.maximum(0, d(a, p1) ** 2 - (xa + delta / 2) ** 2))
    xb = (d(b, p1) ** 2 - d(b, p2) ** 2) / (2 * delta)
    yb = np.sqrt(np.maximum(0, d(b, p1) ** 2 - (xb + delta / 2) ** 2))
    assert np.all(np.hypot(xa - xb, ya - yb) <= d(a, b) * (1 + 1e-9))


def test_hyperbolic_examples():
    assert hyperbolic_excludes(0.9, 0.4, 0.2) is Verdict.EXCLUDE_P1_SIDE
    assert hyperbolic_excludes(0.4, 0.9, 0.2) is Verdict.EXCLUDE_P2_SIDE
    assert hyperbolic_excludes(0.9, 0.4, 0.3) is Verdict.NONE
    assert hyperbolic_excludes(0.5, 0.5, 0.0) is Verdict.NONE


def test_hilbert_examples():
    assert hilbert_excludes(0.9, 0.4, 1.0, 0.2) is Verdict.EXCLUDE_P1_SIDE
    assert hilbert_excludes(0.4, 0.9, 1.0, 0.2) is Verdict.EXCLUDE_P2_SIDE
    assert hilbert_excludes(0.7, 0.7, 1.0, 0.0) is Verdict.NONE
    with pytest.raises(ValueError):
        hilbert_excludes(0.9, 0.4, 0.0, 0.2)


def test_hilbert_equals_projected_offset_test(rng):
    for _ in range(500):
        d1, d2, t = rng.random(3)
        delta = abs(d1 - d2) + rng.random() * (d1 + d2 - abs(d1 - d2)) + 1e-6
        x = (d1 * d1 - d2 * d2) / (2 * delta)
        assert (hilbert_excludes(d1, d2, delta, t) is not Verdict.NONE) == (abs(x) > t)


def test_cover_radius_examples():
    assert cover_radius_excludes(1.0, 0.5, 0.4)
    assert not cover_radius_excludes(1.0, 0.5, 0.5)


def _admissible_grid():
    grid = np.linspace(0.0, 2.0, 21)
    for delta in grid[1:]:
        for d1 in grid:
            for d2 in grid:
                if d1 > d2 + delta or d2 > d1 + delta or delta > d1 + d2:
                    continue
                for t in np.linspace(0.0, 0.6, 13):
                    yield float(d1), float(d2), float(delta), float(t)


def test_dominance_over_admissible_grid_exact():
    # exact rational evaluation: collinear triples tie the two predicates, so floats cannot arbitrate
    checked = 0
    for d1, d2, delta, t in _admissible_grid():
        a, b, c, r = (Fraction(v) for v in (d1, d2, delta, t))
        if abs(a - b) > 2 * r:
            assert abs(a * a - b * b) / c > 2 * r
            assert (a > b) == (a * a > b * b)
            checked += 1
    assert checked > 500


def test_float_predicates_match_exact_away_from_ties():
    for d1, d2, delta, t in _admissible_grid():
        a, b, c, r = (Fraction(v) for v in (d1, d2, delta, t))
        hyp_margin = abs(a - b) - 2 * r
        hil_margin = abs(a * a - b * b) / c - 2 * r
        if abs(hyp_margin) > 1e-12:
            assert (hyperbolic_excludes(d1, d2, t) is not Verdict.NONE) == (hyp_margin > 0)
        if abs(hil_margin) > 1e-12:
            assert (hilbert_excludes(d1, d2, delta, t) is not Verdict.NONE) == (hil_margin > 0)


def test_dominance_on_sampled_triangles(rng):
    for _ in range(20_000):
        d1, d2 = rng.random(2)
        delta = abs(d1 - d2) + rng.random() * (d1 + d2 - abs(d1 - d2))
        if delta <= 0:
            continue
        t = rng.random() * 0.5
        hyp = hyperbolic_excludes(d1, d2, t)
        if hyp is not Verdict.NONE:
            assert hilbert_excludes(d1, d2, delta, t) is hyp


@given(st.floats(0, 5), st.floats(0, 5), st.floats(0.01, 5), st.floats(0, 2), st.floats(0, 1))
def test_predicates_monotone_in_threshold(d1, d2, delta, t, shrink):
    t2 = t * shrink
    if hilbert_excludes(d1, d2, delta, t) is not Verdict.NONE:
        assert hilbert_excludes(d1, d2, delta, t2) is not Verdict.NONE
    if hyperbolic_excludes(d1, d2, t) is not Verdict.NONE:
        assert hyperbolic_excludes(d1, d2, t2) is not Verdict.NONE


def test_fit_line_exact():
    pts = [PlanarPoint(x, 2 * x + 1) for x in (-1.0, 0.0, 2.0, 3.5)]
    p = fit_line(pts)
    assert p.m == pytest.approx(2.0)
    assert p.theta == pytest.approx(math.atan(2.0))
    assert p.h == pytest.approx(-0.5)


def test_fit_line_degenerate_cases():
    p = fit_line([PlanarPoint(-1, 3), PlanarPoint(1, 3)])
    assert (p.m, p.theta, p.h) == (0.0, 0.0, 0.0)
    v = fit_line([PlanarPoint(2, 0), PlanarPoint(2, 5)])
    assert v.theta == pytest.approx(math.pi / 2) and v.h == 2 and math.isinf(v.m)
    with pytest.raises(ValueError):
        fit_line([PlanarPoint(0, 0)])


def test_fit_line_matches_normal_equations(rng):
    for _ in range(20):
        xs = rng.normal(size=40)
        ys = 0.3 * xs + rng.normal(size=40)
        p = fit_line(np.column_stack([xs, ys]))
        m, b = normal_equations_fit(xs.tolist(), ys.tolist())
        assert p.m == pytest.approx(m, rel=1e-9)
        res = lambda slope: float(np.sum((ys - (ys.mean() + slope * (xs - xs.mean()))) ** 2))  # noqa: E731
        assert res(p.m) == pytest.approx(float(np.sum((ys - (m * xs + b)) ** 2)), rel=1e-9)
        assert res(p.m + 1e-3) >= res(p.m) and res(p.m - 1e-3) >= res(p.m)


def test_rotate_examples():
    assert rotate(PlanarPoint(3.0, 2.0), RotationParams(0.0, 1.0, 0.0)) == (2.0, 2.0)
    r = rotate(PlanarPoint(2.0, 0.0), RotationParams(math.pi / 4, 1.0, 1.0))
    assert r == (pytest.approx(math.cos(math.pi / 4)), pytest.approx(math.sin(math.pi / 4)))


def test_rotate_is_an_isometry(rng):
    for _ in range(200):
        a, b = PlanarPoint(*rng.normal(size=2)), PlanarPoint(*rng.normal(size=2))
        params = RotationParams(rng.uniform(-1.5, 1.5), rng.normal(), 1.0)
        ra, rb = rotate(a, params), rotate(b, params)
        assert math.dist(ra, rb) == pytest.approx(math.dist(a, b), abs=1e-12)


def test_split_x_two_points():
    assert sorted(partition_strategies([(-1, 0), (1, 0)], "split_x_median").tolist()) == [0, 1]


def test_split_y_uses_height():
    pts = np.array([[0, 3], [5, 1], [-2, 2], [1, 0]], dtype=float)
    assert partition_strategies(pts, "split_y_median").tolist() == [1, 0, 1, 0]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_strategies_bisect(strategy, rng):
    for n in (7, 500):
        labels = partition_strategies(rng.random((n, 2)), strategy)
        assert sorted([int((labels == 0).sum()), int((labels == 1).sum())]) == [n // 2, n - n // 2]


def test_unknown_strategy():
    with pytest.raises(ValueError):
        partition_strategies([(0, 0), (1, 1)], "diagonal")
