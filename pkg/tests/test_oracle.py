from __future__ import annotations

import numpy as np
import pytest

from _oracles import NAIVE, brute_range
from supermetric.oracle import exhaustive_range, exhaustive_range_batch, quadruple_check


def test_small_line_example():
    X = np.array([[0.0], [0.5], [1.0], [3.0]])
    ans = exhaustive_range(X, "euclidean", [0.4], 0.6)
    assert ans.result_ids == {0, 1, 2}
    assert ans.distance_count == 4


def test_threshold_boundary_is_inclusive():
    X = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert exhaustive_range(X, "euclidean", [0, 0], 5.0).result_ids == {0, 1}


def test_negative_threshold():
    with pytest.raises(ValueError):
        exhaustive_range(np.zeros((2, 2)), "euclidean", [0, 0], -1)


@pytest.mark.parametrize("metric", ["euclidean", "manhattan", "chebyshev", "cosine", "jsd", "triangular"])
def test_matches_naive_scan(metric, rng):
    X = rng.random((300, 5)) + 0.01
    Q = rng.random((10, 5)) + 0.01
    batch = exhaustive_range_batch(X, metric, Q, 0.3)
    for q, got in zip(Q, batch):
        want = brute_range(X.tolist(), q.tolist(), 0.3, NAIVE[metric])
        assert got.tolist() == sorted(want)
        assert exhaustive_range(X, metric, q, 0.3).result_ids == frozenset(want)


def test_result_independent_of_order(rng):
    X = rng.random((400, 4))
    q = rng.random(4)
    perm = rng.permutation(400)
    a = exhaustive_range(X, "euclidean", q, 0.4).result_ids
    b = exhaustive_range(X[perm], "euclidean", q, 0.4).result_ids
    assert {int(perm[i]) for i in b} == a


def test_quadruple_check_clean_for_euclidean(rng):
    rep = quadruple_check("euclidean", rng.random((500, 6)), 20_000, seed=1)
    assert rep.ok and rep.samples == 20_000
    assert rep.to_csv().splitlines() == ["p1,p2,a,b,planar_distance,true_distance"]


def test_quadruple_check_reports_chebyshev(rng, tmp_path):
    rep = quadruple_check("chebyshev", rng.random((2000, 8)), 200_000, seed=2)
    assert not rep.ok
    v = rep.violations[0]
    assert len({v.p1, v.p2, v.a, v.b}) == 4 and v.planar > v.true
    out = tmp_path / "v.csv"
    rep.to_csv(out)
    assert len(out.read_text().splitlines()) == len(rep.violations) + 1


def test_quadruple_check_is_seeded(rng):
    X = rng.random((300, 8))
    a = quadruple_check("manhattan", X, 50_000, seed=5).violations
    b = quadruple_check("manhattan", X, 50_000, seed=5).violations
    assert a == b


def test_quadruple_check_needs_four_vectors():
    with pytest.raises(ValueError):
        quadruple_check("euclidean", np.zeros((3, 2)), 10)
