from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import overhead_recursive
from supermetric.data import generate_uniform
from supermetric.errors import IllegalExclusion
from supermetric.experiments import (
    BenchRow,
    BenchSettings,
    derive_seed,
    overhead,
    overhead_report,
    relative_sem,
    run_bench,
    run_scatter,
)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 100, 12345, 1e6, 1e9, 1e10])
def test_overhead_matches_recursive_reference(n):
    assert overhead(n) == pytest.approx(overhead_recursive(n), rel=1e-12)


def test_overhead_examples():
    assert overhead(2) == 0
    assert overhead(1e10) >= math.comb(23, 2) * 4 == 1012
    _, per = overhead_report(1e9)
    assert 0.5 <= per <= 2.0


def test_overhead_binary_and_fixed():
    assert overhead(3, "binary") == 4
    assert overhead(100, "fixed:4") > 0
    with pytest.raises(ValueError):
        overhead(10, "ternary")


def test_derive_seed_is_stable():
    assert derive_seed(0, "hpt_fft_log") == derive_seed(0, "hpt_fft_log")
    assert derive_seed(0, "a") != derive_seed(1, "a")
    assert 0 <= derive_seed(7, "x", 3) < 2**63


def test_relative_sem():
    assert relative_sem([5.0]) == math.inf
    assert relative_sem([2.0, 2.0, 2.0]) == 0.0
    v = [10.0, 12.0, 11.0, 13.0]
    assert relative_sem(v) == pytest.approx(np.std(v, ddof=1) / 2 / np.mean(v))


@given(st.lists(st.floats(1, 1e6), min_size=2, max_size=30), st.floats(0.1, 100))
def test_relative_sem_scale_invariant(values, k):
    assert relative_sem([k * v for v in values]) == pytest.approx(relative_sem(values), rel=1e-6, abs=1e-12)


@pytest.fixture(scope="module")
def small_bench():
    ds = generate_uniform(1500, 6, seed=3)
    settings = BenchSettings(sem_target=0.05, min_repeats=3, max_repeats=6, verify=True, seed=2)
    return run_bench(ds, "euclidean", ["hpt_fft_log", "vpt", "sat_pure"], ["hyperbolic", "hilbert"],
                     ["frac:0.001", "0.2"], 0.1, settings)


def test_bench_rows_shape(small_bench):
    assert len(small_bench) == 3 * 2 * 2
    for row in small_bench:
        assert 3 <= row.repeats <= 6 and row.queries == 150
        assert len(row.values()) == len(BenchRow.header())


def test_bench_hilbert_dominates(small_bench):
    by = {(r.structure, r.threshold, r.exclusion): r.mean_distances for r in small_bench}
    for (s, t, ex), v in by.items():
        if ex == "hilbert":
            assert v <= by[(s, t, "hyperbolic")]


def test_bench_is_reproducible(small_bench):
    ds = generate_uniform(1500, 6, seed=3)
    settings = BenchSettings(sem_target=0.05, min_repeats=3, max_repeats=6, seed=2, threads=3)
    again = run_bench(ds, "euclidean", ["hpt_fft_log", "vpt", "sat_pure"], ["hyperbolic", "hilbert"],
                      ["frac:0.001", "0.2"], 0.1, settings)
    assert [r.mean_distances for r in again] == [r.mean_distances for r in small_bench]


def test_bench_rejects_hilbert_on_manhattan():
    with pytest.raises(IllegalExclusion):
        run_bench(generate_uniform(100, 2), "manhattan", ["vpt"], ["hilbert"], ["0.1"])


def test_scatter_counts():
    res = run_scatter(generate_uniform(3000, 8, seed=1), 0.145, seed=0)
    assert len(res.ids) == 500 and res.p1 not in res.ids and res.p2 not in res.ids
    assert res.non_exclusive("hilbert") <= res.non_exclusive("hyperbolic")
    assert 0.0 <= res.exclusion_probability("hilbert") <= 1.0
    assert set(np.unique(res.side)) <= {0, 1}
