from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from supermetric.data import (
    Dataset,
    ThresholdSpec,
    calibrate_radius,
    calibrate_threshold_empirical,
    generate_uniform,
    idim,
    load_ascii,
    load_dataset,
    resolve_path,
    save_ascii,
    split_queries,
)
from supermetric.errors import DegenerateSpace, ParseError


def test_load_without_header(tmp_path):
    f = tmp_path / "v.ascii"
    f.write_text("0.1 0.2 0.3\n1 2 3\n-4 5e-3 6\n")
    ds = load_ascii(f)
    assert ds.vectors.shape == (3, 3) and ds.dim == 3 and len(ds) == 3
    assert ds.vectors[2, 1] == 5e-3


def test_load_with_header(tmp_path):
    f = tmp_path / "v.ascii"
    f.write_text("2 4\n1 2 3 4\n5 6 7 8\n")
    assert load_ascii(f).vectors.shape == (2, 4)


@pytest.mark.parametrize("text,line", [
    ("1 2 3\n4 5\n", 2),
    ("1 2\n3 x\n", 2),
    ("", 1),
    ("3 2\n1 2\n", 1),
    ("2 3\n1 2 3\n4 5\n", 3),
])
def test_parse_errors_name_the_line(tmp_path, text, line):
    f = tmp_path / "bad.ascii"
    f.write_text(text)
    with pytest.raises(ParseError) as err:
        load_ascii(f)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_round_trip(tmp_path):
    ds = generate_uniform(50, 7, seed=3)
    f = tmp_path / "rt.ascii"
    save_ascii(ds, f)
    back = load_ascii(f)
    assert np.allclose(back.vectors, ds.vectors, rtol=1e-8, atol=0)  # nine significant digits
    save_ascii(back, tmp_path / "rt2.ascii")
    assert (tmp_path / "rt2.ascii").read_bytes() == f.read_bytes()


def test_data_dir_lookup(tmp_path, monkeypatch):
    (tmp_path / "nasa.ascii").write_text("0.5 2\n3 4\n")
    monkeypatch.setenv("SUPERMETRIC_DATA_DIR", str(tmp_path))
    assert resolve_path("nasa") == tmp_path / "nasa.ascii"
    assert load_dataset("nasa").vectors.shape == (2, 2)


def test_synthetic_spec():
    ds = load_dataset("synth:100,3", seed=1)
    assert ds.vectors.shape == (100, 3)
    with pytest.raises(ValueError):
        load_dataset("synth:100")


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        Dataset(np.empty((0, 3)))


def test_uniform_generation():
    a = generate_uniform(100_000, 4, seed=9)
    assert a.vectors.min() >= 0 and a.vectors.max() <= 1
    assert np.array_equal(a.vectors, generate_uniform(100_000, 4, seed=9).vectors)
    sigma = math.sqrt(1 / 12)
    assert np.all(np.abs(a.vectors.mean(axis=0) - 0.5) < 4 * sigma / math.sqrt(100_000))


def test_split_sizes_and_partition():
    ds = generate_uniform(112_682, 1, seed=0)
    data, queries = split_queries(ds, 0.10, seed=1)
    assert (len(queries), len(data)) == (11_268, 101_414)


@given(st.integers(2, 300), st.floats(0.01, 0.99), st.integers(0, 10))
def test_split_is_disjoint_and_exhaustive(n, fraction, seed):
    assume(0 < round(fraction * n) < n)
    ds = Dataset(np.arange(n, dtype=float).reshape(-1, 1))
    data, queries = split_queries(ds, fraction, seed)
    assert len(queries) == round(fraction * n)
    joined = np.sort(np.concatenate([data.vectors.ravel(), queries.vectors.ravel()]))
    assert np.array_equal(joined, np.arange(n, dtype=float))


def test_split_rejects_bad_fraction():
    with pytest.raises(ValueError):
        split_queries(generate_uniform(10, 1), 1.0)
    with pytest.raises(ValueError):
        split_queries(generate_uniform(2, 1), 0.25)


def test_calibrate_radius_closed_forms():
    assert calibrate_radius(1, 0.5) == pytest.approx(0.25, rel=1e-14)
    assert calibrate_radius(2, 1e-6) == pytest.approx(math.sqrt(1e-6 / math.pi), rel=1e-14)
    # frozen from a 40-digit mpmath evaluation
    assert calibrate_radius(8, 1e-6) == pytest.approx(0.14926276035072964412, rel=1e-13)
    assert calibrate_radius(3, 0.01) == pytest.approx(0.13365046175719757878, rel=1e-13)
    assert calibrate_radius(20, 1e-6) == pytest.approx(0.60174600448341762566, rel=1e-13)


def test_calibrate_radius_monotone():
    fr = [1e-8, 1e-6, 1e-4, 1e-2, 0.5]
    for d in (1, 2, 5, 10):
        r = [calibrate_radius(d, f) for f in fr]
        assert all(a < b for a, b in zip(r, r[1:]))
    by_dim = [calibrate_radius(d, 1e-6) for d in range(1, 30)]
    assert all(a < b for a, b in zip(by_dim, by_dim[1:]))


def test_calibrate_radius_monte_carlo():
    rng = np.random.default_rng(5)
    pts = rng.random((1_000_000, 2))
    r = calibrate_radius(2, 1e-3)
    inside = np.count_nonzero(np.hypot(pts[:, 0] - 0.5, pts[:, 1] - 0.5) <= r)
    assert 700 < inside < 1300  # Poisson mean 1000


def test_empirical_threshold():
    ds = generate_uniform(5000, 8, seed=0)
    t = calibrate_threshold_empirical(ds, "euclidean", 0.01, 20_000, seed=1)
    rng = np.random.default_rng(2)
    i, j = rng.integers(5000, size=(2, 50_000))
    keep = i != j
    frac = np.mean(np.linalg.norm(ds.vectors[i[keep]] - ds.vectors[j[keep]], axis=1) <= t)
    assert frac == pytest.approx(0.01, rel=0.15)
    top = calibrate_threshold_empirical(ds, "euclidean", 1 - 1e-4, 20_000, seed=1)
    assert top <= math.sqrt(8) and top > 1.5


def test_empirical_threshold_resolution_guard():
    ds = generate_uniform(100, 2)
    with pytest.raises(ValueError):
        calibrate_threshold_empirical(ds, "euclidean", 1e-5, 10_000)
    with pytest.raises(ValueError):
        calibrate_threshold_empirical(ds, "euclidean", 0.1, 100)


def test_threshold_spec():
    assert ThresholdSpec.parse("0.12") == ThresholdSpec("absolute", 0.12)
    assert ThresholdSpec.parse("frac:0.001") == ThresholdSpec("fraction", 0.001)
    with pytest.raises(ValueError):
        ThresholdSpec("fraction", 1.5)


def test_idim_zero_variance():
    ds = Dataset(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(DegenerateSpace):
        idim(ds, "euclidean", 2000)


def test_idim_seed_stable():
    ds = generate_uniform(20_000, 8, seed=0)
    vals = [idim(ds, "euclidean", 100_000, seed=s) for s in range(4)]
    assert max(vals) / min(vals) < 1.05


def test_idim_uniform_matches_moments():
    # independent estimate: moments of |x - y| for uniform cube pairs from fresh samples
    ds = generate_uniform(50_000, 10, seed=1)
    rng = np.random.default_rng(8)
    a, b = rng.random((2, 200_000, 10))
    d = np.linalg.norm(a - b, axis=1)
    expected = d.mean() ** 2 / (2 * d.var())
    assert idim(ds, "euclidean", 200_000, seed=3) == pytest.approx(expected, rel=0.05)
