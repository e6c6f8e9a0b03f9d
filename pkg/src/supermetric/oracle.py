"""Ground truth: linear-scan range search and a sampled planar lower-bound checker.

Both use the numpy kernels directly, so they never share code with the tree
traversal or the compiled extension they are used to verify.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _pykernels
from .metrics import MetricDescriptor, get_metric

TOLERANCE = 1e-9


@dataclass(frozen=True)
class OracleAnswer:
    result_ids: frozenset
    distance_count: int


def _rows(dataset) -> np.ndarray:
    arr = np.asarray(getattr(dataset, "vectors", dataset), dtype=np.float64)
    return arr.reshape(-1, 1) if arr.ndim == 1 else arr


def exhaustive_range(dataset, metric: MetricDescriptor | str, q, t: float) -> OracleAnswer:
    """Every id within ``t`` of ``q`` found by scanning all of the data."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    metric = get_metric(metric)
    X = metric.prepare(_rows(dataset))
    qp = metric.prepare(np.asarray(q, dtype=np.float64)).ravel()
    d = _pykernels.one_to_many(X, qp, None, metric.kernel, metric.alpha)
    return OracleAnswer(frozenset(int(i) for i in np.flatnonzero(d <= t)), X.shape[0])


def exhaustive_range_batch(dataset, metric: MetricDescriptor | str, Q, t: float) -> list[np.ndarray]:
    """Sorted id arrays for many queries, preparing the data once."""
    metric = get_metric(metric)
    X = metric.prepare(_rows(dataset))
    Qp = metric.prepare(_rows(Q))
    return [np.flatnonzero(_pykernels.one_to_many(X, q, None, metric.kernel, metric.alpha) <= t) for q in Qp]


@dataclass(frozen=True)
class Violation:
    p1: int
    p2: int
    a: int
    b: int
    planar: float
    true: float


@dataclass
class QuadrupleReport:
    metric: str
    samples: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p1", "p2", "a", "b", "planar_distance", "true_distance"])
        for v in self.violations:
            w.writerow([v.p1, v.p2, v.a, v.b, f"{v.planar:.17g}", f"{v.true:.17g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _distinct_quadruples(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty((0, 4), dtype=np.int64)
    while len(out) < k:
        cand = rng.integers(n, size=(2 * (k - len(out)) + 16, 4))
        s = np.sort(cand, axis=1)
        ok = np.all(s[:, 1:] != s[:, :-1], axis=1)
        out = np.vstack([out, cand[ok]])
    return out[:k]


def quadruple_check(metric: MetricDescriptor | str, dataset, samples: int, seed: int = 0,
                    chunk: int = 100_000) -> QuadrupleReport:
    """Sample (p1, p2, a, b), project a and b against (p1, p2) and compare the planar
    distance with d(a, b).  Any excess beyond the relative tolerance is reported."""
    if samples < 1:
        raise ValueError("samples must be positive")
    metric = get_metric(metric)
    X = metric.prepare(_rows(dataset))
    if X.shape[0] < 4:
        raise ValueError("need at least four vectors")
    rng = np.random.default_rng(seed)
    report = QuadrupleReport(metric.name, samples)

    def d(i, j):
        return _pykernels.paired(X[i], X[j], metric.kernel, metric.alpha)

    done = 0
    while done < samples:
        quads = _distinct_quadruples(X.shape[0], min(chunk, samples - done), rng)
        p1, p2, a, b = quads.T
        delta = d(p1, p2)
        # coincident pivot vectors carry no plane: resample those rows
        keep = delta > 0
        p1, p2, a, b, delta = p1[keep], p2[keep], a[keep], b[keep], delta[keep]
        if not len(p1):
            continue
        xa, ya = _project(d(a, p1), d(a, p2), delta)
        xb, yb = _project(d(b, p1), d(b, p2), delta)
        planar = np.hypot(xa - xb, ya - yb)
        true = d(a, b)
        bad = np.flatnonzero(planar > true + TOLERANCE * true)
        for k in bad:
            report.violations.append(Violation(int(p1[k]), int(p2[k]), int(a[k]), int(b[k]),
                                               float(planar[k]), float(true[k])))
        done += len(p1)
    return report


def _project(d1: np.ndarray, d2: np.ndarray, delta: np.ndarray):
    x = (d1 * d1 - d2 * d2) / (2.0 * delta)
    y = np.sqrt(np.maximum(0.0, d1 * d1 - (x + delta / 2.0) ** 2))
    return x, y
