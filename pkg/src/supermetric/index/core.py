"""Public index API: build a tree over a dataset and run exact range queries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import IllegalExclusion, IncompatibleVectors
from ..metrics import MetricDescriptor, get_metric
from .builders import build_tree
from .config import EXCLUSIONS, IndexConfig
from .flat import FlatTree
from .space import Space


@dataclass(frozen=True)
class QueryReport:
    result_ids: frozenset
    distance_count: int
    nodes_visited: int

    def sorted_ids(self) -> list[int]:
        return sorted(self.result_ids)


@dataclass
class Index:
    tree: FlatTree
    data: np.ndarray  # prepared rows
    metric: MetricDescriptor
    config: IndexConfig
    build_distances: int

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def prepare_queries(self, Q) -> np.ndarray:
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim == 1:
            Q = Q.reshape(1, -1)
        if Q.shape[1] != self.data.shape[1]:
            raise IncompatibleVectors(f"query dim {Q.shape[1]} != data dim {self.data.shape[1]}")
        return np.ascontiguousarray(self.metric.prepare(Q).reshape(Q.shape))


def _rows(dataset) -> np.ndarray:
    arr = getattr(dataset, "vectors", dataset)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[0] == 0:
        raise ValueError("cannot index an empty dataset")
    return arr


def build(dataset, metric: MetricDescriptor | str, config: IndexConfig | str) -> Index:
    """Build the configured tree; ``config`` may be a bare structure name."""
    metric = get_metric(metric)
    if isinstance(config, str):
        config = IndexConfig.named(config)
    space = Space(_rows(dataset), metric)
    tree = build_tree(space, config)
    return Index(tree=tree, data=space.data, metric=metric, config=config, build_distances=space.count)


def _check_exclusion(metric: MetricDescriptor, exclusion: str) -> bool:
    if exclusion not in EXCLUSIONS:
        raise ValueError(f"exclusion must be one of {EXCLUSIONS}")
    if exclusion == "hilbert" and not metric.four_point:
        raise IllegalExclusion(f"hilbert exclusion needs a four-point metric; {metric.name} is not")
    return exclusion == "hilbert"


def range_query(index: Index, q, t: float, exclusion: str | None = None) -> QueryReport:
    """All ids within ``t`` of ``q`` plus the number of distances evaluated."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    hilbert = _check_exclusion(index.metric, exclusion or index.config.exclusion)
    qp = index.prepare_queries(q)[0]
    ids, count, visited = kernels.range_query(
        index.tree, index.data, qp, t, hilbert, index.metric.kernel, index.metric.alpha)
    return QueryReport(frozenset(int(i) for i in ids), int(count), int(visited))


def range_query_batch(index: Index, Q, t: float, exclusion: str | None = None):
    """Vectorised form: returns (list of sorted id arrays, distance counts, node visits)."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    hilbert = _check_exclusion(index.metric, exclusion or index.config.exclusion)
    Qp = index.prepare_queries(Q)
    return kernels.range_query_batch(
        index.tree, index.data, Qp, t, hilbert, index.metric.kernel, index.metric.alpha)


def exclusion_verdicts(d1: np.ndarray, d2: np.ndarray, delta: float, t: float, exclusion: str) -> np.ndarray:
    """Boolean mask: True where a query can exclude the semispace of the farther pivot."""
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    if exclusion == "hyperbolic":
        return np.abs(d1 - d2) > 2.0 * t
    if exclusion == "hilbert":
        if delta <= 0:
            raise ValueError("hilbert exclusion needs distinct pivots")
        return np.abs(d1 * d1 - d2 * d2) / delta > 2.0 * t
    raise ValueError(f"exclusion must be one of {EXCLUSIONS}")


def count_exclusive_queries(sample, p1, p2, t: float, exclusion: str,
                            metric: MetricDescriptor | str = "euclidean") -> int:
    """Number of sample points that, used as queries at ``t``, CANNOT exclude the opposing side."""
    metric = get_metric(metric)
    S = metric.prepare(_rows(sample))
    a = metric.prepare(np.asarray(p1, dtype=np.float64)).ravel()
    b = metric.prepare(np.asarray(p2, dtype=np.float64)).ravel()
    d1 = metric.one_to_many(a, S)
    d2 = metric.one_to_many(b, S)
    delta = float(metric.one_to_many(a, b.reshape(1, -1))[0])
    return int(np.count_nonzero(~exclusion_verdicts(d1, d2, delta, t, exclusion)))

