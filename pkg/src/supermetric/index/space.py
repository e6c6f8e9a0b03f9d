from __future__ import annotations

import numpy as np

from .. import kernels
from ..metrics import MetricDescriptor, get_metric


class Space:
    """Prepared vectors plus a metric, counting every distance evaluated through it."""

    def __init__(self, data, metric: MetricDescriptor | str, prepared: bool = False):
        self.metric = get_metric(metric)
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        self.data = np.ascontiguousarray(arr) if prepared else self.metric.prepare(arr)
        self.count = 0

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def dists(self, i: int, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        self.count += len(idx)
        return kernels.one_to_many(self.data, self.data[int(i)], idx, self.metric.kernel, self.metric.alpha)

    def dist(self, i: int, j: int) -> float:
        return float(self.dists(i, [j])[0])
