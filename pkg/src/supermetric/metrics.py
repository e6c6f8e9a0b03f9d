"""Distance functions over dense vectors, tagged with the four-point property.

Each metric is available twice: as a plain function of two vectors
(``euclidean(a, b)`` ...) and as a :class:`MetricDescriptor`, which is what the
index and the experiments use.  A descriptor knows how to *prepare* raw vectors
once (unit-sum or unit-length normalisation) so the hot loops only ever see
ready-to-use rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IncompatibleVectors, UndefinedDirection, ZeroMass

__all__ = [
    "MetricDescriptor",
    "euclidean",
    "cosine_variant",
    "jensen_shannon",
    "triangular",
    "manhattan",
    "chebyshev",
    "power_transform",
    "get_metric",
    "METRICS",
]


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise IncompatibleVectors(f"dimension mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise IncompatibleVectors("empty vectors")
    return a, b


def _unit_sum(v: np.ndarray) -> np.ndarray:
    if np.any(v < 0):
        raise ValueError("divergence metrics need nonnegative components")
    s = v.sum()
    if s <= 0:
        raise ZeroMass("vector sums to zero")
    return v / s


def _unit_length(v: np.ndarray) -> np.ndarray:
    big = float(np.max(np.abs(v)))
    if big == 0.0:
        raise UndefinedDirection("zero vector has no direction")
    v = v / big  # rescale first so tiny or huge components cannot under/overflow the norm
    return v / math.sqrt(float(np.dot(v, v)))


def euclidean(a, b) -> float:
    a, b = _pair(a, b)
    diff = a - b
    return math.sqrt(float(np.dot(diff, diff)))


def cosine_variant(a, b) -> float:
    """Chord distance between the directions of ``a`` and ``b`` (range [0, 2])."""
    a, b = _pair(a, b)
    return euclidean(_unit_length(a), _unit_length(b))


def jensen_shannon(a, b) -> float:
    """Square root of the base-2 Jensen-Shannon divergence (range [0, 1])."""
    a, b = _pair(a, b)
    p, q = _unit_sum(a), _unit_sum(b)
    m = p + q
    total = 0.0
    nz = p > 0
    total += float(np.sum(p[nz] * np.log2(2.0 * p[nz] / m[nz])))
    nz = q > 0
    total += float(np.sum(q[nz] * np.log2(2.0 * q[nz] / m[nz])))
    return math.sqrt(max(0.5 * total, 0.0))


def triangular(a, b) -> float:
    """sqrt(1/2 * sum (p_i - q_i)^2 / (p_i + q_i)) over unit-sum inputs (range [0, 1])."""
    a, b = _pair(a, b)
    p, q = _unit_sum(a), _unit_sum(b)
    den = p + q
    nz = den > 0
    return math.sqrt(0.5 * float(np.sum((p[nz] - q[nz]) ** 2 / den[nz])))


def manhattan(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.sum(np.abs(a - b)))


def chebyshev(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class MetricDescriptor:
    """A named distance with the flags that decide which exclusions are legal.

    ``kernel`` is the code understood by the compiled/pure kernels, ``alpha``
    the exponent applied to the base distance and ``normalize`` the
    preparation applied to raw vectors ("none", "sum" or "l2").
    """

    name: str
    four_point: bool
    requires_probability_normalization: bool
    kernel: int
    alpha: float = 1.0
    normalize: str = "none"

    def prepare(self, x) -> np.ndarray:
        """Validate and normalise raw vectors (1-D or 2-D) into float64 rows."""
        arr = np.array(x, dtype=np.float64, copy=True, order="C")
        if arr.ndim not in (1, 2) or arr.size == 0:
            raise IncompatibleVectors("expected a vector or a matrix of row vectors")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vectors must be finite")
        rows = arr.reshape(1, -1) if arr.ndim == 1 else arr
        if self.normalize == "sum":
            if np.any(rows < 0):
                raise ValueError(f"{self.name} needs nonnegative components")
            sums = rows.sum(axis=1)
            if np.any(sums <= 0):
                raise ZeroMass(f"row {int(np.argmin(sums))} sums to zero")
            rows /= sums[:, None]
        elif self.normalize == "l2":
            big = np.max(np.abs(rows), axis=1)
            if np.any(big == 0):
                raise UndefinedDirection(f"row {int(np.argmin(big))} is a zero vector")
            rows /= big[:, None]
            rows /= np.sqrt(np.einsum("ij,ij->i", rows, rows))[:, None]
        return arr

    def one_to_many(self, q: np.ndarray, data: np.ndarray, idx=None) -> np.ndarray:
        """Distances from prepared ``q`` to prepared rows ``data[idx]``."""
        return kernels.one_to_many(data, q, idx, self.kernel, self.alpha)

    def distance(self, a, b) -> float:
        a, b = _pair(a, b)
        pa = self.prepare(a)
        pb = self.prepare(b)
        return float(self.one_to_many(pa, pb.reshape(1, -1))[0])

    __call__ = distance


EUCLIDEAN = MetricDescriptor("euclidean", True, False, kernels.EUCLIDEAN)
COSINE = MetricDescriptor("cosine", True, False, kernels.EUCLIDEAN, normalize="l2")
JSD = MetricDescriptor("jsd", True, True, kernels.JSD, normalize="sum")
TRIANGULAR = MetricDescriptor("triangular", True, True, kernels.TRIANGULAR, normalize="sum")
MANHATTAN = MetricDescriptor("manhattan", False, False, kernels.MANHATTAN)
CHEBYSHEV = MetricDescriptor("chebyshev", False, False, kernels.CHEBYSHEV)

METRICS: dict[str, MetricDescriptor] = {
    m.name: m for m in (EUCLIDEAN, COSINE, JSD, TRIANGULAR, MANHATTAN, CHEBYSHEV)
}
_ALIASES = {"cosine_variant": "cosine", "jensen_shannon": "jsd", "l2": "euclidean", "l1": "manhattan"}


def power_transform(base: MetricDescriptor, alpha: float) -> MetricDescriptor:
    """The metric d(x, y) ** alpha; flagged four-point exactly when alpha <= 1/2."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return base
    return MetricDescriptor(
        name=f"pow:{alpha:g}:{base.name}",
        # conservative: the flag is only granted where it holds for every base metric
        four_point=alpha <= 0.5,
        requires_probability_normalization=base.requires_probability_normalization,
        kernel=base.kernel,
        alpha=base.alpha * alpha,
        normalize=base.normalize,
    )


def get_metric(name: str | MetricDescriptor) -> MetricDescriptor:
    """Resolve a metric identifier such as ``euclidean`` or ``pow:0.5:manhattan``."""
    if isinstance(name, MetricDescriptor):
        return name
    key = name.strip().lower()
    if key.startswith("pow:"):
        parts = key.split(":", 2)
        if len(parts) != 3:
            raise ValueError(f"bad power metric {name!r}; expected pow:<alpha>:<base>")
        try:
            alpha = float(parts[1])
        except ValueError:
            raise ValueError(f"bad exponent in {name!r}") from None
        return power_transform(get_metric(parts[2]), alpha)
    key = _ALIASES.get(key, key)
    try:
        return METRICS[key]
    except KeyError:
        raise ValueError(f"unknown metric {name!r}; choose from {sorted(METRICS)} or pow:<a>:<base>") from None
