"""Datasets: ascii vector files, uniform synthetic data, query splits and threshold calibration."""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DegenerateSpace, ParseError
from .metrics import MetricDescriptor, get_metric

DATA_DIR_ENV = "SUPERMETRIC_DATA_DIR"


@dataclass(frozen=True)
class Dataset:
    vectors: np.ndarray
    name: str = "data"

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError("a dataset is a nonempty 2-D array of vectors")
        if not np.all(np.isfinite(v)):
            raise ValueError("dataset contains NaN or infinite values")
        object.__setattr__(self, "vectors", np.ascontiguousarray(v))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def subset(self, ids, name: str | None = None) -> Dataset:
        return Dataset(self.vectors[np.asarray(ids, dtype=np.int64)], name or self.name)


@dataclass(frozen=True)
class ThresholdSpec:
    mode: str  # absolute | fraction
    value: float

    def __post_init__(self):
        if self.mode not in ("absolute", "fraction"):
            raise ValueError("threshold mode must be absolute or fraction")
        if self.mode == "fraction" and not 0.0 < self.value < 1.0:
            raise ValueError("fraction thresholds lie in (0, 1)")
        if self.mode == "absolute" and self.value < 0:
            raise ValueError("absolute thresholds are nonnegative")

    @classmethod
    def parse(cls, text: str) -> ThresholdSpec:
        """``0.12`` is absolute; ``frac:0.001`` asks for a calibrated fraction."""
        text = text.strip()
        if text.startswith("frac:"):
            return cls("fraction", float(text[5:]))
        return cls("absolute", float(text))

    def resolve(self, dataset: Dataset, metric, seed: int = 0, sample_pairs: int = 100_000) -> float:
        if self.mode == "absolute":
            return self.value
        return calibrate_threshold_empirical(dataset, metric, self.value, sample_pairs, seed)


def _parse_row(tokens: list[str], lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in tokens]
    except ValueError:
        bad = next(tok for tok in tokens if not _is_float(tok))
        raise ParseError(f"non-numeric token {bad!r}", lineno) from None


def _is_float(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _is_header(tokens: list[str]) -> bool:
    if len(tokens) != 2:
        return False
    try:
        return all(int(tok) >= 0 for tok in tokens)
    except ValueError:
        return False


def load_ascii(path: str | os.PathLike, name: str | None = None) -> Dataset:
    """Read whitespace-separated vectors, one per line, with an optional ``count dim`` header."""
    path = Path(path)
    try:
        return _load_fast(path, name)
    except ValueError:
        # slow path only to locate and report the offending line
        return _load_checked(path, name)


def _load_fast(path: Path, name: str | None) -> Dataset:
    with path.open("r") as fh:
        first = fh.readline().split()
    declared = _is_header(first)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # empty files are reported by the slow path
        arr = np.loadtxt(path, dtype=np.float64, skiprows=1 if declared else 0, ndmin=2)
    if arr.size == 0:
        raise ValueError("empty")
    if declared and (int(first[0]), int(first[1])) != arr.shape:
        raise ValueError("header mismatch")
    return Dataset(arr, name or path.stem)


def _load_checked(path: Path, name: str | None) -> Dataset:
    rows: list[list[float]] = []
    dim = None
    declared = None
    with path.open("r") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if lineno == 1 and _is_header(tokens):
                declared = (int(tokens[0]), int(tokens[1]))
                dim = declared[1]
                continue
            row = _parse_row(tokens, lineno)
            if dim is None:
                dim = len(row)
            elif len(row) != dim:
                raise ParseError(f"expected {dim} values, found {len(row)}", lineno)
            rows.append(row)
    if not rows:
        raise ParseError("no vectors found", 1)
    if declared is not None and declared[0] != len(rows):
        raise ParseError(f"header declares {declared[0]} vectors, file has {len(rows)}", 1)
    return Dataset(np.asarray(rows, dtype=np.float64), name or path.stem)


def save_ascii(dataset: Dataset, path: str | os.PathLike, header: bool = True) -> None:
    v = dataset.vectors
    with Path(path).open("w") as fh:
        if header:
            fh.write(f"{v.shape[0]} {v.shape[1]}\n")
        for row in v:
            fh.write(" ".join(f"{x:.9g}" for x in row))
            fh.write("\n")


def resolve_path(spec: str) -> Path:
    """Plain paths are used as given; bare names fall back to $SUPERMETRIC_DATA_DIR."""
    p = Path(spec)
    if p.exists() or p.is_absolute():
        return p
    root = os.environ.get(DATA_DIR_ENV)
    if root:
        for cand in (Path(root) / spec, Path(root) / f"{spec}.ascii", Path(root) / f"{spec}.txt"):
            if cand.exists():
                return cand
    return p


def generate_uniform(n: int, dim: int, seed: int = 0) -> Dataset:
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be positive")
    rng = np.random.default_rng(seed)
    return Dataset(rng.random((n, dim)), f"uniform{dim}")


def load_dataset(spec: str, seed: int = 0) -> Dataset:
    """``synth:n,dim`` generates uniform data; anything else is an ascii file."""
    if spec.startswith("synth:"):
        try:
            n, dim = (int(v) for v in spec[6:].split(","))
        except ValueError:
            raise ValueError(f"bad synthetic spec {spec!r}; expected synth:n,dim") from None
        return generate_uniform(n, dim, seed)
    return load_ascii(resolve_path(spec))


def split_queries(dataset: Dataset, fraction: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded random split into (data, queries) with round(fraction * n) queries."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    n = len(dataset)
    nq = int(round(fraction * n))
    if nq == 0 or nq == n:
        raise ValueError(f"a {fraction} split of {n} vectors leaves one side empty")
    perm = np.random.default_rng(seed).permutation(n)
    return (dataset.subset(np.sort(perm[nq:]), dataset.name),
            dataset.subset(np.sort(perm[:nq]), f"{dataset.name}-queries"))


def calibrate_radius(dim: int, fraction: float) -> float:
    """Radius of a Euclidean ball whose volume is ``fraction`` (of the unit cube)."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    # log-space keeps the gamma function finite for large dim
    log_r = (math.log(fraction) + math.lgamma(dim / 2 + 1) - (dim / 2) * math.log(math.pi)) / dim
    return math.exp(log_r)


def sample_pair_distances(dataset: Dataset, metric, sample_pairs: int, seed: int) -> np.ndarray:
    metric = get_metric(metric)
    X = metric.prepare(dataset.vectors)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least two vectors")
    rng = np.random.default_rng(seed)
    i = rng.integers(n, size=sample_pairs)
    j = rng.integers(n - 1, size=sample_pairs)
    j = j + (j >= i)  # distinct partner, uniform over the rest
    return _pairwise(metric, X, i, j)


def _pairwise(metric: MetricDescriptor, X: np.ndarray, i: np.ndarray, j: np.ndarray, chunk: int = 65536):
    out = np.empty(len(i))
    for lo in range(0, len(i), chunk):
        out[lo:lo + chunk] = kernels.paired(X[i[lo:lo + chunk]], X[j[lo:lo + chunk]], metric.kernel, metric.alpha)
    return out


def calibrate_threshold_empirical(dataset: Dataset, metric, fraction: float,
                                  sample_pairs: int = 100_000, seed: int = 0) -> float:
    """The ``fraction`` quantile of randomly sampled pairwise distances."""
    if sample_pairs < 10_000:
        raise ValueError("sample_pairs must be at least 10^4")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    if fraction < 1.0 / sample_pairs:
        raise ValueError(f"fraction {fraction:g} is below the sampling resolution 1/{sample_pairs}")
    d = sample_pair_distances(dataset, metric, sample_pairs, seed)
    return float(np.quantile(d, fraction))


def idim(dataset: Dataset, metric, sample_pairs: int = 100_000, seed: int = 0) -> float:
    """Intrinsic dimensionality mu^2 / (2 sigma^2) of sampled pairwise distances."""
    if sample_pairs < 1_000:
        raise ValueError("sample_pairs must be at least 10^3")
    d = sample_pair_distances(dataset, metric, sample_pairs, seed)
    var = float(np.var(d))
    if var <= 0.0:
        raise DegenerateSpace("sampled distances have zero variance")
    mu = float(np.mean(d))
    return mu * mu / (2.0 * var)
