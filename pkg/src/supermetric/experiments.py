"""Experiment drivers behind the CLI: benchmarks, sweeps, scatter studies, overhead."""
from __future__ import annotations

import hashlib
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import kernels
from .data import Dataset, ThresholdSpec, calibrate_radius, calibrate_threshold_empirical, generate_uniform, split_queries
from .errors import IllegalExclusion
from .index import IndexConfig, build, exclusion_verdicts, range_query_batch
from .index.config import STRUCTURES
from .metrics import MetricDescriptor, get_metric
from .oracle import exhaustive_range_batch
from .planar import partition_strategies, project_many

log = logging.getLogger(__name__)


class VerificationError(RuntimeError):
    """An index answer disagreed with the exhaustive scan."""


def derive_seed(base: int, *parts) -> int:
    """Stable per-cell seed; independent of thread scheduling and PYTHONHASHSEED."""
    key = ":".join(str(p) for p in (base, *parts)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little") >> 1


def relative_sem(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2:
        return math.inf
    mean = float(v.mean())
    if mean == 0.0:
        return 0.0
    return float(v.std(ddof=1) / math.sqrt(len(v)) / abs(mean))


def check_exclusions(metric: MetricDescriptor, exclusions) -> None:
    for ex in exclusions:
        if ex == "hilbert" and not metric.four_point:
            raise IllegalExclusion(f"hilbert exclusion needs a four-point metric; {metric.name} is not")


# -- bench -------------------------------------------------------------------

@dataclass
class BenchRow:
    structure: str
    selection: str
    exclusion: str
    metric: str
    threshold: float
    mean_distances: float
    sem: float
    repeats: int
    build_distances: int
    queries: int
    seed: int

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


@dataclass
class BenchSettings:
    sem_target: float = 0.01
    min_repeats: int = 3
    max_repeats: int = 20
    verify: bool = False
    threads: int = 1
    seed: int = 0


def _verify(index, data: np.ndarray, perm: np.ndarray, Q: np.ndarray, t: float, exclusion: str,
            rng: np.random.Generator) -> None:
    k = max(1, int(round(0.01 * len(Q))))
    pick = np.sort(rng.choice(len(Q), size=k, replace=False))
    got, _, _ = range_query_batch(index, Q[pick], t, exclusion)
    want = exhaustive_range_batch(data, index.metric, Q[pick], t)
    for qi, g, w in zip(pick, got, want):
        if not np.array_equal(np.sort(perm[g]), w):
            raise VerificationError(
                f"{index.config.structure}/{exclusion} t={t:g}: query {qi} returned {len(g)} ids, oracle {len(w)}")


def bench_cell(data: np.ndarray, Q: np.ndarray, metric: MetricDescriptor, structure: str, exclusion: str,
               t: float, settings: BenchSettings) -> BenchRow:
    """Rebuild on shuffled data until the relative SEM of per-build means meets the target."""
    # the tree sequence depends on the structure only, so exclusions and thresholds see identical trees
    cell_seed = derive_seed(settings.seed, structure)
    rng = np.random.default_rng(cell_seed)
    means: list[float] = []
    builds: list[int] = []
    started = time.perf_counter()
    while True:
        rep = len(means)
        perm = rng.permutation(len(data))
        cfg = IndexConfig.named(structure, exclusion=exclusion, seed=derive_seed(cell_seed, rep))
        index = build(data[perm], metric, cfg)
        _, counts, _ = range_query_batch(index, Q, t, exclusion)
        means.append(float(counts.mean()))
        builds.append(index.build_distances)
        if settings.verify and rep == 0:
            _verify(index, data, perm, Q, t, exclusion, np.random.default_rng(derive_seed(cell_seed, "verify")))
        sem = relative_sem(means)
        if len(means) >= settings.max_repeats or (len(means) >= settings.min_repeats and sem <= settings.sem_target):
            break
    if sem > settings.sem_target:
        log.warning("%s/%s t=%g stopped at %d builds with SEM %.4f", structure, exclusion, t, len(means), sem)
    log.info("%s/%s t=%g: %.1f distances/query, %d builds, %.2fs",
             structure, exclusion, t, np.mean(means), len(means), time.perf_counter() - started)
    return BenchRow(
        structure=structure, selection=STRUCTURES[structure].selection, exclusion=exclusion,
        metric=metric.name, threshold=t, mean_distances=float(np.mean(means)), sem=sem,
        repeats=len(means), build_distances=int(round(np.mean(builds))), queries=len(Q), seed=settings.seed)


def run_bench(dataset: Dataset, metric, structures, exclusions, thresholds, query_fraction: float = 0.10,
              settings: BenchSettings | None = None) -> list[BenchRow]:
    settings = settings or BenchSettings()
    metric = get_metric(metric)
    check_exclusions(metric, exclusions)
    for s in structures:
        if s not in STRUCTURES:
            raise ValueError(f"unknown structure {s!r}")
    data_part, query_part = split_queries(dataset, query_fraction, settings.seed)
    ts = []
    for spec in thresholds:
        if isinstance(spec, str):
            spec = ThresholdSpec.parse(spec)
        elif not isinstance(spec, ThresholdSpec):
            spec = ThresholdSpec("absolute", float(spec))
        ts.append(spec.resolve(data_part, metric, seed=settings.seed))
    data, Q = data_part.vectors, query_part.vectors
    cells = [(s, ex, t) for s in structures for ex in exclusions for t in ts]

    def work(cell):
        return bench_cell(data, Q, metric, cell[0], cell[1], cell[2], settings)

    if settings.threads > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            return list(pool.map(work, cells))
    return [work(c) for c in cells]


# -- dimension sweep -----------------------------------------------------------

DIM_SWEEP_STRUCTURES = ("hpt_fft_log", "hpt_random_log")


@dataclass
class SweepRow:
    dim: int
    n: int
    structure: str
    exclusion: str
    threshold: float
    mean_distances: float
    sem: float
    repeats: int
    fraction_accessed: float


def _repeat_until(make_counts, exclusions, sem_target, min_repeats, max_repeats):
    """Repeat builds; ``make_counts(rep)`` returns {exclusion: mean count} for one build."""
    per = {ex: [] for ex in exclusions}
    while True:
        for ex, v in make_counts(len(per[exclusions[0]])).items():
            per[ex].append(v)
        reps = len(per[exclusions[0]])
        sems = {ex: relative_sem(v) for ex, v in per.items()}
        if reps >= max_repeats or (reps >= min_repeats and max(sems.values()) <= sem_target):
            return per, sems


def run_dim_sweep(dims, n: int = 100_000, queries: int = 1000, structures=DIM_SWEEP_STRUCTURES,
                  exclusions=("hilbert", "hyperbolic"), seed: int = 0, sem_target: float = 0.01,
                  min_repeats: int = 2, max_repeats: int = 5) -> list[SweepRow]:
    rows = []
    for dim in dims:
        pool = generate_uniform(n + queries, dim, derive_seed(seed, "dim", dim)).vectors
        data, Q = pool[:n], pool[n:]
        t = calibrate_radius(dim, 1.0 / n)
        for s in structures:
            def one(rep, s=s):
                index = build(data, "euclidean", IndexConfig.named(s, seed=derive_seed(seed, dim, s, rep)))
                # one tree serves both exclusions
                return {ex: float(range_query_batch(index, Q, t, ex)[1].mean()) for ex in exclusions}

            per, sems = _repeat_until(one, list(exclusions), sem_target, min_repeats, max_repeats)
            for ex in exclusions:
                m = float(np.mean(per[ex]))
                rows.append(SweepRow(dim, n, s, ex, t, m, sems[ex], len(per[ex]), m / n))
            log.info("dim %d %s: %s", dim, s, {ex: round(float(np.mean(v)), 1) for ex, v in per.items()})
    return rows


# -- scaling sweep ---------------------------------------------------------------

SCALING_STRUCTURES = ("hpt_fft_log", "monpt_far", "vpt", "lrt_far")


@dataclass
class ScalingRow:
    size: int
    structure: str
    exclusion: str
    fraction: float
    threshold: float
    mean_distances: float
    proportion_accessed: float


def run_scaling(dataset: Dataset, sizes, structures=SCALING_STRUCTURES, fractions=(1e-5, 1e-4, 1e-3),
                exclusions=("hilbert", "hyperbolic"), queries: int = 1000, metric="euclidean",
                seed: int = 0) -> list[ScalingRow]:
    """Proportion of data accessed per query on growing prefixes; queries come from a disjoint part."""
    metric = get_metric(metric)
    check_exclusions(metric, exclusions)
    sizes = sorted(int(s) for s in sizes)
    if sizes[-1] + queries > len(dataset):
        raise ValueError(f"need {sizes[-1] + queries} vectors, dataset has {len(dataset)}")
    perm = np.random.default_rng(seed).permutation(len(dataset))
    Q = dataset.vectors[perm[:queries]]
    pool = dataset.vectors[perm[queries:]]
    # thresholds are fixed across sizes, calibrated on the largest subset
    largest = Dataset(pool[: sizes[-1]])
    ts = [calibrate_threshold_empirical(largest, metric, f, max(100_000, int(math.ceil(100 / f))), seed)
          for f in fractions]
    rows = []
    for size in sizes:
        data = pool[:size]
        for s in structures:
            index = build(data, metric, IndexConfig.named(s, seed=derive_seed(seed, size, s)))
            for f, t in zip(fractions, ts):
                for ex in exclusions:
                    mean = float(range_query_batch(index, Q, t, ex)[1].mean())
                    rows.append(ScalingRow(size, s, ex, f, t, mean, mean / size))
    return rows


# -- scatter / exclusive queries -------------------------------------------------

PIVOT_MODES = ("random", "far-of-1000", "near-of-1000")


@dataclass
class ScatterResult:
    ids: np.ndarray
    x: np.ndarray
    y: np.ndarray
    side: np.ndarray
    exclusive: dict  # exclusion -> bool mask (True = can exclude the opposing side)
    p1: int
    p2: int
    delta: float
    t: float

    def non_exclusive(self, exclusion: str) -> int:
        return int(np.count_nonzero(~self.exclusive[exclusion]))

    def exclusion_probability(self, exclusion: str) -> float:
        return float(np.mean(self.exclusive[exclusion]))


def choose_pivots(metric: MetricDescriptor, X: np.ndarray, pool: np.ndarray, mode: str,
                  rng: np.random.Generator, pairs: int = 1000) -> tuple[int, int]:
    if mode == "random":
        a, b = rng.choice(pool, size=2, replace=False)
        return int(a), int(b)
    if mode not in PIVOT_MODES:
        raise ValueError(f"pivot mode must be one of {PIVOT_MODES}")
    i = rng.choice(pool, size=pairs)
    j = rng.choice(pool, size=pairs)
    ok = i != j
    i, j = i[ok], j[ok]
    d = kernels.paired(X[i], X[j], metric.kernel, metric.alpha)
    k = int(np.argmax(d)) if mode == "far-of-1000" else int(np.argmin(d))
    return int(i[k]), int(j[k])


def run_scatter(dataset: Dataset, t: float, pivot_mode: str = "random", sample: int = 500,
                strategy: str | None = None, metric="euclidean", seed: int = 0) -> ScatterResult:
    """Project a sample against a pivot pair drawn from the rest of the data."""
    metric = get_metric(metric)
    X = metric.prepare(dataset.vectors)
    if len(X) < sample + 2:
        raise ValueError(f"need more than {sample + 1} vectors")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(X))
    ids, pool = np.sort(perm[:sample]), perm[sample:]
    p1, p2 = choose_pivots(metric, X, pool, pivot_mode, rng)
    d1 = metric.one_to_many(X[p1], X, ids)
    d2 = metric.one_to_many(X[p2], X, ids)
    delta = float(metric.one_to_many(X[p1], X, [p2])[0])
    if delta <= 0:
        raise ValueError("degenerate pivot pair: the two pivots coincide")
    x, y = project_many(d1, d2, delta)
    if strategy:
        side = partition_strategies(np.column_stack([x, y]), strategy).astype(np.int64)
    else:
        side = (x >= 0).astype(np.int64)
    exclusive = {"hyperbolic": exclusion_verdicts(d1, d2, delta, t, "hyperbolic")}
    if metric.four_point:
        exclusive["hilbert"] = exclusion_verdicts(d1, d2, delta, t, "hilbert")
    return ScatterResult(ids, x, y, side, exclusive, p1, p2, delta, t)


# -- space overhead --------------------------------------------------------------

def overhead(n: float, arity_policy: str = "log") -> float:
    """Bytes of inter-pivot storage for a tree over ``n`` objects (4-byte distances)."""
    total = 0.0
    mult = 1.0
    while True:
        if arity_policy == "log":
            p = math.floor(math.log(n)) if n > 2 else 0
        elif arity_policy == "binary":
            p = 2
        elif arity_policy.startswith("fixed:"):
            p = int(arity_policy.split(":", 1)[1])
        else:
            raise ValueError(f"unknown arity policy {arity_policy!r}")
        # a node that cannot hold more than one pivot pair's worth of data is a leaf
        if n <= 2 or p <= 1 or n <= p and arity_policy != "log":
            return total
        total += mult * math.comb(p, 2) * 4
        mult *= p
        n = (n - p) / p


def overhead_report(n: float, arity_policy: str = "log") -> tuple[float, float]:
    if n < 1:
        raise ValueError("n must be at least 1")
    total = overhead(n, arity_policy)
    return total, total / n
