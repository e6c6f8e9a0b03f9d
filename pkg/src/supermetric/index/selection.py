"""Pivot selection: random, farthest-first traversal, and the SAT neighbour scan."""
from __future__ import annotations

import numpy as np

from .space import Space


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_k(k: int, m: int) -> None:
    if k < 1:
        raise ValueError("need at least one pivot")
    if k > m:
        raise ValueError(f"cannot pick {k} pivots from {m} candidates")


def select_random(candidates, k: int, seed) -> list[int]:
    candidates = np.asarray(candidates, dtype=np.int64)
    _check_k(k, len(candidates))
    pos = _rng(seed).choice(len(candidates), size=k, replace=False)
    return [int(c) for c in candidates[pos]]


def fft_positions(space: Space, candidates: np.ndarray, k: int, rng, first: int | None = None):
    """Farthest-first traversal over ``candidates``.

    Returns (positions into candidates, k x m distance matrix from each pivot
    to every candidate).  The matrix is reused by the builders for assignment.
    """
    m = len(candidates)
    _check_k(k, m)
    pos = [int(rng.integers(m)) if first is None else int(first)]
    rows = [space.dists(candidates[pos[0]], candidates)]
    mind = rows[0].copy()
    mind[pos[0]] = -np.inf
    for _ in range(1, k):
        nxt = int(np.argmax(mind))
        pos.append(nxt)
        row = space.dists(candidates[nxt], candidates)
        rows.append(row)
        np.minimum(mind, row, out=mind)
        mind[pos] = -np.inf
    return np.asarray(pos, dtype=np.int64), np.vstack(rows)


def select_fft(space: Space, candidates, k: int, seed, first=None) -> list[int]:
    """Greedy max-min pivots; ``first`` (a candidate id) overrides the seeded first pick."""
    candidates = np.asarray(candidates, dtype=np.int64)
    first_pos = None
    if first is not None:
        hits = np.flatnonzero(candidates == first)
        if not hits.size:
            raise ValueError(f"{first} is not a candidate")
        first_pos = int(hits[0])
    pos, _ = fft_positions(space, candidates, k, _rng(seed), first_pos)
    return [int(c) for c in candidates[pos]]


def sat_positions(space: Space, candidates: np.ndarray, d_centre: np.ndarray, order: np.ndarray,
                  cap: int | None = None):
    """Scan ``candidates`` in ``order``, keeping each one nearer the centre than to every kept pivot."""
    m = len(candidates)
    mind = np.full(m, np.inf)
    pos: list[int] = []
    rows = []
    i = 0
    while i < m and (cap is None or len(pos) < cap):
        rest = order[i:]
        ok = np.flatnonzero(d_centre[rest] < mind[rest])
        if not ok.size:
            break
        j = i + int(ok[0])
        s = int(order[j])
        pos.append(s)
        row = space.dists(candidates[s], candidates)
        rows.append(row)
        np.minimum(mind, row, out=mind)
        i = j + 1
    if not pos:
        return np.empty(0, dtype=np.int64), np.empty((0, m))
    return np.asarray(pos, dtype=np.int64), np.vstack(rows)


def scan_order(d_centre: np.ndarray, order: str, global_key: np.ndarray | None = None) -> np.ndarray:
    if order == "proximal":
        return np.argsort(d_centre, kind="stable")
    if order == "distal":
        return np.argsort(-d_centre, kind="stable")
    if order == "global":
        if global_key is None:
            raise ValueError("global order needs distances from the tree centre")
        return np.argsort(-global_key, kind="stable")
    raise ValueError(f"unknown SAT order {order!r}")


def select_sat(space: Space, candidates, centre: int, order: str, cap: int | None = None,
               global_centre: int | None = None) -> list[int]:
    candidates = np.asarray(candidates, dtype=np.int64)
    if not len(candidates):
        return []
    d_centre = space.dists(centre, candidates)
    key = None
    if order == "global":
        key = space.dists(centre if global_centre is None else global_centre, candidates)
    pos, _ = sat_positions(space, candidates, d_centre, scan_order(d_centre, order, key), cap)
    return [int(c) for c in candidates[pos]]


def choose_outlier(space: Space, ids: np.ndarray, rng, sample: int = 100) -> int:
    """Farthest member of a random sample from a random anchor object."""
    anchor = int(ids[rng.integers(len(ids))])
    pool = ids[rng.choice(len(ids), size=min(sample, len(ids)), replace=False)]
    return int(pool[int(np.argmax(space.dists(anchor, pool)))])
