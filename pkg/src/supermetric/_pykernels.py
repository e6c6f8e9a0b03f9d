"""Pure-Python/numpy kernels; semantics identical to ``_ckernels.pyx``."""
from __future__ import annotations

import math

import numpy as np

from . import _layout as L


def one_to_many(X: np.ndarray, q: np.ndarray, idx, code: int, alpha: float) -> np.ndarray:
    rows = X if idx is None else X[np.asarray(idx, dtype=np.int64)]
    if rows.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    return _broadcast(rows, q, code, alpha)


def paired(A: np.ndarray, B: np.ndarray, code: int, alpha: float) -> np.ndarray:
    """d(A[k], B[k]) for every row k."""
    if A.shape != B.shape:
        raise ValueError("paired distances need equally shaped inputs")
    if A.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    return _broadcast(A, B, code, alpha)


def _broadcast(rows: np.ndarray, q: np.ndarray, code: int, alpha: float) -> np.ndarray:
    if code == L.EUCLIDEAN:
        diff = rows - q
        d = np.sqrt(np.sum(diff * diff, axis=1))
    elif code == L.MANHATTAN:
        d = np.sum(np.abs(rows - q), axis=1)
    elif code == L.CHEBYSHEV:
        d = np.max(np.abs(rows - q), axis=1)
    elif code == L.JSD:
        m = rows + q
        with np.errstate(divide="ignore", invalid="ignore"):
            qb = np.broadcast_to(q, rows.shape)
            t1 = np.where(qb > 0, qb * np.log2(2.0 * qb / m), 0.0)
            t2 = np.where(rows > 0, rows * np.log2(2.0 * rows / m), 0.0)
        d = np.sqrt(np.maximum(0.5 * np.sum(t1 + t2, axis=1), 0.0))
    elif code == L.TRIANGULAR:
        den = rows + q
        num = (rows - q) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(den > 0, num / den, 0.0)
        d = np.sqrt(0.5 * np.sum(terms, axis=1))
    else:
        raise ValueError(f"unknown metric code {code}")
    if alpha != 1.0:
        d = d ** alpha
    return d


def range_query(tree, X, q, t, hilbert, code, alpha):
    """Exact range query over a flat tree; returns (sorted ids, distance count, nodes visited)."""
    cache: dict[int, float] = {}
    count = 0
    results: list[int] = []
    two_t = 2.0 * t

    def dq(i: int) -> float:
        nonlocal count
        d = cache.get(i)
        if d is None:
            d = float(one_to_many(X, q, [i], code, alpha)[0])
            cache[i] = d
            count += 1
        return d

    kind, ni, nf = tree.kind, tree.ni, tree.nf
    if tree.root_pivot >= 0 and dq(tree.root_pivot) <= t:
        results.append(tree.root_pivot)
    stack = [tree.root] if tree.root >= 0 else []
    visited = 0
    while stack:
        k = stack.pop()
        visited += 1
        kd = kind[k]
        row = ni[k]
        if kd == L.LEAF:
            off, cnt = int(row[0]), int(row[1])
            ids = tree.leaf_ids[off:off + cnt]
            if cnt:
                d = one_to_many(X, q, ids, code, alpha)
                count += cnt
                results.extend(int(i) for i in ids[d <= t])
        elif kd == L.PARTITION:
            off, n = int(row[0]), int(row[1])
            anc_off, n_anc = int(row[2]), int(row[3])
            ip_off, ancd_off = int(row[4]), int(row[5])
            piv = tree.piv_ids[off:off + n]
            fresh = [int(p) for p in piv if int(p) not in cache]
            if fresh:
                for p, d in zip(fresh, one_to_many(X, q, fresh, code, alpha)):
                    cache[p] = float(d)
                count += len(fresh)
            dist = [cache[int(p)] for p in piv]
            for i in range(n):
                if dist[i] <= t:
                    results.append(int(piv[i]))
            anc_d = [cache[int(a)] for a in tree.anc_ids[anc_off:anc_off + n_anc]]
            for i in range(n - 1, -1, -1):
                child = int(tree.piv_child[off + i])
                if child < 0:
                    continue
                di = dist[i]
                if di > tree.piv_cr[off + i] + t:
                    continue
                excluded = False
                for j in range(n):
                    if j == i:
                        continue
                    dj = dist[j]
                    if hilbert:
                        delta = tree.ip[ip_off + i * n + j]
                        if delta > 0 and (di * di - dj * dj) / delta > two_t:
                            excluded = True
                            break
                    elif di - dj > two_t:
                        excluded = True
                        break
                if not excluded:
                    for a in range(n_anc):
                        da = anc_d[a]
                        if hilbert:
                            delta = tree.ancd[ancd_off + i * n_anc + a]
                            if delta > 0 and (di * di - da * da) / delta > two_t:
                                excluded = True
                                break
                        elif di - da > two_t:
                            excluded = True
                            break
                if not excluded:
                    stack.append(child)
        elif kd == L.VPT:
            p, inside, outside = int(row[0]), int(row[1]), int(row[2])
            d = dq(p)
            if d <= t:
                results.append(p)
            f = nf[k]
            if outside >= 0 and not (d + t < f[2] or d - t > f[3]):
                stack.append(outside)
            if inside >= 0 and not (d + t < f[0] or d - t > f[1]):
                stack.append(inside)
        else:
            p1, p2, left, right = int(row[0]), int(row[1]), int(row[2]), int(row[3])
            d1 = dq(p1)
            d2 = dq(p2)
            if d2 <= t:
                results.append(p2)
            f = nf[k]
            delta, split = f[0], f[1]
            go_left = left >= 0 and not (d1 > f[5] + t or d2 > f[6] + t)
            go_right = right >= 0 and not (d1 > f[7] + t or d2 > f[8] + t)
            if kd == L.MONO:
                if hilbert:
                    if delta > 0:
                        v = (d1 * d1 - d2 * d2) / delta
                        if v > two_t:
                            go_left = False
                        elif -v > two_t:
                            go_right = False
                else:
                    if d1 - d2 > two_t:
                        go_left = False
                    elif d2 - d1 > two_t:
                        go_right = False
            elif kd == L.MONO_BALANCED:
                if delta > 0:
                    if hilbert:
                        x = (d1 * d1 - d2 * d2) / (2.0 * delta)
                        if x - t >= split:
                            go_left = False
                        if x + t < split:
                            go_right = False
                    else:
                        lo1, hi1 = max(d1 - t, 0.0), d1 + t
                        lo2, hi2 = max(d2 - t, 0.0), d2 + t
                        if (lo1 * lo1 - hi2 * hi2) / (2.0 * delta) >= split:
                            go_left = False
                        if (hi1 * hi1 - lo2 * lo2) / (2.0 * delta) < split:
                            go_right = False
            elif kd == L.LRT:
                if hilbert and delta > 0:
                    x = (d1 * d1 - d2 * d2) / (2.0 * delta)
                    a = x + 0.5 * delta
                    y = math.sqrt(max(0.0, d1 * d1 - a * a))
                    rx = x * f[2] - y * f[3]
                    if rx < split - t:
                        go_right = False
                    elif rx > split + t:
                        go_left = False
            if go_right:
                stack.append(right)
            if go_left:
                stack.append(left)
    out = np.array(sorted(results), dtype=np.int64)
    return out, count, visited


def range_query_batch(tree, X, Q, t, hilbert, code, alpha):
    ids, counts, visits = [], np.zeros(len(Q), dtype=np.int64), np.zeros(len(Q), dtype=np.int64)
    for i in range(len(Q)):
        r, c, v = range_query(tree, X, Q[i], t, hilbert, code, alpha)
        ids.append(r)
        counts[i] = c
        visits[i] = v
    return ids, counts, visits
