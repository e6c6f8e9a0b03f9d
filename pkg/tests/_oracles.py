"""Independent reference implementations for the tests: plain loops, no package kernels."""
from __future__ import annotations

import math


def naive_euclidean(a, b):
    s = 0.0
    for x, y in zip(a, b):
        s += (x - y) * (x - y)
    return math.sqrt(s)


def naive_manhattan(a, b):
    return sum(abs(x - y) for x, y in zip(a, b))


def naive_chebyshev(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def _unit(v):
    s = sum(v)
    return [x / s for x in v]


def naive_jsd(a, b):
    p, q = _unit(a), _unit(b)
    s = 0.0
    for x, y in zip(p, q):
        m = (x + y) / 2
        if x > 0:
            s += 0.5 * x * math.log2(x / m)
        if y > 0:
            s += 0.5 * y * math.log2(y / m)
    return math.sqrt(max(s, 0.0))


def naive_triangular(a, b):
    p, q = _unit(a), _unit(b)
    s = 0.0
    for x, y in zip(p, q):
        if x + y > 0:
            s += (x - y) ** 2 / (x + y)
    return math.sqrt(s / 2)


def naive_cosine(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    return naive_euclidean([x / na for x in a], [y / nb for y in b])


NAIVE = {
    "euclidean": naive_euclidean,
    "manhattan": naive_manhattan,
    "chebyshev": naive_chebyshev,
    "jsd": naive_jsd,
    "triangular": naive_triangular,
    "cosine": naive_cosine,
}


def brute_range(points, q, t, dist):
    return {i for i, p in enumerate(points) if dist(q, p) <= t}


def sat_scan(values, centre, order):
    """Hand-simulated SAT neighbour scan on 1-D values."""
    d = {v: abs(v - centre) for v in values}
    if order == "proximal":
        seq = sorted(values, key=lambda v: d[v])
    else:
        seq = sorted(values, key=lambda v: -d[v])
    chosen = []
    for v in seq:
        if all(d[v] < abs(v - c) for c in chosen):
            chosen.append(v)
    return chosen


def normal_equations_fit(xs, ys):
    """Slope and intercept by solving the 2x2 normal equations directly."""
    n = len(xs)
    sx = sum(xs)
    sy = sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    det = n * sxx - sx * sx
    m = (n * sxy - sx * sy) / det
    b = (sy * sxx - sx * sxy) / det
    return m, b


def overhead_recursive(n):
    p = math.floor(math.log(n)) if n > 2 else 0
    if n <= 2 or p <= 1:
        return 0.0
    return math.comb(p, 2) * 4 + p * overhead_recursive((n - p) / p)
