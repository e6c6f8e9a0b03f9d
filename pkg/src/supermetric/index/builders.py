"""Tree construction.  All builders are iterative (no recursion limit) and
emit a :class:`FlatTree`; distances go through a counting :class:`Space`."""
from __future__ import annotations

import numpy as np

from .. import _layout as L
from ..planar import align_to_line, fit_line_xy, project_many
from .config import IndexConfig, arity_for
from .flat import FlatTree, TreeWriter
from .selection import choose_outlier, fft_positions, sat_positions, scan_order
from .space import Space


def _upper_median(values: np.ndarray) -> float:
    m = len(values)
    return float(np.partition(values, m // 2)[m // 2])


def build_partition(space: Space, cfg: IndexConfig, rng: np.random.Generator) -> FlatTree:
    """n-ary hyperplane partition trees: the hpt_* and sat_* families."""
    fam = cfg.family
    ids = np.arange(space.n, dtype=np.int64)
    w = TreeWriter()
    root = w.alloc()
    root_pivot = -1
    global_key = None
    if fam.family == "sat":
        centre = choose_outlier(space, ids, rng)
        rest = ids[ids != centre]
        d_centre = space.dists(centre, rest)
        root_pivot = centre
        if fam.selection == "global":
            global_key = np.zeros(space.n)
            global_key[rest] = d_centre
        tasks = [(root, rest, d_centre, [centre] if fam.pure else [])]
    else:
        tasks = [(root, ids, None, [])]

    while tasks:
        k, S, d_centre, ancestors = tasks.pop()
        m = len(S)
        arity = arity_for(fam.arity_policy, m)
        leaf_cap = cfg.leaf_capacity or (arity if arity is not None else 2)
        if m <= leaf_cap or m == 1:
            w.set_leaf(k, S)
            continue
        if arity is not None:
            arity = min(arity, m)
        if fam.family == "hpt":
            if fam.selection == "fft":
                pos, D = fft_positions(space, S, arity, rng)
            else:
                pos = rng.choice(m, size=arity, replace=False).astype(np.int64)
                D = np.vstack([space.dists(S[p], S) for p in pos])
        else:
            order = scan_order(d_centre, fam.selection, None if global_key is None else global_key[S])
            pos, D = sat_positions(space, S, d_centre, order, arity)
        pivots = S[pos]
        n = len(pivots)
        keep = np.ones(m, dtype=bool)
        keep[pos] = False
        rest = S[keep]
        Dr = D[:, keep]
        # argmin returns the first minimum: ties go to the lowest pivot index
        assign = np.argmin(Dr, axis=0) if len(rest) else np.empty(0, dtype=np.int64)

        inter = D[:, pos]
        inter = np.triu(inter, 1)
        inter = inter + inter.T

        anc_dist = None
        if fam.pure:
            anc = np.asarray(ancestors, dtype=np.int64)
            anc_dist = np.empty((n, len(anc)))
            # the node centre is the last ancestor; its distances are already known
            anc_dist[:, -1] = d_centre[pos]
            if len(anc) > 1:
                for i, p in enumerate(pivots):
                    anc_dist[i, :-1] = space.dists(p, anc[:-1])

        children = np.full(n, -1, dtype=np.int64)
        radii = np.zeros(n)
        for i in range(n):
            members = np.flatnonzero(assign == i)
            if not len(members):
                continue
            child = w.alloc()
            children[i] = child
            di = Dr[i, members]
            radii[i] = float(di.max())
            child_anc = list(ancestors) + [int(p) for p in pivots if p != pivots[i]] + [int(pivots[i])] \
                if fam.pure else []
            tasks.append((child, rest[members], di, child_anc))
        if fam.pure:
            w.set_partition(k, pivots, children, radii, inter, ancestors, anc_dist)
        else:
            w.set_partition(k, pivots, children, radii, inter)
    return w.finish(root, root_pivot)


def _radius(d: np.ndarray) -> float:
    return float(d.max()) if len(d) else 0.0


def build_binary(space: Space, cfg: IndexConfig, rng: np.random.Generator) -> FlatTree:
    """Monotone hyperplane trees (unbalanced and balanced) and the line-fit (LRT) tree."""
    fam = cfg.family
    kind = {"monpt": L.MONO, "balanced_monpt": L.MONO_BALANCED, "lrt": L.LRT}[fam.family]
    leaf_cap = cfg.leaf_capacity or 2
    ids = np.arange(space.n, dtype=np.int64)
    w = TreeWriter()
    p_root = int(rng.integers(space.n))
    rest = ids[ids != p_root]
    root = w.alloc()
    tasks = [(root, rest, p_root, space.dists(p_root, rest))]
    while tasks:
        k, A, p1, d1 = tasks.pop()
        if len(A) <= leaf_cap:
            w.set_leaf(k, A)
            continue
        j = int(np.argmax(d1)) if fam.selection == "far" else int(rng.integers(len(A)))
        p2 = int(A[j])
        delta = float(d1[j])
        mask = np.ones(len(A), dtype=bool)
        mask[j] = False
        A, d1 = A[mask], d1[mask]
        d2 = space.dists(p2, A)

        cos_a = sin_a = h = 0.0
        split = 0.0
        if kind == L.MONO:
            go_left = d1 <= d2
        elif delta <= 0:
            # coincident pivots: no usable plane, bisect by position and rely on cover radii
            go_left = np.zeros(len(A), dtype=bool)
            go_left[: len(A) // 2] = True
        elif kind == L.MONO_BALANCED:
            x = (d1 * d1 - d2 * d2) / (2.0 * delta)
            split = _upper_median(x)
            go_left = x < split
        else:
            x, y = project_many(d1, d2, delta)
            if cfg.fit_sample is not None and len(x) > cfg.fit_sample:
                pick = rng.choice(len(x), size=cfg.fit_sample, replace=False)
                params = fit_line_xy(x[pick], y[pick])
            else:
                params = fit_line_xy(x, y)
            # rotate by -theta so the fitted line becomes the new X-axis
            cos_a, sin_a, h = np.cos(-params.theta), np.sin(-params.theta), params.h
            rx = align_to_line(x, y, params)
            split = _upper_median(rx)
            go_left = rx < split

        go_right = ~go_left
        left = w.alloc() if go_left.any() else -1
        right = w.alloc() if go_right.any() else -1
        floats = [delta, split, cos_a, sin_a, h,
                  _radius(d1[go_left]), _radius(d2[go_left]),
                  _radius(d1[go_right]), _radius(d2[go_right])]
        w.set_binary(k, kind, p1, p2, left, right, floats)
        if right >= 0:
            if kind == L.LRT:
                tasks.append((right, A[go_right], p1, d1[go_right]))
            else:
                tasks.append((right, A[go_right], p2, d2[go_right]))
        if left >= 0:
            tasks.append((left, A[go_left], p1, d1[go_left]))
    return w.finish(root, p_root)


def build_vpt(space: Space, cfg: IndexConfig, rng: np.random.Generator) -> FlatTree:
    """Balanced vantage point tree: inside holds d <= median, outside d > median."""
    leaf_cap = cfg.leaf_capacity or 2
    w = TreeWriter()
    root = w.alloc()
    tasks = [(root, np.arange(space.n, dtype=np.int64))]
    while tasks:
        k, A = tasks.pop()
        if len(A) <= leaf_cap:
            w.set_leaf(k, A)
            continue
        j = int(rng.integers(len(A)))
        p = int(A[j])
        A = np.delete(A, j)
        d = space.dists(p, A)
        mu = float(np.partition(d, (len(d) - 1) // 2)[(len(d) - 1) // 2])
        inner = d <= mu
        outer = ~inner
        inside = w.alloc() if inner.any() else -1
        outside = w.alloc() if outer.any() else -1
        bounds = [
            float(d[inner].min()) if inner.any() else 0.0, float(d[inner].max()) if inner.any() else 0.0,
            float(d[outer].min()) if outer.any() else 0.0, float(d[outer].max()) if outer.any() else 0.0,
        ]
        w.set_vpt(k, p, inside, outside, bounds)
        if outside >= 0:
            tasks.append((outside, A[outer]))
        if inside >= 0:
            tasks.append((inside, A[inner]))
    return w.finish(root)


def build_tree(space: Space, cfg: IndexConfig) -> FlatTree:
    rng = np.random.default_rng(cfg.seed)
    fam = cfg.family.family
    if fam in ("hpt", "sat"):
        return build_partition(space, cfg, rng)
    if fam == "vpt":
        return build_vpt(space, cfg, rng)
    return build_binary(space, cfg, rng)
