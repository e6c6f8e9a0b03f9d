"""Flat, array-backed tree representation consumed by the query kernels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _layout as L


@dataclass
class FlatTree:
    kind: np.ndarray
    ni: np.ndarray
    nf: np.ndarray
    piv_ids: np.ndarray
    piv_child: np.ndarray
    piv_cr: np.ndarray
    ip: np.ndarray
    anc_ids: np.ndarray
    ancd: np.ndarray
    leaf_ids: np.ndarray
    root: int
    root_pivot: int

    @property
    def n_nodes(self) -> int:
        return len(self.kind)

    def pivots_of(self, k: int) -> np.ndarray:
        """Objects owned as pivots by node ``k`` (inherited pivots excluded)."""
        row = self.ni[k]
        kd = self.kind[k]
        if kd == L.PARTITION:
            return self.piv_ids[row[0]:row[0] + row[1]]
        if kd == L.VPT:
            return row[:1].copy()
        if kd in (L.MONO, L.MONO_BALANCED, L.LRT):
            return row[1:2].copy()
        return np.empty(0, dtype=np.int64)

    def children_of(self, k: int) -> list[int]:
        row = self.ni[k]
        kd = self.kind[k]
        if kd == L.PARTITION:
            ch = self.piv_child[row[0]:row[0] + row[1]]
        elif kd == L.VPT:
            ch = row[1:3]
        elif kd == L.LEAF:
            return []
        else:
            ch = row[2:4]
        return [int(c) for c in ch if c >= 0]

    def leaf_members(self, k: int) -> np.ndarray:
        row = self.ni[k]
        return self.leaf_ids[row[0]:row[0] + row[1]]

    def subtree_points(self, k: int) -> np.ndarray:
        """Every object stored at or below node ``k``."""
        out = []
        stack = [k]
        while stack:
            j = stack.pop()
            if self.kind[j] == L.LEAF:
                out.append(self.leaf_members(j))
            else:
                out.append(self.pivots_of(j))
                stack.extend(self.children_of(j))
        return np.concatenate(out) if out else np.empty(0, dtype=np.int64)

    def owned_points(self) -> np.ndarray:
        pts = self.subtree_points(self.root) if self.root >= 0 else np.empty(0, dtype=np.int64)
        if self.root_pivot >= 0:
            pts = np.concatenate([[self.root_pivot], pts])
        return pts.astype(np.int64)

    def depth(self) -> int:
        if self.root < 0:
            return 0
        best = 0
        stack = [(self.root, 1)]
        while stack:
            k, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in self.children_of(k))
        return best

    def signature(self) -> tuple:
        """Hashable summary used to compare two builds for identity."""
        arrays = (self.kind, self.ni, self.nf, self.piv_ids, self.piv_child, self.piv_cr,
                  self.ip, self.anc_ids, self.ancd, self.leaf_ids)
        return tuple(a.tobytes() for a in arrays) + (self.root, self.root_pivot)


class TreeWriter:
    """Accumulates nodes in build order; children are allocated before their parent is written."""

    def __init__(self):
        self.kind: list[int] = []
        self.ni: list[list[int]] = []
        self.nf: list[list[float]] = []
        self.piv_ids: list[np.ndarray] = []
        self.piv_child: list[np.ndarray] = []
        self.piv_cr: list[np.ndarray] = []
        self.ip: list[np.ndarray] = []
        self.anc_ids: list[np.ndarray] = []
        self.ancd: list[np.ndarray] = []
        self.leaf_ids: list[np.ndarray] = []
        self._piv_n = 0
        self._ip_n = 0
        self._anc_n = 0
        self._ancd_n = 0
        self._leaf_n = 0

    def alloc(self) -> int:
        self.kind.append(L.LEAF)
        self.ni.append([0] * L.NI)
        self.nf.append([0.0] * L.NF)
        return len(self.kind) - 1

    def set_leaf(self, k: int, ids) -> None:
        ids = np.asarray(ids, dtype=np.int64)
        self.kind[k] = L.LEAF
        self.ni[k] = [self._leaf_n, len(ids), 0, 0, 0, 0]
        self.leaf_ids.append(ids)
        self._leaf_n += len(ids)

    def set_partition(self, k, pivots, children, radii, inter_pivot, anc_ids=(), anc_dist=None) -> None:
        n = len(pivots)
        anc_ids = np.asarray(anc_ids, dtype=np.int64)
        n_anc = len(anc_ids)
        self.kind[k] = L.PARTITION
        self.ni[k] = [self._piv_n, n, self._anc_n, n_anc, self._ip_n, self._ancd_n]
        self.piv_ids.append(np.asarray(pivots, dtype=np.int64))
        self.piv_child.append(np.asarray(children, dtype=np.int64))
        self.piv_cr.append(np.asarray(radii, dtype=np.float64))
        self.ip.append(np.asarray(inter_pivot, dtype=np.float64).reshape(n * n))
        self._piv_n += n
        self._ip_n += n * n
        if n_anc:
            self.anc_ids.append(anc_ids)
            self.ancd.append(np.asarray(anc_dist, dtype=np.float64).reshape(n * n_anc))
            self._anc_n += n_anc
            self._ancd_n += n * n_anc

    def set_binary(self, k, kind, p1, p2, left, right, floats) -> None:
        self.kind[k] = kind
        self.ni[k] = [int(p1), int(p2), int(left), int(right), 0, 0]
        self.nf[k] = [float(v) for v in floats] + [0.0] * (L.NF - len(floats))

    def set_vpt(self, k, pivot, inside, outside, bounds) -> None:
        self.kind[k] = L.VPT
        self.ni[k] = [int(pivot), int(inside), int(outside), 0, 0, 0]
        self.nf[k] = [float(v) for v in bounds] + [0.0] * (L.NF - len(bounds))

    def finish(self, root: int, root_pivot: int = -1) -> FlatTree:
        def cat(parts, dtype):
            return np.ascontiguousarray(np.concatenate(parts) if parts else np.empty(0), dtype=dtype)

        return FlatTree(
            kind=np.asarray(self.kind, dtype=np.int8),
            ni=np.asarray(self.ni, dtype=np.int64).reshape(-1, L.NI),
            nf=np.asarray(self.nf, dtype=np.float64).reshape(-1, L.NF),
            piv_ids=cat(self.piv_ids, np.int64),
            piv_child=cat(self.piv_child, np.int64),
            piv_cr=cat(self.piv_cr, np.float64),
            ip=cat(self.ip, np.float64),
            anc_ids=cat(self.anc_ids, np.int64),
            ancd=cat(self.ancd, np.float64),
            leaf_ids=cat(self.leaf_ids, np.int64),
            root=int(root),
            root_pivot=int(root_pivot),
        )
