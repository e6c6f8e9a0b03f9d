# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled distance and range-query kernels.

Mirrors ``_pykernels`` exactly; see ``_layout`` for the flat tree format.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log2, pow, fabs
from libc.stdlib cimport malloc, free, realloc

cnp.import_array()

cdef enum:
    K_LEAF = 0
    K_PARTITION = 1
    K_MONO = 2
    K_MONO_BALANCED = 3
    K_LRT = 4
    K_VPT = 5

cdef enum:
    M_EUCLIDEAN = 0
    M_JSD = 2
    M_TRIANGULAR = 3
    M_MANHATTAN = 4
    M_CHEBYSHEV = 5


cdef inline double _dist(const double* a, const double* b, Py_ssize_t dim, int code, double alpha) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, x, m, v
    if code == M_EUCLIDEAN:
        for i in range(dim):
            x = a[i] - b[i]
            s += x * x
        s = sqrt(s)
    elif code == M_MANHATTAN:
        for i in range(dim):
            s += fabs(a[i] - b[i])
    elif code == M_CHEBYSHEV:
        for i in range(dim):
            x = fabs(a[i] - b[i])
            if x > s:
                s = x
    elif code == M_JSD:
        for i in range(dim):
            m = a[i] + b[i]
            v = 0.0
            if b[i] > 0:
                v += b[i] * log2(2.0 * b[i] / m)
            if a[i] > 0:
                v += a[i] * log2(2.0 * a[i] / m)
            s += v
        s = 0.5 * s
        if s < 0:
            s = 0.0
        s = sqrt(s)
    elif code == M_TRIANGULAR:
        for i in range(dim):
            m = a[i] + b[i]
            if m > 0:
                x = a[i] - b[i]
                s += x * x / m
        s = sqrt(0.5 * s)
    else:
        return -1.0
    if alpha != 1.0:
        s = pow(s, alpha)
    return s


def one_to_many(const double[:, ::1] X, const double[::1] q, idx, int code, double alpha):
    cdef Py_ssize_t dim = X.shape[1]
    cdef Py_ssize_t n, i
    cdef const cnp.int64_t[::1] ix
    if q.shape[0] != dim:
        raise ValueError("dimension mismatch")
    if code not in (M_EUCLIDEAN, M_JSD, M_TRIANGULAR, M_MANHATTAN, M_CHEBYSHEV):
        raise ValueError(f"unknown metric code {code}")
    if idx is None:
        n = X.shape[0]
        out = np.empty(n, dtype=np.float64)
        _fill_all(X, q, out, code, alpha)
        return out
    ix = np.ascontiguousarray(idx, dtype=np.int64)
    n = ix.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _dist(&q[0], &X[ix[i], 0], dim, code, alpha)
    return out


cdef void _fill_all(const double[:, ::1] X, const double[::1] q, double[::1] o, int code, double alpha) noexcept:
    cdef Py_ssize_t i, n = X.shape[0], dim = X.shape[1]
    with nogil:
        for i in range(n):
            o[i] = _dist(&q[0], &X[i, 0], dim, code, alpha)


cdef struct Tree:
    const cnp.int8_t* kind
    const cnp.int64_t* ni
    const double* nf
    const cnp.int64_t* piv_ids
    const cnp.int64_t* piv_child
    const double* piv_cr
    const double* ip
    const cnp.int64_t* anc_ids
    const double* ancd
    const cnp.int64_t* leaf_ids
    Py_ssize_t root
    Py_ssize_t root_pivot


cdef struct Scratch:
    cnp.int64_t* seen
    double* dcache
    cnp.int64_t stamp
    Py_ssize_t* stack
    Py_ssize_t stack_cap
    double* pdist
    Py_ssize_t pdist_cap
    cnp.int64_t* res
    Py_ssize_t res_len
    Py_ssize_t res_cap


cdef inline int _push_result(Scratch* s, cnp.int64_t i) noexcept nogil:
    cdef cnp.int64_t* nr
    if s.res_len == s.res_cap:
        nr = <cnp.int64_t*> realloc(s.res, 2 * s.res_cap * sizeof(cnp.int64_t))
        if nr == NULL:
            return -1
        s.res = nr
        s.res_cap *= 2
    s.res[s.res_len] = i
    s.res_len += 1
    return 0


cdef inline int _push_node(Scratch* s, Py_ssize_t* top, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t* ns
    if top[0] == s.stack_cap:
        ns = <Py_ssize_t*> realloc(s.stack, 2 * s.stack_cap * sizeof(Py_ssize_t))
        if ns == NULL:
            return -1
        s.stack = ns
        s.stack_cap *= 2
    s.stack[top[0]] = k
    top[0] += 1
    return 0


cdef inline double _dq(Scratch* s, const double* X, Py_ssize_t dim, const double* q,
                       cnp.int64_t i, int code, double alpha, cnp.int64_t* count) noexcept nogil:
    if s.seen[i] == s.stamp:
        return s.dcache[i]
    cdef double d = _dist(q, X + i * dim, dim, code, alpha)
    s.seen[i] = s.stamp
    s.dcache[i] = d
    count[0] += 1
    return d


cdef int _query(Tree* T, Scratch* s, const double* X, Py_ssize_t dim, const double* q,
                double t, bint hilbert, int code, double alpha,
                cnp.int64_t* count_out, cnp.int64_t* visited_out) noexcept nogil:
    cdef cnp.int64_t count = 0, visited = 0
    cdef Py_ssize_t top = 0, k, off, n, anc_off, n_anc, ip_off, ancd_off, i, j, a
    cdef cnp.int64_t p, p1, p2, left, right, child, inside, outside
    cdef double d, di, dj, da, delta, split, x, y, rx, lo1, hi1, lo2, hi2, two_t = 2.0 * t
    cdef bint excluded, go_left, go_right
    cdef const cnp.int64_t* row
    cdef const double* f
    cdef double* nd
    cdef int kd

    s.stamp += 1
    s.res_len = 0
    if T.root_pivot >= 0:
        d = _dq(s, X, dim, q, T.root_pivot, code, alpha, &count)
        if d <= t and _push_result(s, T.root_pivot) != 0:
            return -1
    if T.root >= 0:
        if _push_node(s, &top, T.root) != 0:
            return -1
    while top > 0:
        top -= 1
        k = s.stack[top]
        visited += 1
        kd = T.kind[k]
        row = T.ni + k * 6
        f = T.nf + k * 9
        if kd == K_LEAF:
            off = row[0]
            n = row[1]
            for i in range(n):
                p = T.leaf_ids[off + i]
                d = _dist(q, X + p * dim, dim, code, alpha)
                count += 1
                if d <= t and _push_result(s, p) != 0:
                    return -1
        elif kd == K_PARTITION:
            off = row[0]
            n = row[1]
            anc_off = row[2]
            n_anc = row[3]
            ip_off = row[4]
            ancd_off = row[5]
            if n > s.pdist_cap:
                nd = <double*> realloc(s.pdist, 2 * n * sizeof(double))
                if nd == NULL:
                    return -1
                s.pdist = nd
                s.pdist_cap = 2 * n
            for i in range(n):
                p = T.piv_ids[off + i]
                d = _dq(s, X, dim, q, p, code, alpha, &count)
                s.pdist[i] = d
                if d <= t and _push_result(s, p) != 0:
                    return -1
            for i in range(n - 1, -1, -1):
                child = T.piv_child[off + i]
                if child < 0:
                    continue
                di = s.pdist[i]
                if di > T.piv_cr[off + i] + t:
                    continue
                excluded = False
                for j in range(n):
                    if j == i:
                        continue
                    dj = s.pdist[j]
                    if hilbert:
                        delta = T.ip[ip_off + i * n + j]
                        if delta > 0 and (di * di - dj * dj) / delta > two_t:
                            excluded = True
                            break
                    elif di - dj > two_t:
                        excluded = True
                        break
                if not excluded:
                    for a in range(n_anc):
                        da = s.dcache[T.anc_ids[anc_off + a]]
                        if hilbert:
                            delta = T.ancd[ancd_off + i * n_anc + a]
                            if delta > 0 and (di * di - da * da) / delta > two_t:
                                excluded = True
                                break
                        elif di - da > two_t:
                            excluded = True
                            break
                if not excluded:
                    if _push_node(s, &top, child) != 0:
                        return -1
        elif kd == K_VPT:
            p = row[0]
            inside = row[1]
            outside = row[2]
            d = _dq(s, X, dim, q, p, code, alpha, &count)
            if d <= t and _push_result(s, p) != 0:
                return -1
            if outside >= 0 and not (d + t < f[2] or d - t > f[3]):
                if _push_node(s, &top, outside) != 0:
                    return -1
            if inside >= 0 and not (d + t < f[0] or d - t > f[1]):
                if _push_node(s, &top, inside) != 0:
                    return -1
        else:
            p1 = row[0]
            p2 = row[1]
            left = row[2]
            right = row[3]
            di = _dq(s, X, dim, q, p1, code, alpha, &count)
            dj = _dq(s, X, dim, q, p2, code, alpha, &count)
            if dj <= t and _push_result(s, p2) != 0:
                return -1
            delta = f[0]
            split = f[1]
            go_left = left >= 0 and not (di > f[5] + t or dj > f[6] + t)
            go_right = right >= 0 and not (di > f[7] + t or dj > f[8] + t)
            if kd == K_MONO:
                if hilbert:
                    if delta > 0:
                        x = (di * di - dj * dj) / delta
                        if x > two_t:
                            go_left = False
                        elif -x > two_t:
                            go_right = False
                else:
                    if di - dj > two_t:
                        go_left = False
                    elif dj - di > two_t:
                        go_right = False
            elif kd == K_MONO_BALANCED:
                if delta > 0:
                    if hilbert:
                        x = (di * di - dj * dj) / (2.0 * delta)
                        if x - t >= split:
                            go_left = False
                        if x + t < split:
                            go_right = False
                    else:
                        lo1 = di - t
                        if lo1 < 0:
                            lo1 = 0.0
                        hi1 = di + t
                        lo2 = dj - t
                        if lo2 < 0:
                            lo2 = 0.0
                        hi2 = dj + t
                        if (lo1 * lo1 - hi2 * hi2) / (2.0 * delta) >= split:
                            go_left = False
                        if (hi1 * hi1 - lo2 * lo2) / (2.0 * delta) < split:
                            go_right = False
            elif kd == K_LRT:
                if hilbert and delta > 0:
                    x = (di * di - dj * dj) / (2.0 * delta)
                    y = x + 0.5 * delta
                    y = di * di - y * y
                    if y < 0:
                        y = 0.0
                    y = sqrt(y)
                    rx = x * f[2] - y * f[3]
                    if rx < split - t:
                        go_right = False
                    elif rx > split + t:
                        go_left = False
            if go_right:
                if _push_node(s, &top, right) != 0:
                    return -1
            if go_left:
                if _push_node(s, &top, left) != 0:
                    return -1
    count_out[0] = count
    visited_out[0] = visited
    return 0


cdef class _Run:
    """Owns the scratch buffers for a batch of queries against one tree."""
    cdef Tree T
    cdef Scratch s
    cdef object keep

    def __cinit__(self, tree, Py_ssize_t n_points):
        cdef cnp.ndarray kind = np.ascontiguousarray(tree.kind, dtype=np.int8)
        cdef cnp.ndarray ni = np.ascontiguousarray(tree.ni, dtype=np.int64)
        cdef cnp.ndarray nf = np.ascontiguousarray(tree.nf, dtype=np.float64)
        cdef cnp.ndarray piv_ids = np.ascontiguousarray(tree.piv_ids, dtype=np.int64)
        cdef cnp.ndarray piv_child = np.ascontiguousarray(tree.piv_child, dtype=np.int64)
        cdef cnp.ndarray piv_cr = np.ascontiguousarray(tree.piv_cr, dtype=np.float64)
        cdef cnp.ndarray ip = np.ascontiguousarray(tree.ip, dtype=np.float64)
        cdef cnp.ndarray anc_ids = np.ascontiguousarray(tree.anc_ids, dtype=np.int64)
        cdef cnp.ndarray ancd = np.ascontiguousarray(tree.ancd, dtype=np.float64)
        cdef cnp.ndarray leaf_ids = np.ascontiguousarray(tree.leaf_ids, dtype=np.int64)
        self.keep = (kind, ni, nf, piv_ids, piv_child, piv_cr, ip, anc_ids, ancd, leaf_ids)
        self.T.kind = <const cnp.int8_t*> cnp.PyArray_DATA(kind)
        self.T.ni = <const cnp.int64_t*> cnp.PyArray_DATA(ni)
        self.T.nf = <const double*> cnp.PyArray_DATA(nf)
        self.T.piv_ids = <const cnp.int64_t*> cnp.PyArray_DATA(piv_ids)
        self.T.piv_child = <const cnp.int64_t*> cnp.PyArray_DATA(piv_child)
        self.T.piv_cr = <const double*> cnp.PyArray_DATA(piv_cr)
        self.T.ip = <const double*> cnp.PyArray_DATA(ip)
        self.T.anc_ids = <const cnp.int64_t*> cnp.PyArray_DATA(anc_ids)
        self.T.ancd = <const double*> cnp.PyArray_DATA(ancd)
        self.T.leaf_ids = <const cnp.int64_t*> cnp.PyArray_DATA(leaf_ids)
        self.T.root = tree.root
        self.T.root_pivot = tree.root_pivot
        self.s.seen = <cnp.int64_t*> malloc(max(n_points, 1) * sizeof(cnp.int64_t))
        self.s.dcache = <double*> malloc(max(n_points, 1) * sizeof(double))
        self.s.stack_cap = 64
        self.s.stack = <Py_ssize_t*> malloc(self.s.stack_cap * sizeof(Py_ssize_t))
        self.s.pdist_cap = 64
        self.s.pdist = <double*> malloc(self.s.pdist_cap * sizeof(double))
        self.s.res_cap = 64
        self.s.res = <cnp.int64_t*> malloc(self.s.res_cap * sizeof(cnp.int64_t))
        self.s.res_len = 0
        self.s.stamp = 0
        if (self.s.seen == NULL or self.s.dcache == NULL or self.s.stack == NULL
                or self.s.pdist == NULL or self.s.res == NULL):
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(n_points):
            self.s.seen[i] = 0

    def __dealloc__(self):
        free(self.s.seen)
        free(self.s.dcache)
        free(self.s.stack)
        free(self.s.pdist)
        free(self.s.res)

    def run(self, const double[:, ::1] X, const double[:, ::1] Q, double t, bint hilbert, int code, double alpha):
        cdef Py_ssize_t nq = Q.shape[0], dim = X.shape[1], i
        cdef int rc = 0
        counts = np.zeros(nq, dtype=np.int64)
        visits = np.zeros(nq, dtype=np.int64)
        cdef cnp.int64_t[::1] c = counts
        cdef cnp.int64_t[::1] v = visits
        out = []
        for i in range(nq):
            with nogil:
                rc = _query(&self.T, &self.s, &X[0, 0], dim, &Q[i, 0], t, hilbert, code, alpha, &c[i], &v[i])
            if rc != 0:
                raise MemoryError()
            ids = np.empty(self.s.res_len, dtype=np.int64)
            if self.s.res_len:
                ids[:] = <cnp.int64_t[:self.s.res_len]> self.s.res
                ids.sort()
            out.append(ids)
        return out, counts, visits


def range_query_batch(tree, const double[:, ::1] X, const double[:, ::1] Q, double t, bint hilbert, int code, double alpha):
    if Q.shape[1] != X.shape[1]:
        raise ValueError("dimension mismatch")
    run = _Run(tree, X.shape[0])
    return run.run(X, Q, t, hilbert, code, alpha)


def range_query(tree, const double[:, ::1] X, const double[::1] q, double t, bint hilbert, int code, double alpha):
    Q = np.ascontiguousarray(np.asarray(q).reshape(1, -1))
    ids, counts, visits = range_query_batch(tree, X, Q, t, hilbert, code, alpha)
    return ids[0], int(counts[0]), int(visits[0])
