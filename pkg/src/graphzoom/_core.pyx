# cython: language_level=3
"""Compiled inner loops.

Every function here has a pure-Python twin in ``_pycore`` with the same
signature and the same floating-point operation order; ``_backend`` picks
one at import.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log1p
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

ctypedef int64_t idx_t


cdef inline uint64_t _splitmix_next(uint64_t* state) noexcept nogil:
    state[0] += <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t* state) noexcept nogil:
    return (_splitmix_next(state) >> 11) * (1.0 / 9007199254740992.0)


def gauss_seidel(const idx_t[::1] indptr, const idx_t[::1] indices,
                 const double[::1] data, double[:, ::1] x, int sweeps):
    """In-place forward Gauss-Seidel sweeps on ``L x = 0`` for every column."""
    cdef Py_ssize_t n = x.shape[0], t = x.shape[1]
    cdef Py_ssize_t p, e, k, q
    cdef int s
    cdef double w, deg
    cdef double[::1] acc = np.empty(t, dtype=np.float64)
    with nogil:
        for s in range(sweeps):
            for p in range(n):
                deg = 0.0
                for k in range(t):
                    acc[k] = 0.0
                for e in range(indptr[p], indptr[p + 1]):
                    q = indices[e]
                    if q == p:
                        continue
                    w = data[e]
                    deg = deg + w
                    for k in range(t):
                        acc[k] = acc[k] + w * x[q, k]
                if deg > 0.0:
                    for k in range(t):
                        x[p, k] = acc[k] / deg


def edge_affinity(const idx_t[::1] indptr, const idx_t[::1] indices,
                  const double[:, ::1] T):
    """Squared normalized inner product of test-vector rows for every stored entry."""
    cdef Py_ssize_t n = T.shape[0], t = T.shape[1]
    cdef Py_ssize_t p, e, k, q
    cdef double d, np_, nq
    out_arr = np.zeros(indices.shape[0], dtype=np.float64)
    norms_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] norms = norms_arr
    with nogil:
        for p in range(n):
            d = 0.0
            for k in range(t):
                d = d + T[p, k] * T[p, k]
            norms[p] = d
        for p in range(n):
            np_ = norms[p]
            for e in range(indptr[p], indptr[p + 1]):
                q = indices[e]
                nq = norms[q]
                if q == p or np_ == 0.0 or nq == 0.0:
                    out[e] = 0.0
                    continue
                d = 0.0
                for k in range(t):
                    d = d + T[p, k] * T[q, k]
                out[e] = d * d / (np_ * nq)
    return out_arr


cdef void _best_two(const idx_t[::1] indptr, const idx_t[::1] indices,
                    const double[::1] aff, idx_t[::1] best, double[::1] m1,
                    double[::1] m2) noexcept nogil:
    cdef Py_ssize_t n = best.shape[0]
    cdef Py_ssize_t p, e, q
    cdef double a, top, second
    cdef idx_t arg
    for p in range(n):
        arg = -1
        top = 0.0
        second = 0.0
        for e in range(indptr[p], indptr[p + 1]):
            q = indices[e]
            if q == p:
                continue
            a = aff[e]
            if arg < 0:
                arg = q
                top = a
            elif a > top:
                second = top
                top = a
                arg = q
            elif a > second:
                second = a
        best[p] = arg
        m1[p] = top
        m2[p] = second


def spectral_aggregate(const idx_t[::1] indptr, const idx_t[::1] indices,
                       double[:, ::1] T, const unsigned char[::1] seed_mask,
                       double gamma_max, double delta, double delta_decay):
    """Affinity-driven node aggregation.

    Returns ``(parent, passes)`` where ``parent[p]`` is the root node of p's
    aggregate (``parent[p] == p`` for roots). ``T`` is updated in place:
    merged rows take their root's values.
    """
    cdef Py_ssize_t n = T.shape[0], t = T.shape[1]
    cdef Py_ssize_t p, k, q, root
    cdef idx_t[::1] z
    cdef idx_t[::1] best = np.empty(n, dtype=np.int64)
    cdef double[::1] m1 = np.empty(n, dtype=np.float64)
    cdef double[::1] m2 = np.empty(n, dtype=np.float64)
    cdef unsigned char[::1] cand = np.zeros(n, dtype=np.uint8)
    cdef double[::1] aff
    cdef double gamma = 1.0, other
    cdef Py_ssize_t n_c = n, merges
    cdef int passes = 0
    # z: -1 unassigned, -2 root, >= 0 index of the root it joined
    z_arr = np.where(np.asarray(seed_mask) != 0, -2, -1).astype(np.int64)
    z = z_arr
    if n == 0:
        return z_arr, 0
    while gamma < gamma_max:
        aff = edge_affinity(indptr, indices, T)
        passes += 1
        with nogil:
            _best_two(indptr, indices, aff, best, m1, m2)
            for p in range(n):
                cand[p] = 0
                if z[p] != -1 or best[p] < 0 or m1[p] <= 0.0:
                    continue
                q = best[p]
                other = m2[q] if best[q] == p else m1[q]
                if m2[p] > other:
                    other = m2[p]
                if m1[p] >= delta * other:
                    cand[p] = 1
            merges = 0
            for p in range(n):
                if cand[p] == 0 or z[p] != -1:
                    continue
                q = best[p]
                if z[q] == -1:
                    z[q] = -2
                    root = q
                elif z[q] == -2:
                    root = q
                else:
                    root = z[q]
                z[p] = root
                for k in range(t):
                    T[p, k] = T[root, k]
                n_c -= 1
                merges += 1
        if merges == 0:
            break
        gamma = n / <double>n_c
        delta = delta * delta_decay
    for p in range(n):
        if z[p] < 0:
            z[p] = p
    return z_arr, passes


def random_walks(const idx_t[::1] indptr, const idx_t[::1] indices,
                 const double[::1] cumw, const idx_t[::1] starts,
                 int walk_length, uint64_t seed):
    """Weighted random walks, one per entry of ``starts``.

    ``cumw`` holds per-row cumulative edge weights aligned with ``indices``.
    Walks stuck at an isolated node are padded with -1.
    """
    cdef Py_ssize_t nw = starts.shape[0]
    cdef Py_ssize_t i, j, lo, hi, mid
    cdef idx_t cur
    cdef double r
    cdef uint64_t state = seed
    out_arr = np.full((nw, walk_length), -1, dtype=np.int64)
    cdef idx_t[:, ::1] out = out_arr
    if walk_length <= 0:
        return out_arr
    with nogil:
        for i in range(nw):
            cur = starts[i]
            out[i, 0] = cur
            for j in range(1, walk_length):
                lo = indptr[cur]
                hi = indptr[cur + 1]
                if hi == lo:
                    break
                r = _uniform(&state) * cumw[hi - 1]
                # first position with cumw > r
                while lo < hi:
                    mid = (lo + hi) // 2
                    if cumw[mid] > r:
                        hi = mid
                    else:
                        lo = mid + 1
                if lo >= indptr[cur + 1]:
                    lo = indptr[cur + 1] - 1
                cur = indices[lo]
                out[i, j] = cur
    return out_arr


cdef inline double _sigmoid(double f) noexcept nogil:
    if f >= 0:
        return 1.0 / (1.0 + exp(-f))
    return exp(f) / (1.0 + exp(f))


cdef inline double _softplus_neg(double f) noexcept nogil:
    # -log(sigmoid(f))
    if f >= 0:
        return log1p(exp(-f))
    return -f + log1p(exp(f))


def sgns_train(const idx_t[:, ::1] walks, double[:, ::1] syn0, double[:, ::1] syn1,
               const idx_t[::1] neg_table, int window, int negative,
               double lr0, int epochs, uint64_t seed):
    """Skip-gram with negative sampling over walk "sentences".

    Updates ``syn0`` (input vectors) and ``syn1`` (output vectors) in place
    and returns the mean pair loss of every sentence, in training order.
    """
    cdef Py_ssize_t nw = walks.shape[0], L = walks.shape[1], dim = syn0.shape[1]
    cdef Py_ssize_t table = neg_table.shape[0]
    cdef Py_ssize_t ep, i, pos, c, lo, hi, k, d, length
    cdef idx_t center, target, label
    cdef double f, g, alpha, loss, total_words, done = 0.0
    cdef int b, pairs
    cdef uint64_t state = seed
    cdef double[::1] neu1e = np.zeros(dim, dtype=np.float64)
    losses_arr = np.zeros(nw * epochs, dtype=np.float64)
    cdef double[::1] losses = losses_arr
    total_words = 0.0
    for i in range(nw):
        for pos in range(L):
            if walks[i, pos] < 0:
                break
            total_words += 1
    total_words = total_words * epochs + 1.0
    with nogil:
        for ep in range(epochs):
            for i in range(nw):
                length = 0
                while length < L and walks[i, length] >= 0:
                    length += 1
                loss = 0.0
                pairs = 0
                for pos in range(length):
                    alpha = lr0 * (1.0 - done / total_words)
                    if alpha < lr0 * 0.0001:
                        alpha = lr0 * 0.0001
                    done += 1.0
                    center = walks[i, pos]
                    b = <int>(_splitmix_next(&state) % <uint64_t>window)
                    lo = pos - (window - b)
                    if lo < 0:
                        lo = 0
                    hi = pos + (window - b)
                    if hi > length - 1:
                        hi = length - 1
                    for c in range(lo, hi + 1):
                        if c == pos:
                            continue
                        for d in range(dim):
                            neu1e[d] = 0.0
                        for k in range(negative + 1):
                            if k == 0:
                                target = walks[i, c]
                                label = 1
                            else:
                                target = neg_table[<Py_ssize_t>(_splitmix_next(&state) % <uint64_t>table)]
                                if target == walks[i, c]:
                                    continue
                                label = 0
                            f = 0.0
                            for d in range(dim):
                                f = f + syn0[center, d] * syn1[target, d]
                            if label == 1:
                                loss = loss + _softplus_neg(f)
                            else:
                                loss = loss + _softplus_neg(-f)
                            g = (label - _sigmoid(f)) * alpha
                            for d in range(dim):
                                neu1e[d] = neu1e[d] + g * syn1[target, d]
                            for d in range(dim):
                                syn1[target, d] = syn1[target, d] + g * syn0[center, d]
                        for d in range(dim):
                            syn0[center, d] = syn0[center, d] + neu1e[d]
                        pairs += 1
                if pairs > 0:
                    losses[ep * nw + i] = loss / pairs
    return losses_arr
