"""Pure-Python versions of the compiled inner loops in ``_core.pyx``.

Signatures and floating-point operation order match the compiled module, so
Gauss-Seidel, affinities, aggregation and walks agree bit for bit. Skip-gram
training uses numpy dot products and agrees to rounding.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1


class _SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next() >> 11) * (1.0 / 9007199254740992.0)


def gauss_seidel(indptr, indices, data, x, sweeps):
    n, t = x.shape
    for _ in range(sweeps):
        for p in range(n):
            lo, hi = indptr[p], indptr[p + 1]
            deg = 0.0
            acc = np.zeros(t)
            for e in range(lo, hi):
                q = indices[e]
                if q == p:
                    continue
                w = data[e]
                deg = deg + w
                acc = acc + w * x[q]
            if deg > 0.0:
                x[p] = acc / deg


def _row_dots(A, B):
    # sequential accumulation over columns, same order as the C loop
    acc = np.zeros(A.shape[0])
    for k in range(A.shape[1]):
        acc = acc + A[:, k] * B[:, k]
    return acc


def edge_affinity(indptr, indices, T):
    n = T.shape[0]
    norms = _row_dots(T, T)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    cols = np.asarray(indices)
    d = _row_dots(T[rows], T[cols])
    npq = norms[rows] * norms[cols]
    out = np.zeros(len(cols))
    ok = (rows != cols) & (norms[rows] != 0.0) & (norms[cols] != 0.0)
    out[ok] = d[ok] * d[ok] / npq[ok]
    return out


def _best_two(indptr, indices, aff, n):
    best = np.full(n, -1, dtype=np.int64)
    m1 = np.zeros(n)
    m2 = np.zeros(n)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    cols = np.asarray(indices)
    keep = rows != cols
    rows, cols, a = rows[keep], cols[keep], aff[keep]
    if rows.size == 0:
        return best, m1, m2
    # per row: highest affinity first, lowest column on ties
    order = np.lexsort((cols, -a, rows))
    rows, cols, a = rows[order], cols[order], a[order]
    first = np.ones(rows.size, dtype=bool)
    first[1:] = rows[1:] != rows[:-1]
    best[rows[first]] = cols[first]
    m1[rows[first]] = a[first]
    second = np.zeros(rows.size, dtype=bool)
    second[1:] = first[:-1] & ~first[1:]
    m2[rows[second]] = a[second]
    return best, m1, m2


def spectral_aggregate(indptr, indices, T, seed_mask, gamma_max, delta, delta_decay):
    n = T.shape[0]
    z = np.where(np.asarray(seed_mask) != 0, -2, -1).astype(np.int64)
    passes = 0
    if n == 0:
        return z, 0
    gamma = 1.0
    n_c = n
    while gamma < gamma_max:
        aff = edge_affinity(indptr, indices, T)
        passes += 1
        best, m1, m2 = _best_two(indptr, indices, aff, n)
        q = np.maximum(best, 0)
        other = np.where(best[q] == np.arange(n), m2[q], m1[q])
        other = np.maximum(other, m2)
        cand = (z == -1) & (best >= 0) & (m1 > 0.0) & (m1 >= delta * other)
        merges = 0
        for p in np.flatnonzero(cand):
            if z[p] != -1:
                continue
            qq = best[p]
            if z[qq] == -1:
                z[qq] = -2
                root = qq
            elif z[qq] == -2:
                root = qq
            else:
                root = z[qq]
            z[p] = root
            T[p, :] = T[root, :]
            n_c -= 1
            merges += 1
        if merges == 0:
            break
        gamma = n / n_c
        delta = delta * delta_decay
    roots = z < 0
    z[roots] = np.flatnonzero(roots)
    return z, passes


def random_walks(indptr, indices, cumw, starts, walk_length, seed):
    rng = _SplitMix64(seed)
    out = np.full((len(starts), max(walk_length, 0)), -1, dtype=np.int64)
    if walk_length <= 0:
        return out
    for i, cur in enumerate(starts):
        out[i, 0] = cur
        for j in range(1, walk_length):
            lo, hi = indptr[cur], indptr[cur + 1]
            if hi == lo:
                break
            r = rng.uniform() * cumw[hi - 1]
            pos = lo + int(np.searchsorted(cumw[lo:hi], r, side="right"))
            pos = min(pos, hi - 1)
            cur = indices[pos]
            out[i, j] = cur
    return out


def _sigmoid(f):
    if f >= 0:
        return 1.0 / (1.0 + math.exp(-f))
    return math.exp(f) / (1.0 + math.exp(f))


def _softplus_neg(f):
    if f >= 0:
        return math.log1p(math.exp(-f))
    return -f + math.log1p(math.exp(f))


def sgns_train(walks, syn0, syn1, neg_table, window, negative, lr0, epochs, seed):
    rng = _SplitMix64(seed)
    nw, L = walks.shape
    table = len(neg_table)
    lengths = np.where((walks < 0).any(axis=1), (walks < 0).argmax(axis=1), L)
    total_words = float(lengths.sum()) * epochs + 1.0
    done = 0.0
    losses = np.zeros(nw * epochs)
    for ep in range(epochs):
        for i in range(nw):
            length = int(lengths[i])
            walk = walks[i]
            loss = 0.0
            pairs = 0
            for pos in range(length):
                alpha = lr0 * (1.0 - done / total_words)
                if alpha < lr0 * 0.0001:
                    alpha = lr0 * 0.0001
                done += 1.0
                center = walk[pos]
                b = rng.next() % window
                lo = max(pos - (window - b), 0)
                hi = min(pos + (window - b), length - 1)
                v_in = syn0[center]
                for c in range(lo, hi + 1):
                    if c == pos:
                        continue
                    neu1e = np.zeros(syn0.shape[1])
                    ctx = walk[c]
                    for k in range(negative + 1):
                        if k == 0:
                            target, label = ctx, 1
                        else:
                            target = neg_table[rng.next() % table]
                            if target == ctx:
                                continue
                            label = 0
                        v_out = syn1[target]
                        f = float(v_in @ v_out)
                        loss += _softplus_neg(f) if label == 1 else _softplus_neg(-f)
                        g = (label - _sigmoid(f)) * alpha
                        neu1e += g * v_out
                        v_out += g * v_in
                    v_in += neu1e
                    pairs += 1
            if pairs > 0:
                losses[ep * nw + i] = loss / pairs
    return losses
