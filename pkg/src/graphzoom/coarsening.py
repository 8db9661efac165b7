"""Spectral coarsening: smoothed test vectors, affinity aggregation, hierarchies.

Nodes are embedded with a handful of random vectors smoothed by Gauss-Seidel
sweeps on ``L x = 0``; neighbors whose rows are nearly collinear are merged
into super-nodes. A level's mapping operator ``H`` (coarse x fine, 0/1)
gives both the coarse Laplacian ``H L H^T`` and the coarse adjacency.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _backend
from .errors import ValidationError
from .graph import Graph

__all__ = [
    "CoarsenConfig",
    "Hierarchy",
    "MappingOperator",
    "build_hierarchy",
    "coarse_laplacian",
    "coarsen_once",
    "level_seed",
    "node_affinity",
    "propagate_features",
    "smooth_test_vectors",
]


@dataclass(frozen=True)
class CoarsenConfig:
    """Parameters of one aggregation pass and of the hierarchy depth."""

    gamma_max: float = 1.8
    delta0: float = 0.9
    delta_decay: float = 0.7
    gs_sweeps: int = 10
    num_test_vectors: int = 8
    degree_outlier_factor: float = 8.0
    levels: int = 2

    def __post_init__(self):
        if not self.gamma_max > 1:
            raise ValidationError(f"gamma_max must exceed 1, got {self.gamma_max}")
        if not 0 < self.delta_decay < 1:
            raise ValidationError(f"delta_decay must lie in (0, 1), got {self.delta_decay}")
        if self.gs_sweeps < 1:
            raise ValidationError("gs_sweeps must be >= 1")
        if self.num_test_vectors < 1:
            raise ValidationError("num_test_vectors must be >= 1")
        if self.levels < 0:
            raise ValidationError("levels must be >= 0")


class MappingOperator:
    """Surjective node-to-super-node map between two consecutive levels.

    Parameters
    ----------
    assignment : array_like of int
        ``assignment[v]`` is the coarse node that fine node ``v`` maps to.
    num_coarse : int, optional
        Number of coarse nodes; defaults to ``max(assignment) + 1``.
    """

    __slots__ = ("assignment", "num_coarse", "_matrix")

    def __init__(self, assignment, num_coarse=None):
        z = np.array(assignment, dtype=np.int64)
        if num_coarse is None:
            num_coarse = int(z.max(initial=-1)) + 1
        if z.size and (z.min() < 0 or z.max() >= num_coarse):
            raise ValidationError("assignment entries must lie in [0, num_coarse)")
        z.flags.writeable = False
        self.assignment = z
        self.num_coarse = int(num_coarse)
        self._matrix = None

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n), n)

    @property
    def num_fine(self):
        return self.assignment.size

    @property
    def shape(self):
        return (self.num_coarse, self.num_fine)

    @property
    def matrix(self):
        """``H`` as a CSR matrix of shape ``(num_coarse, num_fine)``."""
        if self._matrix is None:
            n = self.num_fine
            self._matrix = sp.csr_matrix(
                (np.ones(n), (self.assignment, np.arange(n))), shape=self.shape
            )
        return self._matrix

    def cluster_sizes(self):
        return np.bincount(self.assignment, minlength=self.num_coarse)

    def then(self, other):
        """Composition: apply ``self`` and then ``other`` (fine -> coarser)."""
        if other.num_fine != self.num_coarse:
            raise ValidationError("operators do not chain")
        return MappingOperator(other.assignment[self.assignment], other.num_coarse)

    def __repr__(self):
        return f"MappingOperator({self.num_coarse}x{self.num_fine})"


@dataclass
class Hierarchy:
    """Graphs ``G_0 .. G_l`` and the operators ``H_0^1 .. H_{l-1}^l`` between them."""

    graphs: list
    operators: list = field(default_factory=list)
    features: list = None

    @property
    def depth(self):
        return len(self.operators)

    @property
    def node_counts(self):
        return [g.num_nodes for g in self.graphs]

    @property
    def coarsest(self):
        return self.graphs[-1]


def level_seed(seed, level, salt=0):
    """Independent integer seed for coarsening level ``level``.

    ``salt`` separates unrelated uses of the same base seed.
    """
    ss = np.random.SeedSequence([int(seed), int(salt), int(level)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _weights_of(L):
    """CSR pieces of the off-diagonal weights of a Graph or Laplacian."""
    if isinstance(L, Graph):
        a = L.adjacency
        return a.indptr, a.indices, a.data
    L = sp.csr_matrix(L, dtype=np.float64)
    L.sort_indices()
    # kernels skip the diagonal, so negating L gives the adjacency weights
    return (
        L.indptr.astype(np.int64),
        L.indices.astype(np.int64),
        np.ascontiguousarray(-L.data),
    )


def smooth_test_vectors(L, t, sweeps, seed):
    """Random zero-mean vectors smoothed by Gauss-Seidel sweeps on ``L x = 0``.

    Parameters
    ----------
    L : Graph or sparse matrix
        The graph, or its Laplacian.
    t : int
        Number of vectors.
    sweeps : int
        Forward sweeps (node 0 to N-1) applied to every vector.
    seed : int or numpy.random.SeedSequence

    Returns
    -------
    ndarray of shape (N, t)
    """
    indptr, indices, data = _weights_of(L)
    n = len(indptr) - 1
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n, t))
    x -= x.mean(axis=0)
    x = np.ascontiguousarray(x)
    if sweeps > 0 and n:
        _backend.core.gauss_seidel(indptr, indices, data, x, int(sweeps))
    return x


def node_affinity(T, p, q):
    """Normalized squared inner product of rows ``p`` and ``q`` of ``T``; 0 for zero rows."""
    tp, tq = np.asarray(T[p], dtype=np.float64), np.asarray(T[q], dtype=np.float64)
    np_, nq = tp @ tp, tq @ tq
    if np_ == 0.0 or nq == 0.0:
        return 0.0
    d = tp @ tq
    return float(d * d / (np_ * nq))


def _outlier_mask(g, factor):
    """Seed mask: isolated nodes and nodes whose degree is >= factor x neighbor median."""
    a = g.adjacency
    n = g.num_nodes
    rows = np.repeat(np.arange(n), np.diff(a.indptr))
    off = rows != a.indices
    rows, cols = rows[off], a.indices[off]
    counts = np.bincount(rows, minlength=n)
    mask = counts == 0
    if rows.size == 0:
        return mask
    vals = counts[cols]
    order = np.lexsort((vals, rows))
    vals = vals[order]
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    has = counts > 0
    lo = starts[has] + (counts[has] - 1) // 2
    hi = starts[has] + counts[has] // 2
    med = np.zeros(n)
    med[has] = 0.5 * (vals[lo] + vals[hi])
    mask |= has & (counts >= factor * med)
    return mask


def coarse_graph(g, H):
    """Adjacency ``H A H^T`` with the collapsed intra-cluster weight dropped."""
    m = H.matrix
    ac = (m @ g.adjacency @ m.T).tocsr()
    ac.setdiag(0)
    ac.eliminate_zeros()
    # symmetrize away rounding differences between (i, j) and (j, i)
    ac = (ac + ac.T) * 0.5
    return Graph(ac, check=False)


def coarsen_once(g, cfg=None, seed=0):
    """One level of affinity-based aggregation.

    Parameters
    ----------
    g : Graph
    cfg : CoarsenConfig, optional
    seed : int
        Seed for the random test vectors.

    Returns
    -------
    coarse : Graph
    H : MappingOperator
    """
    cfg = cfg or CoarsenConfig()
    n = g.num_nodes
    if n <= 1:
        return g, MappingOperator.identity(n)
    T = smooth_test_vectors(g, cfg.num_test_vectors, cfg.gs_sweeps, seed)
    seeds = _outlier_mask(g, cfg.degree_outlier_factor).astype(np.uint8)
    a = g.adjacency
    parent, _ = _backend.core.spectral_aggregate(
        a.indptr, a.indices, T, seeds, float(cfg.gamma_max), float(cfg.delta0), float(cfg.delta_decay)
    )
    parent = np.asarray(parent)
    roots = np.flatnonzero(parent == np.arange(n))
    H = MappingOperator(np.searchsorted(roots, parent), roots.size)
    return coarse_graph(g, H), H


def coarse_laplacian(L, H):
    """``H L H^T`` for a Laplacian ``L`` and mapping operator ``H``."""
    m = H.matrix if isinstance(H, MappingOperator) else sp.csr_matrix(H)
    if m.shape[1] != L.shape[0] or L.shape[0] != L.shape[1]:
        raise ValidationError(f"shape mismatch: H {m.shape} vs L {L.shape}")
    out = (m @ sp.csr_matrix(L) @ m.T).tocsr()
    out.sort_indices()
    return out


def propagate_features(X, H):
    """Average fine-level feature rows into their super-nodes."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != H.num_fine:
        raise ValidationError(f"feature rows {X.shape[0]} != fine nodes {H.num_fine}")
    sizes = H.cluster_sizes().astype(np.float64)
    sizes[sizes == 0] = 1.0
    return (H.matrix @ X) / sizes[:, None]


def build_hierarchy(g, cfg=None, seed=0, features=None):
    """Coarsen ``g`` up to ``cfg.levels`` times.

    Stops early when a level makes no merges; ``Hierarchy.depth`` reports the
    depth actually reached. When ``features`` is given, the level feature
    matrices are propagated alongside.
    """
    cfg = cfg or CoarsenConfig()
    graphs, ops = [g], []
    feats = None if features is None else [np.asarray(features, dtype=np.float64)]
    for level in range(cfg.levels):
        cur = graphs[-1]
        coarse, H = coarsen_once(cur, cfg, level_seed(seed, level))
        if coarse.num_nodes >= cur.num_nodes:
            break
        graphs.append(coarse)
        ops.append(H)
        if feats is not None:
            feats.append(propagate_features(feats[-1], H))
    return Hierarchy(graphs, ops, feats)
