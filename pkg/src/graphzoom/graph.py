"""Sparse undirected weighted graphs and the Laplacian-type operators on them.

Adjacency is held as a SciPy CSR matrix with sorted column indices, 64-bit
weights and no explicit zeros. Instances are treated as immutable: the
underlying arrays are marked read-only after construction.
"""

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateNodeError, ValidationError

__all__ = [
    "Graph",
    "build_graph",
    "laplacian",
    "normalized_filter_matrix",
    "normalized_laplacian",
]


def _freeze(mat):
    for arr in (mat.data, mat.indices, mat.indptr):
        arr.flags.writeable = False
    return mat


def _canonical_csr(mat):
    mat = sp.csr_matrix(mat, dtype=np.float64)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    # scipy may pick int32 or int64; fix int64 so compiled kernels see one layout
    mat.indices = mat.indices.astype(np.int64, copy=False)
    mat.indptr = mat.indptr.astype(np.int64, copy=False)
    return mat


class Graph:
    """Undirected graph with non-negative edge weights.

    Parameters
    ----------
    adjacency : array_like or sparse matrix
        Square symmetric matrix of non-negative weights. Zero entries are
        dropped from storage.
    check : bool, default True
        Verify symmetry and non-negativity. Internal callers that build the
        adjacency symmetrically by construction pass ``False``.

    Raises
    ------
    ValidationError
        If the matrix is not square, not symmetric, or has negative or
        non-finite weights.
    """

    __slots__ = ("_adj",)

    def __init__(self, adjacency, check=True):
        adj = _canonical_csr(adjacency)
        if adj.shape[0] != adj.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {adj.shape}")
        if check:
            if not np.all(np.isfinite(adj.data)):
                raise ValidationError("adjacency contains non-finite weights")
            if np.any(adj.data < 0):
                raise ValidationError("adjacency contains negative weights")
            diff = adj - adj.T
            if diff.nnz and np.max(np.abs(diff.data)) > 0:
                raise ValidationError("adjacency is not symmetric")
        self._adj = _freeze(adj)

    @classmethod
    def empty(cls, num_nodes):
        """Edgeless graph on ``num_nodes`` nodes."""
        return cls(sp.csr_matrix((num_nodes, num_nodes)), check=False)

    @property
    def adjacency(self):
        """Read-only CSR adjacency matrix."""
        return self._adj

    @property
    def num_nodes(self):
        return self._adj.shape[0]

    @property
    def num_edges(self):
        """Number of undirected edges, self-loops counted once."""
        loops = int(np.count_nonzero(self._adj.diagonal()))
        return (self._adj.nnz - loops) // 2 + loops

    @property
    def degrees(self):
        """Weighted degree (row sum) of every node."""
        return np.asarray(self._adj.sum(axis=1)).ravel()

    @property
    def has_self_loops(self):
        return bool(np.any(self._adj.diagonal() != 0))

    def neighbors(self, u):
        a = self._adj
        return np.asarray(a.indices[a.indptr[u]:a.indptr[u + 1]])

    def weight(self, u, v):
        a = self._adj
        lo, hi = a.indptr[u], a.indptr[u + 1]
        pos = lo + np.searchsorted(a.indices[lo:hi], v)
        if pos < hi and a.indices[pos] == v:
            return float(a.data[pos])
        return 0.0

    def edges(self):
        """Upper-triangular edge list as ``(u, v, w)`` arrays with ``u <= v``."""
        upper = sp.triu(self._adj, format="coo")
        order = np.lexsort((upper.col, upper.row))
        return upper.row[order], upper.col[order], upper.data[order]

    def subgraph_components(self):
        """Connected-component label of every node."""
        from scipy.sparse.csgraph import connected_components

        return connected_components(self._adj, directed=False)[1]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        a, b = self._adj, other._adj
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def build_graph(edges, num_nodes=None, allow_self_loops=False):
    """Build a graph from ``(u, v, w)`` triples.

    Each triple contributes its weight once to the undirected edge {u, v};
    ``(0, 1, 1)`` and ``(1, 0, 1)`` together give one edge of weight 2.

    Parameters
    ----------
    edges : iterable of tuple
        ``(u, v, w)`` with integer node ids and positive weight ``w``;
        ``(u, v)`` pairs get weight 1.
    num_nodes : int, optional
        Node count N. Defaults to one more than the largest id.
    allow_self_loops : bool, default False
        Accept ``u == v`` triples; otherwise they raise.

    Raises
    ------
    IndexError
        If a node id is negative or not below ``num_nodes``.
    ValidationError
        For a non-positive or non-finite weight, or a disallowed self-loop.
    """
    arr = list(edges)
    if arr:
        u = np.fromiter((e[0] for e in arr), dtype=np.int64, count=len(arr))
        v = np.fromiter((e[1] for e in arr), dtype=np.int64, count=len(arr))
        w = np.fromiter((e[2] if len(e) > 2 else 1.0 for e in arr), dtype=np.float64, count=len(arr))
    else:
        u = v = np.zeros(0, dtype=np.int64)
        w = np.zeros(0)
    return build_graph_arrays(u, v, w, num_nodes, allow_self_loops)


def build_graph_arrays(u, v, w, num_nodes=None, allow_self_loops=False):
    """Array form of :func:`build_graph`."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    if num_nodes is None:
        num_nodes = int(max(u.max(initial=-1), v.max(initial=-1))) + 1
    if u.size:
        bad = (u < 0) | (v < 0) | (u >= num_nodes) | (v >= num_nodes)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise IndexError(f"edge {i} ({u[i]}, {v[i]}) has node id outside [0, {num_nodes})")
        badw = ~np.isfinite(w) | (w <= 0)
        if badw.any():
            i = int(np.flatnonzero(badw)[0])
            raise ValidationError(f"edge {i} ({u[i]}, {v[i]}) has non-positive weight {w[i]}")
        if not allow_self_loops and np.any(u == v):
            i = int(np.flatnonzero(u == v)[0])
            raise ValidationError(f"edge {i} is a self-loop on node {u[i]}")
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    upper = sp.coo_matrix((w, (lo, hi)), shape=(num_nodes, num_nodes)).tocsr()
    upper.sum_duplicates()
    adj = upper + sp.triu(upper, k=1).T
    return Graph(adj, check=False)


def laplacian(g):
    """Combinatorial Laplacian ``L = D - A`` as a CSR matrix.

    Self-loops cancel out of ``L``: they add to both D and A.
    """
    a = g.adjacency
    lap = sp.diags(g.degrees) - a
    return _canonical_csr(lap)


def _self_loop_normalized(g, sigma):
    if sigma < 0:
        raise ValidationError(f"sigma must be non-negative, got {sigma}")
    a = g.adjacency
    if sigma:
        a = a + sigma * sp.identity(g.num_nodes, format="csr")
    deg = np.asarray(a.sum(axis=1)).ravel()
    return a, deg


def normalized_filter_matrix(g, sigma):
    """Self-loop augmented, symmetrically normalized adjacency.

    Returns ``D~^{-1/2} (A + sigma I) D~^{-1/2}`` where ``D~`` is the row-sum
    degree of ``A + sigma I``.

    Raises
    ------
    DegenerateNodeError
        If some node has zero augmented degree (only possible for
        ``sigma == 0`` and an isolated node).
    """
    a, deg = _self_loop_normalized(g, sigma)
    if np.any(deg <= 0):
        node = int(np.flatnonzero(deg <= 0)[0])
        raise DegenerateNodeError(
            f"node {node} has zero degree; use sigma > 0 to normalize graphs with isolated nodes"
        )
    s = sp.diags(1.0 / np.sqrt(deg))
    return _canonical_csr(s @ a @ s)


def normalized_laplacian(g, sigma=0.0):
    """Symmetric normalized Laplacian ``I - D^{-1/2} A D^{-1/2}``.

    Rows and columns of zero-degree nodes are all zero.
    """
    a, deg = _self_loop_normalized(g, sigma)
    inv = np.zeros_like(deg)
    pos = deg > 0
    inv[pos] = 1.0 / np.sqrt(deg[pos])
    s = sp.diags(inv)
    lap = sp.diags(pos.astype(np.float64)) - s @ a @ s
    return _canonical_csr(lap)
