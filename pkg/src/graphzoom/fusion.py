"""Attribute graph construction and fusion with the topology graph.

The kNN search is restricted to clusters obtained by coarsening the topology
graph until clusters hold about ``target_cluster_size`` nodes, which keeps the
search near-linear in the graph size. Neighbors are chosen by Euclidean
distance and weighted by (non-negative) cosine similarity.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .coarsening import CoarsenConfig, coarsen_once, level_seed
from .errors import ValidationError
from .graph import Graph, build_graph_arrays

log = logging.getLogger(__name__)

__all__ = [
    "FusionConfig",
    "cluster_for_knn",
    "cosine_weight",
    "fuse",
    "graph_fusion",
    "knn_attribute_graph",
]

_KNN_SALT = 1


@dataclass(frozen=True)
class FusionConfig:
    beta: float = 1.0
    knn_k: int = 5
    target_cluster_size: int = 50

    def __post_init__(self):
        if self.beta < 0:
            raise ValidationError(f"beta must be non-negative, got {self.beta}")
        if self.knn_k < 1:
            raise ValidationError(f"knn_k must be >= 1, got {self.knn_k}")
        if self.target_cluster_size < 2:
            raise ValidationError("target_cluster_size must be >= 2")


def cluster_for_knn(g, target_cluster_size=50, cfg=None, seed=0):
    """Partition nodes by repeated coarsening until clusters average ``target_cluster_size``.

    Returns an int array mapping each node to its cluster id. Coarsening stops
    early once a level makes no merges, so clusters never span components.
    """
    n = g.num_nodes
    partition = np.arange(n, dtype=np.int64)
    cur, level = g, 0
    cfg = cfg or CoarsenConfig()
    while cur.num_nodes and n / cur.num_nodes < target_cluster_size:
        coarse, H = coarsen_once(cur, cfg, level_seed(seed, level, _KNN_SALT))
        if coarse.num_nodes >= cur.num_nodes:
            break
        partition = H.assignment[partition]
        cur, level = coarse, level + 1
    return partition


def cosine_weight(xi, xj):
    """Cosine similarity; 0 when either vector has zero norm."""
    xi = np.asarray(xi, dtype=np.float64)
    xj = np.asarray(xj, dtype=np.float64)
    ni, nj = np.linalg.norm(xi), np.linalg.norm(xj)
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return float(np.clip(xi @ xj / (ni * nj), -1.0, 1.0))


def _cluster_knn(X, members, k):
    sub = X[members]
    dist = cdist(sub, sub, "sqeuclidean")
    np.fill_diagonal(dist, np.inf)
    kk = min(k, len(members) - 1)
    # stable sort: equal distances keep the lower node index first
    nbrs = np.argsort(dist, axis=1, kind="stable")[:, :kk]
    src = np.repeat(members, kk)
    dst = members[nbrs.ravel()]
    return src, dst


def knn_attribute_graph(X, partition, k=5, workers=1):
    """kNN graph over feature rows, searched only inside each cluster.

    Edges are kept when either endpoint selected the other; weights are
    ``max(cosine, 0)`` and zero-weight edges are dropped.
    """
    X = np.asarray(X, dtype=np.float64)
    partition = np.asarray(partition)
    n = X.shape[0]
    if partition.shape[0] != n:
        raise ValidationError("partition must cover every node")
    order = np.argsort(partition, kind="stable")
    bounds = np.flatnonzero(np.diff(partition[order])) + 1
    groups = [g for g in np.split(order, bounds) if g.size > 1]
    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda m: _cluster_knn(X, m, k), groups))
    else:
        parts = [_cluster_knn(X, m, k) for m in groups]
    if not parts:
        return Graph.empty(n)
    src = np.concatenate([p[0] for p in parts])
    dst = np.concatenate([p[1] for p in parts])
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    codes = np.unique(lo * n + hi)
    lo, hi = np.divmod(codes, n)
    norms = np.linalg.norm(X, axis=1)
    denom = norms[lo] * norms[hi]
    dots = np.einsum("ij,ij->i", X[lo], X[hi])
    w = np.zeros(lo.size)
    ok = denom > 0
    w[ok] = np.clip(dots[ok] / denom[ok], -1.0, 1.0)
    keep = w > 0
    return build_graph_arrays(lo[keep], hi[keep], w[keep], n)


def fuse(a_topo, a_feat, beta=1.0):
    """Weighted sum ``A_topo + beta * A_feat``."""
    if a_topo.num_nodes != a_feat.num_nodes:
        raise ValidationError(
            f"node counts differ: topology {a_topo.num_nodes}, attributes {a_feat.num_nodes}"
        )
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}")
    if beta == 0:
        return a_topo
    return Graph(a_topo.adjacency + beta * a_feat.adjacency, check=False)


def graph_fusion(g, X, cfg=None, coarsen_cfg=None, seed=0, workers=1):
    """Fused graph for topology ``g`` and features ``X``.

    Returns ``g`` itself when there are no features.
    """
    cfg = cfg or FusionConfig()
    if X is None or np.asarray(X).size == 0:
        log.info("no node features; fusion skipped")
        return g
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != g.num_nodes:
        raise ValidationError(f"features have {X.shape[0]} rows, graph has {g.num_nodes} nodes")
    partition = cluster_for_knn(g, cfg.target_cluster_size, coarsen_cfg, seed)
    feat = knn_attribute_graph(X, partition, cfg.knn_k, workers)
    return fuse(g, feat, cfg.beta)
