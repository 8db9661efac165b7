"""Unsupervised embedding kernels applied to the coarsest graph.

A kernel is any callable ``kernel(graph, features=None) -> ndarray`` that
returns one row per node. Two are built in: DeepWalk (weighted random walks
plus skip-gram with negative sampling) and a cheap spectral kernel made of
orthonormalized smoothed random vectors.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .coarsening import smooth_test_vectors
from .errors import ValidationError

__all__ = [
    "DeepWalkConfig",
    "DeepWalkKernel",
    "SpectralKernel",
    "deepwalk_embed",
    "generate_walks",
    "get_kernel",
    "spectral_embed",
    "unigram_table",
]

NEG_TABLE_SIZE = 1_000_000


@dataclass(frozen=True)
class DeepWalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    window: int = 10
    dim: int = 128
    negative: int = 5
    epochs: int = 1
    learning_rate: float = 0.025
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("walks_per_node", "walk_length", "window", "dim", "negative", "epochs", "workers"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")


def _row_cumulative_weights(adj):
    cs = np.cumsum(adj.data)
    counts = np.diff(adj.indptr)
    before = np.concatenate(([0.0], cs))[adj.indptr[:-1]]
    return cs - np.repeat(before, counts)


def generate_walks(g, walks_per_node, walk_length, seed, workers=1):
    """Weighted random walks from every node, ``walks_per_node`` rounds.

    Each round visits the nodes in a fresh random order. Steps go to a
    neighbor with probability proportional to the edge weight. With
    ``workers > 1`` the walks are sharded across threads, each with its own
    seed, so the output differs from the single-threaded one.
    """
    adj = g.adjacency
    rng = np.random.default_rng(seed)
    starts = np.concatenate(
        [rng.permutation(g.num_nodes) for _ in range(walks_per_node)]
    ).astype(np.int64)
    cumw = _row_cumulative_weights(adj)
    run = _backend.core.random_walks
    if workers <= 1 or starts.size < 2 * workers:
        return run(adj.indptr, adj.indices, cumw, starts, int(walk_length), int(rng.integers(2**63)))
    shards = np.array_split(starts, workers)
    seeds = [int(s) for s in rng.integers(2**63, size=workers)]
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(
            lambda a: run(adj.indptr, adj.indices, cumw, np.ascontiguousarray(a[0]), int(walk_length), a[1]),
            zip(shards, seeds),
        )
        return np.concatenate(list(parts))


def unigram_table(walks, num_nodes, power=0.75, size=NEG_TABLE_SIZE):
    """Negative-sampling table drawn from visit counts raised to ``power``."""
    counts = np.bincount(walks[walks >= 0], minlength=num_nodes).astype(np.float64)
    probs = counts**power
    total = probs.sum()
    if total == 0:
        return np.arange(num_nodes, dtype=np.int64)
    cdf = np.cumsum(probs / total)
    table = np.searchsorted(cdf, (np.arange(size) + 0.5) / size)
    return np.minimum(table, num_nodes - 1).astype(np.int64)


def deepwalk_embed(g, cfg=None, return_loss=False):
    """DeepWalk embeddings (input-side skip-gram vectors).

    Parameters
    ----------
    g : Graph
    cfg : DeepWalkConfig, optional
    return_loss : bool
        Also return the per-walk mean negative-sampling loss in training order.

    Returns
    -------
    E : ndarray of shape (N, cfg.dim)
    losses : ndarray, only when ``return_loss``
    """
    cfg = cfg or DeepWalkConfig()
    n = g.num_nodes
    rng = np.random.default_rng(cfg.seed)
    walk_seed, sgd_seed = (int(s) for s in rng.integers(2**63, size=2))
    syn0 = np.ascontiguousarray((rng.random((n, cfg.dim)) - 0.5) / cfg.dim)
    syn1 = np.zeros((n, cfg.dim))
    losses = np.zeros(0)
    if g.num_edges and n:
        walks = generate_walks(g, cfg.walks_per_node, cfg.walk_length, walk_seed, cfg.workers)
        table = unigram_table(walks, n)
        losses = _backend.core.sgns_train(
            walks, syn0, syn1, table, int(cfg.window), int(cfg.negative),
            float(cfg.learning_rate), int(cfg.epochs), sgd_seed,
        )
    if return_loss:
        return syn0, np.asarray(losses)
    return syn0


def spectral_embed(g, d, seed=0, sweeps=20):
    """Orthonormalized smoothed random vectors as a ``d``-dimensional embedding.

    Raises
    ------
    ValidationError
        If ``d`` exceeds the number of nodes.
    """
    n = g.num_nodes
    if d > n:
        raise ValidationError(f"spectral embedding dimension {d} exceeds node count {n}")
    X = smooth_test_vectors(g, d, sweeps, seed)
    Q, _ = np.linalg.qr(X)
    return np.ascontiguousarray(Q)


class DeepWalkKernel:
    """Kernel wrapper around :func:`deepwalk_embed`; ignores features."""

    name = "deepwalk"

    def __init__(self, cfg=None):
        self.cfg = cfg or DeepWalkConfig()

    def __call__(self, g, features=None):
        return deepwalk_embed(g, self.cfg)


class SpectralKernel:
    """Kernel wrapper around :func:`spectral_embed`; ignores features.

    Graphs with fewer nodes than ``dim`` get ``N`` spectral columns padded with
    zero columns, so the output width is always ``dim``.
    """

    name = "spectral"

    def __init__(self, dim=128, seed=0, sweeps=20):
        self.dim = dim
        self.seed = seed
        self.sweeps = sweeps

    def __call__(self, g, features=None):
        n = g.num_nodes
        d = min(self.dim, n)
        E = np.zeros((n, self.dim))
        if d:
            E[:, :d] = spectral_embed(g, d, self.seed, self.sweeps)
        return E


def get_kernel(name, dim=128, seed=0, **overrides):
    """Instantiate a built-in kernel by name.

    ``overrides`` are config fields (e.g. ``walk_length=40`` for DeepWalk).
    """
    try:
        if name == "deepwalk":
            return DeepWalkKernel(replace(DeepWalkConfig(dim=dim, seed=seed), **overrides))
        if name == "spectral":
            return SpectralKernel(dim=dim, seed=seed, **overrides)
    except TypeError as exc:
        raise ValidationError(f"bad option for kernel {name!r}: {exc}") from None
    raise ValidationError(f"unknown kernel {name!r}; choose 'deepwalk' or 'spectral'")
