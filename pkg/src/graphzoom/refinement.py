"""Projection of coarse embeddings and low-pass filter refinement.

Refinement at level i applies ``(D~^{-1/2} (A_i + sigma I) D~^{-1/2})^k`` to
the projected embeddings: a degree-k polynomial stand-in for the Tikhonov
smoother ``(I + L_i)^{-1}``, which :func:`tikhonov_exact` solves directly on
small graphs for verification.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import normalized_filter_matrix, normalized_laplacian

__all__ = [
    "FilterConfig",
    "TIKHONOV_MAX_NODES",
    "filter_refine",
    "project",
    "refine_all",
    "tikhonov_exact",
    "tikhonov_objective",
]

TIKHONOV_MAX_NODES = 500


@dataclass(frozen=True)
class FilterConfig:
    sigma: float = 2.0
    power: int = 2

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError(f"sigma must be non-negative, got {self.sigma}")
        if self.power < 0:
            raise ValidationError(f"filter power must be non-negative, got {self.power}")


def project(E_coarse, H):
    """Copy each super-node's row to its member nodes (``H^T E``)."""
    E_coarse = np.asarray(E_coarse, dtype=np.float64)
    if E_coarse.shape[0] != H.num_coarse:
        raise ValidationError(f"embedding has {E_coarse.shape[0]} rows, operator has {H.num_coarse} coarse nodes")
    return E_coarse[H.assignment]


def filter_refine(g, E_hat, cfg=None):
    """Apply the self-loop normalized filter ``cfg.power`` times.

    Uses repeated sparse products; the matrix power is never formed.
    """
    cfg = cfg or FilterConfig()
    E = np.asarray(E_hat, dtype=np.float64)
    if E.shape[0] != g.num_nodes:
        raise ValidationError(f"embedding has {E.shape[0]} rows, graph has {g.num_nodes} nodes")
    if cfg.power == 0:
        return E.copy()
    M = normalized_filter_matrix(g, cfg.sigma)
    for _ in range(cfg.power):
        E = M @ E
    return E


def tikhonov_exact(g, E_hat, max_nodes=TIKHONOV_MAX_NODES):
    """Solve ``(I + L) E = E_hat`` with L the symmetric normalized Laplacian.

    Dense direct solve; refused above ``max_nodes``.
    """
    if g.num_nodes > max_nodes:
        raise ValidationError(f"tikhonov_exact is limited to {max_nodes} nodes, got {g.num_nodes}")
    E_hat = np.asarray(E_hat, dtype=np.float64)
    if E_hat.shape[0] != g.num_nodes:
        raise ValidationError("embedding rows must match the graph")
    system = np.eye(g.num_nodes) + normalized_laplacian(g).toarray()
    return np.linalg.solve(system, E_hat)


def tikhonov_objective(g, E, E_hat):
    """``||E - E_hat||_F^2 + tr(E^T L E)``."""
    L = normalized_laplacian(g)
    diff = E - E_hat
    return float(np.sum(diff * diff) + np.sum(E * (L @ E)))


def refine_all(h, E_coarsest, cfg=None):
    """Project and filter from the coarsest level down to level 0."""
    E = np.asarray(E_coarsest, dtype=np.float64)
    if E.shape[0] != h.coarsest.num_nodes:
        raise ValidationError(
            f"embedding has {E.shape[0]} rows, coarsest graph has {h.coarsest.num_nodes} nodes"
        )
    for level in range(h.depth, 0, -1):
        E = project(E, h.operators[level - 1])
        E = filter_refine(h.graphs[level - 1], E, cfg)
    return E
