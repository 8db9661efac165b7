"""Embedding quality metrics and phase timing.

Node classification trains one-vs-rest logistic regression on frozen
embeddings; link prediction scores Hadamard products of endpoint embeddings
with a logistic model and reports ROC AUC.
"""

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import ValidationError

__all__ = [
    "ClassifierModel",
    "EvalReport",
    "PhaseTimer",
    "auc_score",
    "evaluate_classification",
    "hadamard_features",
    "holdout_edges",
    "link_prediction_auc",
    "sample_negative_edges",
    "stratified_split",
    "train_classifier",
]

PHASES = ("fusion", "coarsening", "embedding", "refinement")


@dataclass
class ClassifierModel:
    """One-vs-rest linear scorer on standardized inputs.

    ``weights`` has one row per class; its last column is the bias.
    """

    classes: np.ndarray
    weights: np.ndarray
    mean: np.ndarray
    scale: np.ndarray

    def decision_function(self, E):
        Z = (np.asarray(E, dtype=np.float64) - self.mean) / self.scale
        return Z @ self.weights[:, :-1].T + self.weights[:, -1]

    def predict(self, E):
        return self.classes[np.argmax(self.decision_function(E), axis=1)]


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _fit_binary_ovr(Xb, Y, l2, epochs, W0):
    """Nesterov-accelerated full-batch gradient descent on the mean logistic loss."""
    n = Xb.shape[0]
    lip = 0.25 * np.linalg.norm(Xb, 2) ** 2 / n + l2
    step = 1.0 / lip
    W, V = W0.copy(), W0.copy()
    reg = np.ones(Xb.shape[1])
    reg[-1] = 0.0  # bias is not penalized
    for it in range(epochs):
        P = _sigmoid(Xb @ V.T)
        grad = (P - Y).T @ Xb / n + l2 * V * reg
        W_next = V - step * grad
        V = W_next + (it / (it + 3.0)) * (W_next - W)
        W = W_next
    return W


def train_classifier(E, labels, train_idx, seed=0, l2=1e-4, epochs=200):
    """Fit one-vs-rest logistic regression on ``E[train_idx]``.

    Inputs are standardized with training-set statistics. Deterministic for a
    fixed ``seed`` (which only sets the small random initial weights).

    Raises
    ------
    ValidationError
        Empty training set or fewer than two classes in it.
    """
    train_idx = np.asarray(train_idx, dtype=np.int64)
    if train_idx.size == 0:
        raise ValidationError("training set is empty")
    X = np.asarray(E, dtype=np.float64)[train_idx]
    y = np.asarray(labels)[train_idx]
    classes = np.unique(y)
    if classes.size < 2:
        raise ValidationError("training set contains a single class")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Xb = np.hstack([(X - mean) / scale, np.ones((X.shape[0], 1))])
    Y = (y[:, None] == classes[None, :]).astype(np.float64)
    rng = np.random.default_rng(seed)
    W0 = rng.normal(0.0, 0.01, size=(classes.size, Xb.shape[1]))
    W = _fit_binary_ovr(Xb, Y, l2, epochs, W0)
    return ClassifierModel(classes=classes, weights=W, mean=mean, scale=scale)


def evaluate_classification(model, E, labels, test_idx):
    """Accuracy and micro-averaged F1 on ``test_idx``."""
    test_idx = np.asarray(test_idx, dtype=np.int64)
    if test_idx.size == 0:
        raise ValidationError("test set is empty")
    y = np.asarray(labels)[test_idx]
    pred = model.predict(np.asarray(E)[test_idx])
    return classification_scores(y, pred)


def classification_scores(y_true, y_pred):
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    accuracy = float(np.mean(y_true == y_pred))
    tp = fp = fn = 0
    for c in np.union1d(y_true, y_pred):
        tp += int(np.sum((y_pred == c) & (y_true == c)))
        fp += int(np.sum((y_pred == c) & (y_true != c)))
        fn += int(np.sum((y_pred != c) & (y_true == c)))
    denom = tp + 0.5 * (fp + fn)
    micro_f1 = tp / denom if denom else 0.0
    return {"accuracy": accuracy, "micro_f1": float(micro_f1)}


def stratified_split(labels, per_class=20, max_test=1000, seed=0):
    """``per_class`` training nodes per class; up to ``max_test`` of the rest for testing.

    Nodes with a negative label are never selected.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train = []
    for c in np.unique(labels[labels >= 0]):
        members = np.flatnonzero(labels == c)
        take = min(per_class, max(members.size - 1, 1))
        train.append(rng.choice(members, size=take, replace=False))
    train = np.sort(np.concatenate(train))
    rest = np.setdiff1d(np.flatnonzero(labels >= 0), train)
    test = np.sort(rng.permutation(rest)[:max_test])
    return train, test


def auc_score(pos_scores, neg_scores):
    """ROC AUC by the rank statistic; tied pos/neg pairs earn half credit."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("AUC needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def hadamard_features(E, edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return E[edges[:, 0]] * E[edges[:, 1]]


def link_prediction_auc(E, pos_edges, neg_edges, seed=0, train_fraction=0.8):
    """AUC of a logistic scorer on Hadamard edge features.

    Positive and negative edges are each split ``train_fraction`` /
    remainder; the model is fit on the first part and scored on the rest.
    """
    pos = np.asarray(pos_edges, dtype=np.int64).reshape(-1, 2)
    neg = np.asarray(neg_edges, dtype=np.int64).reshape(-1, 2)
    if pos.shape[0] < 2 or neg.shape[0] < 2:
        raise ValidationError("need at least two positive and two negative edges")
    E = np.asarray(E, dtype=np.float64)
    rng = np.random.default_rng(seed)
    pos = pos[rng.permutation(pos.shape[0])]
    neg = neg[rng.permutation(neg.shape[0])]
    cut_p = min(max(int(round(train_fraction * pos.shape[0])), 1), pos.shape[0] - 1)
    cut_n = min(max(int(round(train_fraction * neg.shape[0])), 1), neg.shape[0] - 1)
    X = np.vstack([hadamard_features(E, pos[:cut_p]), hadamard_features(E, neg[:cut_n])])
    y = np.concatenate([np.ones(cut_p, dtype=np.int64), np.zeros(cut_n, dtype=np.int64)])
    model = train_classifier(X, y, np.arange(y.size), seed=seed)
    col = int(np.flatnonzero(model.classes == 1)[0])
    score = lambda edges: model.decision_function(hadamard_features(E, edges))[:, col]
    return auc_score(score(pos[cut_p:]), score(neg[cut_n:]))


def sample_negative_edges(g, count, seed=0, exclude=None):
    """Uniform node pairs (u < v) that are not edges of ``g`` nor in ``exclude``."""
    n = g.num_nodes
    if n < 2:
        raise ValidationError("need at least two nodes to sample non-edges")
    rng = np.random.default_rng(seed)
    taken = set()
    if exclude is not None:
        taken.update(int(u) * n + int(v) for u, v in np.sort(np.asarray(exclude).reshape(-1, 2), axis=1))
    out = []
    max_pairs = n * (n - 1) // 2 - g.num_edges - len(taken)
    if count > max_pairs:
        raise ValidationError(f"cannot sample {count} non-edges; only {max_pairs} exist")
    while len(out) < count:
        u, v = rng.integers(n, size=2)
        if u == v:
            continue
        u, v = (u, v) if u < v else (v, u)
        code = int(u) * n + int(v)
        if code in taken or g.weight(u, v) > 0:
            continue
        taken.add(code)
        out.append((int(u), int(v)))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def holdout_edges(g, fraction=0.1, seed=0):
    """Remove a random ``fraction`` of edges; returns ``(train_graph, held_out)``."""
    from .graph import build_graph_arrays

    u, v, w = g.edges()
    rng = np.random.default_rng(seed)
    m = u.size
    k = int(round(fraction * m))
    held = np.zeros(m, dtype=bool)
    held[rng.choice(m, size=k, replace=False)] = True
    train = build_graph_arrays(u[~held], v[~held], w[~held], g.num_nodes, allow_self_loops=True)
    return train, np.stack([u[held], v[held]], axis=1)


class PhaseTimer:
    """Wall-clock time per pipeline phase on a monotonic clock."""

    def __init__(self):
        self.timings = {p: 0.0 for p in PHASES}
        self.skipped = []
        self._start = time.perf_counter()

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0

    def skip(self, name):
        self.timings[name] = 0.0
        self.skipped.append(name)

    def finish(self):
        out = dict(self.timings)
        out["total"] = time.perf_counter() - self._start
        return out


@dataclass
class EvalReport:
    accuracy: float = None
    micro_f1: float = None
    auc: float = None
    timings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "accuracy": self.accuracy,
            "micro_f1": self.micro_f1,
            "auc": self.auc,
            "timings": dict(self.timings),
        }
        out.update(self.extra)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def metrics(self):
        """Report contents without the timings (for reproducibility checks)."""
        out = self.to_dict()
        out.pop("timings")
        return out
