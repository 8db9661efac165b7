"""Text formats for graphs, features, labels, masks and embeddings; SBM benchmarks.

Formats
-------
edge list
    One ``u v`` or ``u v w`` per line, whitespace separated, 0-based ids.
    Lines starting with ``#`` are comments; ``#nodes N`` fixes the node count.
features
    Row ``i`` holds the comma-separated attributes of node ``i``.
labels
    ``node_id,label`` per line.
mask
    One node id per line.
embeddings
    Header ``node,e0,...,e{D-1}`` then ``i,v0,...`` per node.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError
from .graph import Graph, build_graph_arrays

log = logging.getLogger(__name__)

__all__ = [
    "Dataset",
    "SbmSpec",
    "generate_sbm",
    "load_dataset",
    "load_edge_list",
    "load_embeddings_csv",
    "load_features_csv",
    "load_labels_csv",
    "load_mask",
    "save_edge_list",
    "save_embeddings_csv",
    "save_features_csv",
    "save_labels_csv",
    "save_mask",
]


@dataclass
class Dataset:
    """A graph with optional node features, labels and a train/test split."""

    graph: Graph
    features: np.ndarray = None
    labels: np.ndarray = None
    train_idx: np.ndarray = None
    test_idx: np.ndarray = None

    def __post_init__(self):
        n = self.graph.num_nodes
        if self.features is not None and self.features.shape[0] != n:
            raise ValidationError(f"features have {self.features.shape[0]} rows, graph has {n} nodes")
        if self.labels is not None and self.labels.shape[0] != n:
            raise ValidationError(f"labels cover {self.labels.shape[0]} nodes, graph has {n}")
        for name in ("train_idx", "test_idx"):
            idx = getattr(self, name)
            if idx is not None and idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ValidationError(f"{name} has node ids outside [0, {n})")
        if self.train_idx is not None and self.test_idx is not None:
            if np.intersect1d(self.train_idx, self.test_idx).size:
                raise ValidationError("train and test node sets overlap")


@dataclass(frozen=True)
class SbmSpec:
    """Planted-partition benchmark parameters.

    Blocks have ``n // blocks`` nodes each; the remainder joins the last block.
    Features are one-hot block indicators in the first ``blocks`` of
    ``feature_dim`` columns plus Gaussian noise.
    """

    n: int
    blocks: int
    p_in: float
    p_out: float
    feature_dim: int = 16
    feature_noise: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.blocks < 1 or self.blocks > self.n:
            raise ValidationError(f"need 1 <= blocks <= n, got n={self.n}, blocks={self.blocks}")
        if not 0 <= self.p_out <= self.p_in <= 1:
            raise ValidationError(f"need 0 <= p_out <= p_in <= 1, got {self.p_out}, {self.p_in}")
        if self.feature_dim and self.feature_dim < self.blocks:
            raise ValidationError("feature_dim must be 0 or at least the number of blocks")
        if self.feature_noise < 0:
            raise ValidationError("feature_noise must be non-negative")


def _tri_unrank(k, s):
    """Map linear indices into the strict upper triangle of an s x s matrix to (i, j)."""
    k = np.asarray(k, dtype=np.int64)
    total = s * (s - 1) // 2
    # index counted from the end gives a closed form for the row
    r = total - 1 - k
    m = ((np.sqrt(8.0 * r + 1.0) - 1.0) // 2).astype(np.int64)
    # guard against rounding in the square root
    m -= (m * (m + 1) // 2) > r
    m += ((m + 1) * (m + 2) // 2) <= r
    i = s - 2 - m
    j = s - 1 - (r - m * (m + 1) // 2)
    return i, j


def generate_sbm(spec):
    """Sample a stochastic block model dataset.

    Every node pair is an edge independently with probability ``p_in``
    (same block) or ``p_out``; this is realized per block pair by drawing the
    edge count from a binomial and then a uniform subset of pairs. Output is
    a deterministic function of ``spec``.
    """
    rng = np.random.default_rng(spec.seed)
    size = spec.n // spec.blocks
    sizes = [size] * spec.blocks
    sizes[-1] += spec.n - size * spec.blocks
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    labels = np.repeat(np.arange(spec.blocks), sizes)
    us, vs = [], []
    for a in range(spec.blocks):
        for b in range(a, spec.blocks):
            p = spec.p_in if a == b else spec.p_out
            if a == b:
                pairs = sizes[a] * (sizes[a] - 1) // 2
            else:
                pairs = sizes[a] * sizes[b]
            if pairs == 0 or p == 0:
                continue
            m = pairs if p == 1 else int(rng.binomial(pairs, p))
            if m == 0:
                continue
            picks = np.arange(pairs) if m == pairs else np.sort(rng.choice(pairs, size=m, replace=False))
            if a == b:
                i, j = _tri_unrank(picks, sizes[a])
            else:
                i, j = np.divmod(picks, sizes[b])
            us.append(i + offsets[a])
            vs.append(j + offsets[b])
    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    graph = build_graph_arrays(u, v, np.ones(u.size), spec.n)
    features = None
    if spec.feature_dim:
        features = np.zeros((spec.n, spec.feature_dim))
        features[np.arange(spec.n), labels] = 1.0
        if spec.feature_noise > 0:
            features += rng.normal(0.0, spec.feature_noise, size=features.shape)
    return Dataset(graph=graph, features=features, labels=labels)


def _open_error(path, exc):
    return OSError(exc.errno, f"{exc.strerror}: {path}") if isinstance(exc, OSError) else exc


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise _open_error(path, exc) from exc


def load_edge_list(path, num_nodes=None):
    """Read an edge list; see the module docstring for the format.

    Missing weights default to 1.0. Self-loops are dropped with a warning.

    Raises
    ------
    ParseError
        Malformed line (with its line number).
    ValidationError
        Non-positive weight, or a node id beyond a ``#nodes`` header.
    """
    us, vs, ws = [], [], []
    header_n = None
    loops = 0
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "nodes":
                try:
                    header_n = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad node count {parts[1]!r}", path, lineno) from None
                if header_n < 0:
                    raise ParseError("node count must be non-negative", path, lineno)
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v' or 'u v w', got {len(parts)} fields", path, lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"node ids must be integers: {line!r}", path, lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"node ids must be non-negative: {line!r}", path, lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"weight is not a number: {parts[2]!r}", path, lineno) from None
            if not math.isfinite(w):
                raise ValidationError(f"{path}:{lineno}: weight must be finite")
            if w <= 0:
                raise ValidationError(f"{path}:{lineno}: weight must be positive, got {w}")
        if u == v:
            loops += 1
            continue
        us.append(u)
        vs.append(v)
        ws.append(w)
    if loops:
        log.warning("%s: dropped %d self-loop line(s)", path, loops)
    n = num_nodes if num_nodes is not None else header_n
    top = max(max(us, default=-1), max(vs, default=-1))
    if n is None:
        n = top + 1
    elif top >= n:
        raise ValidationError(f"{path}: node id {top} exceeds declared node count {n}")
    return build_graph_arrays(us, vs, ws, n)


def load_features_csv(path):
    """Read a dense feature matrix; an empty file gives a 0 x 0 matrix."""
    rows = []
    width = None
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", path, lineno) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"ragged row: expected {width} values, got {len(row)}", path, lineno)
        if not all(math.isfinite(x) for x in row):
            raise ValidationError(f"{path}:{lineno}: NaN or Inf in features")
        rows.append(row)
    if not rows:
        return np.zeros((0, 0))
    return np.array(rows, dtype=np.float64)


def load_labels_csv(path, num_nodes=None):
    """Read ``node_id,label`` lines into a dense label vector.

    A first line that does not parse as integers is treated as a header.
    Nodes without a label get -1.
    """
    pairs = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            if len(parts) != 2:
                raise ValueError
            node, lab = int(parts[0]), int(parts[1])
        except ValueError:
            if lineno == 1 and not pairs:
                continue
            raise ParseError(f"expected 'node_id,label', got {line!r}", path, lineno) from None
        if node < 0 or lab < 0:
            raise ParseError("node ids and labels must be non-negative", path, lineno)
        pairs.append((node, lab))
    n = num_nodes if num_nodes is not None else max((p[0] for p in pairs), default=-1) + 1
    labels = np.full(n, -1, dtype=np.int64)
    for node, lab in pairs:
        if node >= n:
            raise ValidationError(f"{path}: label for node {node} beyond node count {n}")
        labels[node] = lab
    return labels


def load_mask(path):
    """Read newline-separated node ids."""
    ids = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            node = int(line)
        except ValueError:
            raise ParseError(f"node id is not an integer: {line!r}", path, lineno) from None
        if node < 0:
            raise ParseError("node ids must be non-negative", path, lineno)
        ids.append(node)
    return np.array(ids, dtype=np.int64)


def load_dataset(edges, features=None, labels=None, train_mask=None, test_mask=None):
    """Assemble a :class:`Dataset` from files; only ``edges`` is required."""
    graph = load_edge_list(edges)
    feats = load_features_csv(features) if features else None
    if feats is not None and feats.shape[0] != graph.num_nodes:
        if feats.shape[0] > graph.num_nodes:
            # trailing isolated nodes never appear in an edge list
            graph = load_edge_list(edges, num_nodes=feats.shape[0])
        else:
            raise ValidationError(
                f"{features}: {feats.shape[0]} feature rows for {graph.num_nodes} nodes"
            )
    labs = load_labels_csv(labels, graph.num_nodes) if labels else None
    train = load_mask(train_mask) if train_mask else None
    test = load_mask(test_mask) if test_mask else None
    return Dataset(graph=graph, features=feats, labels=labs, train_idx=train, test_idx=test)


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _open_error(path, exc) from exc


def save_embeddings_csv(E, path):
    """Write embeddings with shortest round-trip float formatting."""
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 2:
        raise ValidationError("embedding matrix must be 2-D")
    lines = ["node," + ",".join(f"e{j}" for j in range(E.shape[1]))]
    for i, row in enumerate(E.tolist()):
        lines.append(f"{i}," + ",".join(map(repr, row)))
    _write(path, "\n".join(lines) + "\n")


def load_embeddings_csv(path):
    lines = [ln for ln in _read_lines(path) if ln.strip()]
    if not lines or not lines[0].startswith("node"):
        raise ParseError("missing 'node,e0,...' header", path, 1)
    dim = len(lines[0].split(",")) - 1
    E = np.zeros((len(lines) - 1, dim))
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise ParseError(f"expected {dim + 1} fields", path, lineno)
        try:
            node = int(parts[0])
            E[node] = [float(x) for x in parts[1:]]
        except (ValueError, IndexError):
            raise ParseError(f"bad embedding row {line[:40]!r}", path, lineno) from None
    return E


def save_edge_list(graph, path, weighted=True):
    u, v, w = graph.edges()
    lines = [f"#nodes {graph.num_nodes}"]
    if weighted:
        lines += [f"{a} {b} {c!r}" for a, b, c in zip(u.tolist(), v.tolist(), w.tolist())]
    else:
        lines += [f"{a} {b}" for a, b in zip(u.tolist(), v.tolist())]
    _write(path, "\n".join(lines) + "\n")


def save_features_csv(X, path):
    X = np.asarray(X, dtype=np.float64)
    _write(path, "".join(",".join(map(repr, row)) + "\n" for row in X.tolist()))


def save_labels_csv(labels, path):
    _write(path, "".join(f"{i},{int(y)}\n" for i, y in enumerate(labels) if y >= 0))


def save_mask(idx, path):
    _write(path, "".join(f"{int(i)}\n" for i in idx))
