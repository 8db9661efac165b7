"""End-to-end driver: fuse, coarsen, embed the coarsest graph, refine, evaluate."""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .coarsening import CoarsenConfig, build_hierarchy
from .embedding import get_kernel
from .errors import ValidationError
from .evaluation import (
    EvalReport,
    PhaseTimer,
    evaluate_classification,
    holdout_edges,
    link_prediction_auc,
    sample_negative_edges,
    stratified_split,
    train_classifier,
)
from .fusion import FusionConfig, graph_fusion
from .io import SbmSpec, generate_sbm, load_dataset, save_embeddings_csv
from .refinement import FilterConfig, refine_all

log = logging.getLogger(__name__)

__all__ = ["PipelineConfig", "PipelineError", "PipelineResult", "embed_dataset", "run_pipeline"]

TASKS = ("classify", "linkpred", "embed-only")


class PipelineError(RuntimeError):
    """A pipeline phase failed; ``phase`` names it."""

    def __init__(self, phase, exc):
        self.phase = phase
        super().__init__(f"{phase} failed: {exc}")


@dataclass
class PipelineConfig:
    edges: str = None
    features: str = None
    labels: str = None
    train_mask: str = None
    test_mask: str = None
    sbm: SbmSpec = None
    levels: int = 2
    beta: float = 1.0
    knn_k: int = 5
    sigma: float = 2.0
    filter_power: int = 2
    kernel: str = "deepwalk"
    kernel_options: dict = field(default_factory=dict)
    dim: int = 128
    seed: int = 42
    task: str = "classify"
    out_embeddings: str = None
    out_report: str = None
    holdout_fraction: float = 0.1
    trials: int = 5

    def validate(self):
        if (self.edges is None) == (self.sbm is None):
            raise ValidationError("provide exactly one of an edge list or an SBM spec")
        if self.levels < 0:
            raise ValidationError("levels must be >= 0")
        if self.task not in TASKS:
            raise ValidationError(f"unknown task {self.task!r}; choose from {TASKS}")
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        if self.task == "classify" and self.sbm is None and self.labels is None:
            raise ValidationError("task 'classify' needs --labels")
        if (self.train_mask is None) != (self.test_mask is None):
            raise ValidationError("give both --train-mask and --test-mask, or neither")
        if not 0 < self.holdout_fraction < 1:
            raise ValidationError("holdout_fraction must lie in (0, 1)")
        FusionConfig(self.beta, self.knn_k)
        FilterConfig(self.sigma, self.filter_power)
        get_kernel(self.kernel, self.dim, self.seed, **self.kernel_options)
        return self

    def to_dict(self):
        out = asdict(self)
        if self.sbm is not None:
            out["sbm"] = asdict(self.sbm)
        return out


@dataclass
class PipelineResult:
    embeddings: np.ndarray
    hierarchy: object
    timings: dict
    fusion_skipped: bool


def _phase(timer, name):
    class _Guard:
        def __enter__(self_):
            self_._cm = timer.phase(name)
            self_._cm.__enter__()

        def __exit__(self_, et, ev, tb):
            self_._cm.__exit__(et, ev, tb)
            if ev is not None and not isinstance(ev, PipelineError):
                raise PipelineError(name, ev) from ev
            return False

    return _Guard()


def embed_dataset(graph, features, cfg, timer=None):
    """Run fusion, coarsening, embedding and refinement on one graph.

    Returns a :class:`PipelineResult` with level-0 embeddings.
    """
    timer = timer or PhaseTimer()
    skipped = features is None or np.asarray(features).size == 0
    if skipped:
        log.info("no node features: fused graph = topology graph")
        timer.skip("fusion")
        fused = graph
    else:
        with _phase(timer, "fusion"):
            fused = graph_fusion(graph, features, FusionConfig(cfg.beta, cfg.knn_k), seed=cfg.seed)
    with _phase(timer, "coarsening"):
        h = build_hierarchy(
            fused, CoarsenConfig(levels=cfg.levels), seed=cfg.seed,
            features=None if skipped else features,
        )
    with _phase(timer, "embedding"):
        kernel = get_kernel(cfg.kernel, cfg.dim, cfg.seed, **cfg.kernel_options)
        coarse_feats = h.features[-1] if h.features else None
        E = kernel(h.coarsest, coarse_feats)
        if E.shape[0] != h.coarsest.num_nodes or not np.all(np.isfinite(E)):
            raise ValidationError("kernel returned a malformed embedding matrix")
    with _phase(timer, "refinement"):
        E = refine_all(h, E, FilterConfig(cfg.sigma, cfg.filter_power))
    return PipelineResult(E, h, timer.timings, skipped)


def _load(cfg):
    if cfg.sbm is not None:
        return generate_sbm(cfg.sbm)
    return load_dataset(cfg.edges, cfg.features, cfg.labels, cfg.train_mask, cfg.test_mask)


def run_pipeline(cfg, dataset=None, command=None):
    """Execute the configured run, write its artifacts and return an :class:`EvalReport`.

    ``dataset`` bypasses loading (the config's data source is then ignored).
    """
    if dataset is None:
        cfg.validate()
    timer = PhaseTimer()
    if dataset is None:
        try:
            dataset = _load(cfg)
        except (OSError, ValueError) as exc:
            raise PipelineError("loading", exc) from exc
    graph = dataset.graph
    held = None
    if cfg.task == "linkpred":
        with _phase(timer, "holdout"):
            graph, held = holdout_edges(dataset.graph, cfg.holdout_fraction, cfg.seed)
    result = embed_dataset(graph, dataset.features, cfg, timer)
    E = result.embeddings
    report = EvalReport()
    extra = {
        "task": cfg.task,
        "level_sizes": result.hierarchy.node_counts,
        "fusion_skipped": result.fusion_skipped,
        "backend": _backend.name,
    }
    with _phase(timer, "evaluation"):
        if cfg.task == "classify":
            extra.update(_classify(E, dataset, cfg, report))
        elif cfg.task == "linkpred":
            neg = sample_negative_edges(dataset.graph, held.shape[0], seed=cfg.seed + 1)
            report.auc = link_prediction_auc(E, held, neg, seed=cfg.seed)
            extra["num_heldout_edges"] = int(held.shape[0])
    timings = timer.finish()
    report.timings = {k: timings[k] for k in ("fusion", "coarsening", "embedding", "refinement", "total")}
    extra["skipped_phases"] = list(timer.skipped)
    extra["config"] = cfg.to_dict()
    if command is not None:
        extra["command"] = command
    report.extra = extra
    if cfg.out_embeddings:
        save_embeddings_csv(E, cfg.out_embeddings)
    if cfg.out_report:
        try:
            with open(cfg.out_report, "w", encoding="utf-8") as fh:
                fh.write(report.to_json() + "\n")
        except OSError as exc:
            raise PipelineError("report", exc) from exc
    report.embeddings = E
    return report


def _classify(E, dataset, cfg, report):
    labels = dataset.labels
    if labels is None:
        raise ValidationError("classification needs labels")
    if dataset.train_idx is not None:
        splits = [(dataset.train_idx, dataset.test_idx)]
    else:
        splits = [stratified_split(labels, seed=cfg.seed + t) for t in range(cfg.trials)]
    accs, f1s = [], []
    for t, (train, test) in enumerate(splits):
        model = train_classifier(E, labels, train, seed=cfg.seed + t)
        scores = evaluate_classification(model, E, labels, test)
        accs.append(scores["accuracy"])
        f1s.append(scores["micro_f1"])
    report.accuracy = float(np.mean(accs))
    report.micro_f1 = float(np.mean(f1s))
    return {"accuracy_std": float(np.std(accs)), "num_trials": len(splits)}
