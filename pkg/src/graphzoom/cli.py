"""Command-line entry point: ``graphzoom --sbm 1000,5,0.05,0.005,16,0.3 --levels 2``."""

import argparse
import ast
import logging
import shlex
import sys

from .errors import ValidationError
from .io import SbmSpec
from .pipeline import TASKS, PipelineConfig, PipelineError, run_pipeline

__all__ = ["build_parser", "main", "parse_args"]


def _sbm_arg(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("expected n,b,p_in,p_out,K,noise")
    try:
        n, b, k = int(parts[0]), int(parts[1]), int(parts[4])
        p_in, p_out, noise = float(parts[2]), float(parts[3]), float(parts[5])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad SBM spec {text!r}: {exc}") from None
    return n, b, p_in, p_out, k, noise


def _kernel_opt(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        value = ast.literal_eval(value)
    except (ValueError, SyntaxError):
        pass
    return key.strip().replace("-", "_"), value


def build_parser():
    p = argparse.ArgumentParser(
        prog="graphzoom",
        description="Multi-level graph embedding: fuse, coarsen, embed, refine, evaluate.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--edges", metavar="PATH", help="edge list (u v [w] per line)")
    src.add_argument("--sbm", metavar="n,b,p_in,p_out,K,noise", type=_sbm_arg,
                     help="generate a stochastic block model instead of loading files")
    p.add_argument("--features", metavar="PATH", help="dense feature CSV, one row per node")
    p.add_argument("--labels", metavar="PATH", help="node_id,label CSV")
    p.add_argument("--train-mask", metavar="PATH")
    p.add_argument("--test-mask", metavar="PATH")
    p.add_argument("--levels", type=int, default=2, help="coarsening levels (default 2)")
    p.add_argument("--beta", type=float, default=1.0, help="attribute graph weight (default 1.0)")
    p.add_argument("--knn-k", type=int, default=5, help="neighbors per node in the attribute graph")
    p.add_argument("--sigma", type=float, default=2.0, help="self-loop weight of the refinement filter")
    p.add_argument("--filter-power", type=int, default=2, help="refinement filter power")
    p.add_argument("--kernel", default="deepwalk", choices=("deepwalk", "spectral"))
    p.add_argument("--kernel-opt", metavar="KEY=VALUE", type=_kernel_opt, action="append", default=[],
                   help="kernel config override, repeatable (e.g. walk_length=40)")
    p.add_argument("--dim", type=int, default=128, help="embedding dimension")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--task", default="classify", choices=TASKS)
    p.add_argument("--out-embeddings", metavar="PATH")
    p.add_argument("--out-report", metavar="PATH")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_args(argv=None, parser=None):
    """Parse ``argv`` into a validated :class:`PipelineConfig`.

    Invalid input exits with status 2 through ``argparse``.
    """
    parser = parser or build_parser()
    ns = parser.parse_args(argv)
    sbm = None
    if ns.sbm is not None:
        n, b, p_in, p_out, k, noise = ns.sbm
        try:
            sbm = SbmSpec(n, b, p_in, p_out, feature_dim=k, feature_noise=noise, seed=ns.seed)
        except ValidationError as exc:
            parser.error(f"--sbm: {exc}")
    if sbm is not None and any(getattr(ns, f) for f in ("features", "labels", "train_mask", "test_mask")):
        parser.error("--sbm cannot be combined with dataset file flags")
    cfg = PipelineConfig(
        edges=ns.edges, features=ns.features, labels=ns.labels,
        train_mask=ns.train_mask, test_mask=ns.test_mask, sbm=sbm,
        levels=ns.levels, beta=ns.beta, knn_k=ns.knn_k, sigma=ns.sigma,
        filter_power=ns.filter_power, kernel=ns.kernel, kernel_options=dict(ns.kernel_opt),
        dim=ns.dim, seed=ns.seed, task=ns.task,
        out_embeddings=ns.out_embeddings, out_report=ns.out_report,
    )
    try:
        cfg.validate()
    except ValidationError as exc:
        parser.error(str(exc))
    cfg.verbose = ns.verbose
    return cfg


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    cfg = parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(cfg, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = run_pipeline(cfg, command="graphzoom " + shlex.join(argv))
    except (PipelineError, OSError, ValueError) as exc:
        print(f"graphzoom: error: {exc}", file=sys.stderr)
        return 1
    m = report.to_dict()
    summary = {k: m[k] for k in ("accuracy", "micro_f1", "auc") if m[k] is not None}
    parts = [f"{k}={v:.4f}" for k, v in summary.items()]
    parts.append(f"levels={m['level_sizes']}")
    parts.append(f"total={m['timings']['total']:.2f}s")
    print(" ".join(parts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
