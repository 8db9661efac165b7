"""Time the hot kernels under the compiled and pure-Python backends.

Usage: python3 benchmarks/bench_backends.py [--nodes 3000] [--repeat 3]

The Python backend is slow on SGNS, so that kernel runs on a reduced walk
corpus (reported in the table).
"""

import argparse
import time

import numpy as np

from graphzoom import _backend
from graphzoom.coarsening import _outlier_mask, smooth_test_vectors
from graphzoom.embedding import _row_cumulative_weights, generate_walks, unigram_table
from graphzoom.io import SbmSpec, generate_sbm


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(n):
    g = generate_sbm(SbmSpec(n, 10, min(1.0, 150.0 / n), 0.5 / n, feature_dim=0, seed=0)).graph
    a = g.adjacency
    T0 = smooth_test_vectors(g, 8, 0, 0)
    Ts = smooth_test_vectors(g, 8, 10, 0)
    seeds = _outlier_mask(g, 8.0).astype(np.uint8)
    cumw = _row_cumulative_weights(a)
    starts = np.arange(n, dtype=np.int64)
    walks = generate_walks(g, 1, 40, seed=0)[: max(n // 20, 50)]
    table = unigram_table(walks, n)
    syn0 = (np.random.default_rng(0).random((n, 64)) - 0.5) / 64

    def core():
        return _backend.core

    return g, {
        "gauss_seidel (8 vec x 10 sweeps)": lambda: core().gauss_seidel(
            a.indptr, a.indices, a.data, T0.copy(), 10),
        "spectral_aggregate": lambda: core().spectral_aggregate(
            a.indptr, a.indices, Ts.copy(), seeds, 1.8, 0.9, 0.7),
        "random_walks (1 per node, len 80)": lambda: core().random_walks(
            a.indptr, a.indices, cumw, starts, 80, 1),
        f"sgns_train ({walks.shape[0]} walks, dim 64)": lambda: core().sgns_train(
            walks, syn0.copy(), np.zeros_like(syn0), table, 10, 5, 0.025, 1, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=3000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _backend.available()
    g, jobs = workloads(args.nodes)
    print(f"graph: {g.num_nodes} nodes, {g.num_edges} edges; backends: {', '.join(backends)}")
    header = f"{'kernel':<40}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, job in jobs.items():
        times = []
        for b in backends:
            prev = _backend.use(b)
            try:
                times.append(best_of(job, 1 if b == "python" else args.repeat))
            finally:
                _backend.use(prev)
        row = f"{label:<40}" + "".join(f"{t:>11.4f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
