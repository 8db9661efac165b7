import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzoom.errors import ValidationError
from graphzoom.fusion import (
    FusionConfig,
    cluster_for_knn,
    cosine_weight,
    fuse,
    graph_fusion,
    knn_attribute_graph,
)
from graphzoom.graph import Graph, build_graph
from graphzoom.io import SbmSpec, generate_sbm

from conftest import clique_edges, graphs, path_graph


def test_cosine_examples():
    assert cosine_weight([1, 0], [1, 0]) == 1.0
    assert cosine_weight([1, 0], [0, 1]) == 0.0
    assert cosine_weight([1, 1], [1, 0]) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert cosine_weight([0, 0], [1, 0]) == 0.0


def test_knn_two_identical_nodes():
    g = knn_attribute_graph(np.array([[1.0, 2.0], [1.0, 2.0]]), np.zeros(2, int), k=1)
    assert g.num_edges == 1
    assert g.weight(0, 1) == pytest.approx(1.0)


def test_knn_tie_break_drops_orthogonal_edge():
    X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    g = knn_attribute_graph(X, np.zeros(3, int), k=1)
    u, v, w = g.edges()
    assert list(zip(u, v)) == [(0, 1)]
    assert w[0] == pytest.approx(1.0)


def test_knn_respects_partition():
    X = np.random.default_rng(0).normal(size=(20, 3))
    part = np.repeat([0, 1], 10)
    g = knn_attribute_graph(X, part, k=3)
    u, v, _ = g.edges()
    assert np.all(part[u] == part[v])


def test_knn_singleton_clusters_give_empty_graph():
    g = knn_attribute_graph(np.eye(4), np.arange(4), k=2)
    assert g.num_nodes == 4 and g.num_edges == 0


def test_knn_partition_length_checked():
    with pytest.raises(ValidationError):
        knn_attribute_graph(np.eye(3), np.zeros(2, int))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(1, 6), st.integers(0, 2**31))
def test_knn_graph_properties(n, k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    part = rng.integers(0, 3, size=n)
    g = knn_attribute_graph(X, part, k=k)
    A = g.adjacency
    assert abs(A - A.T).sum() == 0
    assert not g.has_self_loops
    assert (A.data > 0).all() and (A.data <= 1 + 1e-12).all()
    # every node picked its nearest neighbors, so it has at least one candidate edge
    # (possibly dropped for a non-positive cosine)
    assert A.nnz <= 2 * n * k


def test_knn_matches_bruteforce_oracle():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(15, 3))
    part = np.zeros(15, int)
    k = 3
    expected = set()
    for i in range(15):
        d = [(np.sum((X[i] - X[j]) ** 2), j) for j in range(15) if j != i]
        for _, j in sorted(d)[:k]:
            if cosine_weight(X[i], X[j]) > 0:
                expected.add((min(i, j), max(i, j)))
    u, v, w = knn_attribute_graph(X, part, k).edges()
    assert set(zip(u.tolist(), v.tolist())) == expected
    for a, b, c in zip(u, v, w):
        assert c == pytest.approx(cosine_weight(X[a], X[b]), abs=1e-12)


def test_fuse_examples():
    topo = build_graph([(0, 1, 1.0)], 3)
    feat = build_graph([(0, 1, 0.5)], 3)
    assert fuse(topo, feat, 1.0).weight(0, 1) == 1.5
    assert fuse(topo, feat, 0.0) == topo
    fused = fuse(topo, build_graph([(1, 2, 0.5)], 3), 2.0)
    assert fused == build_graph([(0, 1, 1.0), (1, 2, 1.0)], 3)


def test_fuse_errors():
    with pytest.raises(ValidationError):
        fuse(Graph.empty(2), Graph.empty(3))
    with pytest.raises(ValidationError):
        fuse(Graph.empty(2), Graph.empty(2), -1.0)


@pytest.mark.parametrize("kw", [dict(beta=-0.1), dict(knn_k=0), dict(target_cluster_size=1)])
def test_fusion_config_invalid(kw):
    with pytest.raises(ValidationError):
        FusionConfig(**kw)


def test_cluster_small_graph_total_partition():
    g = build_graph([(0, 1), (1, 2), (2, 3)], 4)
    part = cluster_for_knn(g, 50)
    assert part.shape == (4,)
    assert part.min() >= 0


def test_cluster_path_merges():
    part = cluster_for_knn(path_graph(3), 2)
    assert np.unique(part).size < 3


def test_clusters_never_span_components():
    g = build_graph(clique_edges(list(range(8))) + clique_edges(list(range(8, 16))), 16)
    part = cluster_for_knn(g, 20)
    comp = g.subgraph_components()
    for c in np.unique(part):
        assert np.unique(comp[part == c]).size == 1


@settings(max_examples=25, deadline=None)
@given(graphs(min_nodes=2, max_nodes=40), st.integers(2, 60))
def test_cluster_partition_is_local(g, M):
    part = cluster_for_knn(g, M)
    comp = g.subgraph_components()
    for c in np.unique(part):
        assert np.unique(comp[part == c]).size == 1


def test_graph_fusion_without_features_returns_topology():
    g = path_graph(4)
    assert graph_fusion(g, None) is g
    assert graph_fusion(g, np.zeros((0, 0))) is g


def test_graph_fusion_row_mismatch():
    with pytest.raises(ValidationError):
        graph_fusion(path_graph(4), np.eye(3))


def test_graph_fusion_adds_intra_block_edges():
    ds = generate_sbm(SbmSpec(300, 3, 0.05, 0.01, feature_dim=8, feature_noise=0.2, seed=2))
    fused = graph_fusion(ds.graph, ds.features, seed=0)
    extra = fused.adjacency - ds.graph.adjacency
    extra.eliminate_zeros()
    r, c = extra.nonzero()
    assert r.size > 0
    assert np.mean(ds.labels[r] == ds.labels[c]) > 0.9
