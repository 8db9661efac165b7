import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzoom.coarsening import CoarsenConfig, Hierarchy, MappingOperator, build_hierarchy
from graphzoom.errors import DegenerateNodeError, ValidationError
from graphzoom.graph import Graph, build_graph, normalized_filter_matrix
from graphzoom.refinement import (
    FilterConfig,
    filter_refine,
    project,
    refine_all,
    tikhonov_exact,
    tikhonov_objective,
)

from conftest import cycle_graph, graphs, path_graph, random_graph


def dense_filter(g, sigma, k):
    """Filter matrix built from its definition with dense numpy."""
    A = g.adjacency.toarray() + sigma * np.eye(g.num_nodes)
    d = A.sum(axis=1)
    M = A / np.sqrt(np.outer(d, d))
    return np.linalg.matrix_power(M, k)


def test_project_examples():
    H = MappingOperator([0, 0, 1])
    np.testing.assert_array_equal(project(np.array([[3.0], [7.0]]), H), [[3.0], [3.0], [7.0]])
    E = np.arange(6.0).reshape(3, 2)
    np.testing.assert_array_equal(project(E, MappingOperator.identity(3)), E)
    np.testing.assert_array_equal(project(np.ones((2, 2)), H), np.ones((3, 2)))
    with pytest.raises(ValidationError):
        project(np.ones((3, 1)), H)


def test_filter_power_zero_is_identity():
    E = np.random.default_rng(0).normal(size=(4, 2))
    out = filter_refine(path_graph(4), E, FilterConfig(power=0))
    np.testing.assert_array_equal(out, E)
    assert out is not E


def test_filter_single_node_unchanged():
    E = np.array([[1.5, -2.0]])
    np.testing.assert_allclose(filter_refine(Graph.empty(1), E, FilterConfig(1.0, 3)), E)


def test_filter_unit_edge_hand_case():
    out = filter_refine(path_graph(2), np.array([[1.0], [0.0]]), FilterConfig(1.0, 1))
    np.testing.assert_allclose(out, [[0.5], [0.5]])


def test_filter_degenerate_node():
    with pytest.raises(DegenerateNodeError):
        filter_refine(build_graph([(0, 1)], 3), np.ones((3, 1)), FilterConfig(0.0, 1))


def test_filter_isolated_node_unchanged_with_self_loops():
    g = build_graph([(0, 1)], 3)
    E = np.array([[1.0], [2.0], [5.0]])
    assert filter_refine(g, E)[2, 0] == pytest.approx(5.0)


@settings(max_examples=40, deadline=None)
@given(graphs(min_nodes=1, max_nodes=25), st.sampled_from([0.5, 1.0, 2.0]), st.integers(1, 4))
def test_filter_matches_dense_definition(g, sigma, k):
    E = np.random.default_rng(g.num_nodes).normal(size=(g.num_nodes, 3))
    np.testing.assert_allclose(
        filter_refine(g, E, FilterConfig(sigma, k)), dense_filter(g, sigma, k) @ E, atol=1e-12
    )


@settings(max_examples=40, deadline=None)
@given(graphs(min_nodes=1, max_nodes=30), st.integers(1, 4))
def test_filter_spectral_identity(g, k):
    M = dense_filter(g, 2.0, 1)
    lam, U = np.linalg.eigh(np.eye(g.num_nodes) - M)
    expected = U @ np.diag((1 - lam) ** k) @ U.T
    got = dense_filter(g, 2.0, k)
    assert np.linalg.norm(got - expected) <= 1e-8 * max(np.linalg.norm(expected), 1.0)


@settings(max_examples=40, deadline=None)
@given(graphs(min_nodes=2, max_nodes=30))
def test_self_loops_squeeze_spectrum(g):
    if (g.degrees == 0).any():
        g = Graph(g.adjacency + build_graph([(i, (i + 1) % g.num_nodes) for i in range(g.num_nodes)]
                                            if g.num_nodes > 2 else [(0, 1)], g.num_nodes).adjacency)
    tops = []
    for sigma in (0.0, 0.5, 1.0, 2.0):
        M = normalized_filter_matrix(g, sigma).toarray()
        tops.append(np.linalg.eigvalsh(np.eye(g.num_nodes) - M).max())
    assert all(b <= a + 1e-12 for a, b in zip(tops, tops[1:]))


@settings(max_examples=30, deadline=None)
@given(graphs(min_nodes=2, max_nodes=30), st.integers(1, 3))
def test_high_frequency_attenuation(g, k):
    M = normalized_filter_matrix(g, 2.0).toarray()
    lam, U = np.linalg.eigh(np.eye(g.num_nodes) - M)
    u = U[:, -1:]
    out = filter_refine(g, u, FilterConfig(2.0, k))
    assert np.linalg.norm(out) / np.linalg.norm(u) == pytest.approx(abs(1 - lam[-1]) ** k, abs=1e-8)


def test_tikhonov_edgeless_identity():
    E = np.random.default_rng(1).normal(size=(5, 2))
    np.testing.assert_allclose(tikhonov_exact(Graph.empty(5), E), E)


def test_tikhonov_size_guard():
    with pytest.raises(ValidationError):
        tikhonov_exact(Graph.empty(10), np.zeros((10, 1)), max_nodes=5)


@settings(max_examples=30, deadline=None)
@given(graphs(min_nodes=1, max_nodes=40), st.integers(0, 2**31))
def test_tikhonov_residual(g, seed):
    from graphzoom.graph import normalized_laplacian

    E_hat = np.random.default_rng(seed).normal(size=(g.num_nodes, 3))
    E = tikhonov_exact(g, E_hat)
    L = normalized_laplacian(g).toarray()
    assert np.linalg.norm(E + L @ E - E_hat) <= 1e-8


def test_tikhonov_minimizes_objective():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 10, 0.4, connected=True)
    E_hat = rng.normal(size=(10, 4))
    E = tikhonov_exact(g, E_hat)
    best = tikhonov_objective(g, E, E_hat)
    for _ in range(100):
        d = rng.normal(size=E.shape)
        d *= 0.01 / np.linalg.norm(d)
        assert tikhonov_objective(g, E + d, E_hat) >= best


def _col_cos(a, b):
    return np.sum(a * b, axis=0) / (np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0))


@pytest.mark.xfail(strict=True, reason=(
    "the sigma=2, k=2 filter attenuates high frequencies far more than (I+L)^-1, whose "
    "response never drops below 1/3, so on white-noise inputs the Tikhonov output stays "
    "closer to the unrefined input than to the filtered one"
))
def test_filter_direction_agrees_with_tikhonov():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = random_graph(rng, 10, 0.4, connected=True)
        E_hat = rng.normal(size=(10, 8))
        target = tikhonov_exact(g, E_hat)
        filt = filter_refine(g, E_hat, FilterConfig(2.0, 2))
        assert _col_cos(filt, target).mean() > _col_cos(E_hat, target).mean()


def test_refine_all_zero_level():
    g = path_graph(4)
    E = np.random.default_rng(0).normal(size=(4, 3))
    np.testing.assert_array_equal(refine_all(Hierarchy([g]), E), E)


@pytest.mark.parametrize("n", [12, 30, 64])
def test_refine_all_constant_on_cycles(n):
    h = build_hierarchy(cycle_graph(n), CoarsenConfig(levels=2))
    assert h.depth >= 1
    out = refine_all(h, np.full((h.coarsest.num_nodes, 2), 3.0), FilterConfig(2.0, 2))
    assert out.shape == (n, 2)
    np.testing.assert_allclose(out, 3.0, atol=1e-12)


def test_refine_all_shape_and_mismatch():
    g = random_graph(np.random.default_rng(2), 40, 0.15, connected=True)
    h = build_hierarchy(g, CoarsenConfig(levels=2))
    out = refine_all(h, np.ones((h.coarsest.num_nodes, 5)))
    assert out.shape == (40, 5)
    with pytest.raises(ValidationError):
        refine_all(h, np.ones((h.coarsest.num_nodes + 1, 5)))


@pytest.mark.parametrize("kw", [dict(sigma=-1.0), dict(power=-1)])
def test_filter_config_invalid(kw):
    with pytest.raises(ValidationError):
        FilterConfig(**kw)
