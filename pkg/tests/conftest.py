import numpy as np
import pytest
from hypothesis import strategies as st

from graphzoom import _backend
from graphzoom.graph import build_graph, build_graph_arrays


def random_graph(rng, n, p=0.3, connected=False, max_weight=3.0):
    """Erdos-Renyi graph with uniform(0.1, max_weight) weights."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    u, v = iu[keep], ju[keep]
    if connected and n > 1:
        # spanning path through a random order guarantees connectivity
        order = rng.permutation(n)
        u = np.concatenate([u, np.minimum(order[:-1], order[1:])])
        v = np.concatenate([v, np.maximum(order[:-1], order[1:])])
    w = rng.uniform(0.1, max_weight, size=u.size)
    return build_graph_arrays(u, v, w, n)


def path_graph(n, w=1.0):
    return build_graph([(i, i + 1, w) for i in range(n - 1)], n)


def cycle_graph(n):
    return build_graph([(i, (i + 1) % n, 1.0) for i in range(n)], n)


def clique_edges(nodes):
    return [(a, b, 1.0) for i, a in enumerate(nodes) for b in nodes[i + 1 :]]


@st.composite
def graphs(draw, min_nodes=1, max_nodes=30, connected=False):
    n = draw(st.integers(min_nodes, max_nodes))
    p = draw(st.floats(0.0, 0.6))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(np.random.default_rng(seed), n, p, connected=connected)


@pytest.fixture(params=_backend.available())
def backend(request):
    prev = _backend.use(request.param)
    yield request.param
    _backend.use(prev)
