import json
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzoom.errors import ValidationError
from graphzoom.evaluation import (
    EvalReport,
    PhaseTimer,
    auc_score,
    classification_scores,
    evaluate_classification,
    hadamard_features,
    holdout_edges,
    link_prediction_auc,
    sample_negative_edges,
    stratified_split,
    train_classifier,
)
from graphzoom.io import SbmSpec, generate_sbm

from conftest import graphs


def pairwise_auc(pos, neg):
    """Brute-force count of correctly ordered (pos, neg) pairs, ties half."""
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def test_separable_two_class():
    rng = np.random.default_rng(0)
    E = np.vstack([rng.normal(-3, 0.5, (20, 2)), rng.normal(3, 0.5, (20, 2))])
    y = np.repeat([0, 1], 20)
    idx = np.arange(40)
    model = train_classifier(E, y, idx)
    assert evaluate_classification(model, E, y, idx)["accuracy"] == 1.0


def test_one_hot_three_class():
    y = np.tile([0, 1, 2], 30)
    E = np.eye(3)[y]
    model = train_classifier(E, y, np.arange(30))
    assert evaluate_classification(model, E, y, np.arange(30, 90))["accuracy"] == 1.0


def test_classifier_deterministic():
    rng = np.random.default_rng(1)
    E, y = rng.normal(size=(50, 4)), rng.integers(0, 3, 50)
    a = train_classifier(E, y, np.arange(50), seed=4)
    b = train_classifier(E, y, np.arange(50), seed=4)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert np.all(np.isfinite(a.weights)) and a.weights.shape == (3, 5)


def test_classifier_errors():
    with pytest.raises(ValidationError):
        train_classifier(np.ones((3, 2)), np.zeros(3, int), np.arange(3))
    with pytest.raises(ValidationError):
        train_classifier(np.ones((3, 2)), np.arange(3), np.array([], int))


def test_classifier_constant_column_ok():
    E = np.column_stack([np.ones(20), np.repeat([-1.0, 1.0], 10)])
    y = np.repeat([0, 1], 10)
    model = train_classifier(E, y, np.arange(20))
    np.testing.assert_array_equal(model.predict(E), y)


def test_score_examples():
    assert classification_scores([0, 1, 2], [0, 1, 2]) == {"accuracy": 1.0, "micro_f1": 1.0}
    assert classification_scores([0, 1, 0, 1], [1, 0, 1, 0])["accuracy"] == 0.0
    assert classification_scores([0, 1, 1, 2], [0, 1, 2, 2])["accuracy"] == 0.75


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=50))
def test_micro_f1_equals_accuracy(pairs):
    y, p = zip(*pairs)
    s = classification_scores(y, p)
    assert s["micro_f1"] == pytest.approx(s["accuracy"], abs=1e-12)


def test_random_labels_near_chance():
    rng = np.random.default_rng(0)
    E = rng.normal(size=(1200, 16))
    y = rng.integers(0, 4, size=1200)
    model = train_classifier(E, y, np.arange(200))
    acc = evaluate_classification(model, E, y, np.arange(200, 1200))["accuracy"]
    assert abs(acc - 0.25) <= 0.1


def test_auc_examples():
    assert auc_score([2.0, 3.0], [0.0, 1.0]) == 1.0
    assert auc_score([1.0, 1.0], [1.0, 1.0]) == 0.5
    assert auc_score([0.9, 0.4], [0.6, 0.1]) == 0.75
    with pytest.raises(ValidationError):
        auc_score([], [1.0])


@settings(max_examples=60)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=20),
       st.lists(st.integers(-5, 5), min_size=1, max_size=20))
def test_auc_matches_pairwise_count(pos, neg):
    assert auc_score(pos, neg) == pytest.approx(pairwise_auc(pos, neg), abs=1e-12)


@settings(max_examples=40)
@given(st.lists(st.integers(-24, 24).map(lambda i: i / 8), min_size=1, max_size=20),
       st.lists(st.integers(-24, 24).map(lambda i: i / 8), min_size=1, max_size=20))
def test_auc_monotone_invariance(pos, neg):
    # grid values keep the transform strictly monotone in floating point
    f = lambda x: np.exp(np.asarray(x)) * 3.0 + 1.0
    assert auc_score(f(pos), f(neg)) == pytest.approx(auc_score(pos, neg), abs=1e-12)


def test_stratified_split():
    y = np.repeat(np.arange(3), 50)
    y[::25] = -1
    train, test = stratified_split(y, per_class=20, max_test=60, seed=1)
    assert np.intersect1d(train, test).size == 0
    np.testing.assert_array_equal(np.bincount(y[train]), [20, 20, 20])
    assert test.size == 60 and (y[test] >= 0).all()


def test_hadamard_features():
    E = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(hadamard_features(E, [[0, 1]]), [[3.0, 8.0]])


def test_link_prediction_separable():
    # positives share a direction; negatives pair opposite directions
    rng = np.random.default_rng(0)
    E = np.vstack([rng.normal(1.0, 0.1, (20, 3)), rng.normal(-1.0, 0.1, (20, 3))])
    pos = np.array([(i, i + 1) for i in range(0, 18)] + [(i, i + 1) for i in range(20, 38)])
    neg = np.array([(i, 39 - i) for i in range(0, 20)] * 2)
    assert link_prediction_auc(E, pos, neg) == pytest.approx(1.0)


def test_link_prediction_errors():
    with pytest.raises(ValidationError):
        link_prediction_auc(np.ones((3, 2)), np.zeros((0, 2), int), [[0, 1], [1, 2]])


@settings(max_examples=20, deadline=None)
@given(graphs(min_nodes=4, max_nodes=30), st.integers(0, 2**31))
def test_negative_edges_are_non_edges(g, seed):
    n = g.num_nodes
    free = n * (n - 1) // 2 - g.num_edges
    neg = sample_negative_edges(g, min(free, 10), seed=seed)
    assert len({tuple(e) for e in neg.tolist()}) == len(neg)
    for u, v in neg:
        assert u < v and g.weight(u, v) == 0


def test_negative_edges_too_many():
    from graphzoom.graph import build_graph

    with pytest.raises(ValidationError):
        sample_negative_edges(build_graph([(0, 1), (1, 2)], 3), 5)


def test_holdout_edges_partition():
    g = generate_sbm(SbmSpec(100, 2, 0.2, 0.02, seed=0)).graph
    train, held = holdout_edges(g, 0.1, seed=3)
    assert held.shape == (round(0.1 * g.num_edges), 2)
    assert train.num_edges + held.shape[0] == g.num_edges
    for u, v in held:
        assert train.weight(u, v) == 0 and g.weight(u, v) > 0


def test_phase_timer():
    t = PhaseTimer()
    for name in ("fusion", "coarsening", "embedding", "refinement"):
        with t.phase(name):
            time.sleep(0.002)
    out = t.finish()
    phases = [out[k] for k in ("fusion", "coarsening", "embedding", "refinement")]
    assert all(v > 0 for v in phases)
    assert out["total"] >= 0.99 * sum(phases)


def test_phase_timer_skip():
    t = PhaseTimer()
    t.skip("fusion")
    assert t.finish()["fusion"] == 0.0 and t.skipped == ["fusion"]


def test_report_json_schema():
    r = EvalReport(accuracy=0.5, micro_f1=0.5, timings={"fusion": 0.0, "total": 1.0}, extra={"task": "classify"})
    d = json.loads(r.to_json())
    assert set(d) >= {"accuracy", "micro_f1", "auc", "timings"}
    assert "timings" not in r.metrics()
