import numpy as np
import pytest

from crfner.crf import (
    Lattice,
    build_lattice,
    decode_lattice,
    log_partition,
    marginals,
    nll_and_gradient,
    viterbi,
)
from crfner.features import FeatureConfig
from crfner.model import Model
from helpers import brute_logz, brute_marginals, path_score, random_lattice


def toy_model(feature_ids, labels, unigram, trans_full=None, sigma=1.0):
    F, L = len(feature_ids), len(labels)
    if trans_full is None:
        trans_full = np.zeros((L + 1, L))
    return Model(
        labels=tuple(labels),
        feature_ids=tuple(feature_ids),
        unigram=np.asarray(unigram, dtype=float).reshape(F, L),
        trans_full=np.asarray(trans_full, dtype=float),
        l2_sigma=sigma,
        config=FeatureConfig(),
    )


def lattice_of(node, trans, start):
    return Lattice(np.asarray(node, float), np.asarray(trans, float),
                   np.asarray(start, float))


def test_build_lattice_zero_weights():
    model = toy_model(["f0", "f1"], ["A", "B"], np.zeros((2, 2)))
    lat = build_lattice(model, [[("f0", 1.0)], [("f1", 1.0)]])
    np.testing.assert_array_equal(lat.node_scores, np.zeros((2, 2)))


def test_build_lattice_weighted_feature():
    model = toy_model(["f0"], ["A", "B"], [[2.0, 0.0]])
    lat = build_lattice(model, [[("f0", 1.0)]])
    np.testing.assert_allclose(lat.node_scores, [[2.0, 0.0]])


def test_build_lattice_scales_by_value():
    model = toy_model(["f0"], ["A", "B"], [[2.0, 0.0]])
    lat = build_lattice(model, [[("f0", 0.5)]])
    np.testing.assert_allclose(lat.node_scores, [[1.0, 0.0]])


def test_build_lattice_unknown_feature_scores_zero():
    model = toy_model(["f0"], ["A", "B"], [[2.0, 3.0]])
    lat = build_lattice(model, [[("not-seen", 1.0)]])
    np.testing.assert_array_equal(lat.node_scores, [[0.0, 0.0]])


def test_build_lattice_rejects_empty():
    model = toy_model(["f0"], ["A"], [[0.0]])
    with pytest.raises(ValueError):
        build_lattice(model, [])
    with pytest.raises(ValueError):
        viterbi(model, [])


def test_lattice_validates_finiteness():
    with pytest.raises(ValueError):
        lattice_of([[np.inf, 0.0]], np.zeros((2, 2)), np.zeros(2))


def test_log_partition_on_lattice():
    lat = lattice_of(np.zeros((1, 2)), np.zeros((2, 2)), np.zeros(2))
    assert log_partition(lat) == pytest.approx(np.log(2), abs=1e-12)
    lat2 = lattice_of(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2))
    assert log_partition(lat2) == pytest.approx(np.log(4), abs=1e-12)


def test_log_partition_dominates_any_path():
    rng = np.random.default_rng(13)
    for _ in range(30):
        node, trans, start = random_lattice(rng)
        lat = lattice_of(node, trans, start)
        logz = log_partition(lat)
        T, L = node.shape
        for _ in range(5):
            seq = [int(rng.integers(L)) for _ in range(T)]
            s = path_score(seq, node, trans, start)
            assert logz >= s - 1e-12
            assert 0.0 < np.exp(s - logz) <= 1.0


def test_marginals_on_lattice():
    rng = np.random.default_rng(31)
    node, trans, start = random_lattice(rng, max_len=5)
    unary, pair = marginals(lattice_of(node, trans, start))
    want_unary, want_pair = brute_marginals(node, trans, start)
    np.testing.assert_allclose(unary, want_unary, atol=1e-8)
    np.testing.assert_allclose(pair, want_pair, atol=1e-8)


def test_viterbi_returns_label_strings():
    model = toy_model(["f0"], ["A", "B"], [[0.1, 0.9]])
    labels, score = viterbi(model, [[("f0", 1.0)]])
    assert labels == ["B"]
    assert score == pytest.approx(0.9)


def test_decode_lattice_matches_score():
    rng = np.random.default_rng(41)
    for _ in range(20):
        node, trans, start = random_lattice(rng)
        path, score = decode_lattice(lattice_of(node, trans, start))
        assert score == pytest.approx(path_score(path, node, trans, start), abs=1e-9)


def test_nll_zero_weights_empty_features():
    model = toy_model(["f0"], ["A", "B"], np.zeros((1, 2)))
    batch = [([[], [], []], [0, 0, 1])]
    value, grad = nll_and_gradient(model, batch)
    assert value == pytest.approx(3 * np.log(2), abs=1e-12)
    assert grad.shape == (1 * 2 + 3 * 2,)


def test_nll_nonnegative_at_zero_weights():
    rng = np.random.default_rng(3)
    model = toy_model([f"f{i}" for i in range(4)], ["A", "B", "C"],
                      np.zeros((4, 3)))
    batch = []
    for _ in range(5):
        T = int(rng.integers(1, 5))
        vectors = [[(f"f{int(rng.integers(4))}", 1.0)] for _ in range(T)]
        batch.append((vectors, [int(rng.integers(3)) for _ in range(T)]))
    value, _ = nll_and_gradient(model, batch)
    assert value >= 0.0


def test_nll_rejects_bad_label_ids():
    model = toy_model(["f0"], ["A", "B"], np.zeros((1, 2)))
    with pytest.raises(ValueError):
        nll_and_gradient(model, [([[("f0", 1.0)]], [2])])
    with pytest.raises(ValueError):
        nll_and_gradient(model, [([[("f0", 1.0)]], [0, 0])])


def _fd_instance():
    """3 tokens, 3 labels, ~30 active features, random nonzero weights."""
    rng = np.random.default_rng(20130)
    feature_ids = [f"f{i:02d}" for i in range(12)]
    labels = ["A", "B", "C"]
    vectors = []
    for t in range(3):
        chosen = rng.permutation(12)[:10]
        vectors.append([
            (feature_ids[j], 0.5 if k == 0 else 1.0)
            for k, j in enumerate(sorted(chosen))
        ])
    gold = [0, 2, 1]
    theta = rng.uniform(-0.5, 0.5, 12 * 3 + 4 * 3)
    return feature_ids, labels, [(vectors, gold)], theta


def _nll_at(theta, feature_ids, labels, batch, sigma=1.0):
    F, L = len(feature_ids), len(labels)
    model = toy_model(feature_ids, labels,
                      theta[: F * L].reshape(F, L),
                      theta[F * L:].reshape(L + 1, L), sigma=sigma)
    return nll_and_gradient(model, batch)


def test_gradient_matches_central_differences():
    feature_ids, labels, batch, theta = _fd_instance()
    value, grad = _nll_at(theta, feature_ids, labels, batch)
    assert np.isfinite(value)
    h = 1e-5
    for i in range(len(theta)):
        up = theta.copy()
        up[i] += h
        down = theta.copy()
        down[i] -= h
        fd = (_nll_at(up, feature_ids, labels, batch)[0]
              - _nll_at(down, feature_ids, labels, batch)[0]) / (2 * h)
        rel = abs(grad[i] - fd) / max(abs(grad[i]), abs(fd), 1e-4)
        assert rel < 1e-4, f"coordinate {i}: analytic {grad[i]}, fd {fd}"


def test_nll_includes_l2_penalty():
    feature_ids, labels, batch, theta = _fd_instance()
    v1, _ = _nll_at(theta, feature_ids, labels, batch, sigma=1.0)
    v10, _ = _nll_at(theta, feature_ids, labels, batch, sigma=10.0)
    penalty_diff = theta.dot(theta) / 2 * (1 - 1 / 100)
    assert v1 - v10 == pytest.approx(penalty_diff, rel=1e-12)
