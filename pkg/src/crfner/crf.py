"""Linear-chain CRF: lattices, inference, training, decoding.

Parameters are unigram weights (feature x label) plus a transition
matrix with a virtual start row; see model.Model.  The flat parameter
vector used during optimization is unigram.ravel() followed by
trans_full.ravel().
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import Corpus, validate_bio, with_labels
from .features import FeatureConfig, FeatureVector, extract_sentence, sentence_matches
from .model import Model, _config_to_dict
from .optimize import minimize_lbfgs


@dataclass(frozen=True)
class Lattice:
    node_scores: np.ndarray   # (T, L) log-potentials
    transitions: np.ndarray   # (L, L)
    start_scores: np.ndarray  # (L,)

    def __post_init__(self):
        node = np.ascontiguousarray(self.node_scores, dtype=np.float64)
        object.__setattr__(self, "node_scores", node)
        if node.ndim != 2 or node.shape[0] < 1:
            raise ValueError("node_scores must be (length, n_labels) with length >= 1")
        if self.transitions.shape != (node.shape[1], node.shape[1]):
            raise ValueError("transition shape mismatch")
        if self.start_scores.shape != (node.shape[1],):
            raise ValueError("start score shape mismatch")
        if not np.isfinite(node).all():
            raise ValueError("node scores must be finite")

    @property
    def length(self) -> int:
        return self.node_scores.shape[0]


def _encode(vectors: list[FeatureVector], feature_index) -> tuple:
    """CSR arrays (ids, values, offsets) for one sentence.

    Features absent from the index are dropped, which makes them score
    zero everywhere.
    """
    ids: list[int] = []
    vals: list[float] = []
    offsets = [0]
    for vec in vectors:
        for fid, value in vec:
            dense = feature_index.get(fid)
            if dense is not None:
                ids.append(dense)
                vals.append(value)
        offsets.append(len(ids))
    return (
        np.asarray(ids, dtype=np.int64),
        np.asarray(vals, dtype=np.float64),
        np.asarray(offsets, dtype=np.int64),
    )


def build_lattice(model: Model, vectors: list[FeatureVector]) -> Lattice:
    if not vectors:
        raise ValueError("cannot build a lattice from an empty vector list")
    ids, vals, offsets = _encode(vectors, model.feature_index)
    node = kernels.build_node_scores(model.unigram, ids, vals, offsets)
    return Lattice(node, model.transitions, model.start_weights)


def log_partition(lattice: Lattice) -> float:
    return kernels.log_partition(
        lattice.node_scores, lattice.transitions, lattice.start_scores
    )


def marginals(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """Per-position label marginals (T, L) and edge marginals (T-1, L, L)."""
    _, unary, pair = kernels.posteriors(
        lattice.node_scores, lattice.transitions, lattice.start_scores
    )
    return unary, pair


def decode_lattice(lattice: Lattice) -> tuple[list[int], float]:
    path, score = kernels.viterbi_path(
        lattice.node_scores, lattice.transitions, lattice.start_scores
    )
    return [int(y) for y in path], score


def viterbi(model: Model, vectors: list[FeatureVector]) -> tuple[list[str], float]:
    """Highest-scoring label sequence for one sentence's feature vectors."""
    if not vectors:
        raise ValueError("cannot decode an empty sentence")
    path, score = decode_lattice(build_lattice(model, vectors))
    return [model.labels[y] for y in path], score


def nll_and_gradient(model: Model,
                     batch: list[tuple[list[FeatureVector], list[int]]]
                     ) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its flat gradient.

    Each batch item is (feature vectors, gold label ids).  The value is
    sum over sentences of (logZ - gold path score) plus ||w||^2/(2 sigma^2);
    the gradient stacks unigram then transition components.
    """
    L = len(model.labels)
    encoded = []
    for vectors, gold in batch:
        if not vectors:
            raise ValueError("batch contains an empty sentence")
        if len(vectors) != len(gold):
            raise ValueError("gold length does not match vector list")
        gold = np.asarray(gold, dtype=np.int64)
        if gold.size and (gold.min() < 0 or gold.max() >= L):
            raise ValueError("gold label id out of range")
        encoded.append((_encode(vectors, model.feature_index), gold))
    theta = np.concatenate([model.unigram.ravel(), model.trans_full.ravel()])
    value, grad = _objective(
        theta, model.unigram.shape[0], L, encoded, model.l2_sigma
    )
    return value, grad


def _objective(theta, n_features, n_labels, encoded, l2_sigma):
    split = n_features * n_labels
    unigram = theta[:split].reshape(n_features, n_labels)
    trans_full = theta[split:].reshape(n_labels + 1, n_labels)
    grad = np.zeros_like(theta)
    g_unigram = grad[:split].reshape(n_features, n_labels)
    g_trans = grad[split:].reshape(n_labels + 1, n_labels)
    value = 0.0
    for (ids, vals, offsets), gold in encoded:
        value += kernels.sequence_nll_grad(
            unigram, trans_full, ids, vals, offsets, gold, g_unigram, g_trans
        )
    value += theta.dot(theta) / (2.0 * l2_sigma**2)
    grad += theta / l2_sigma**2
    return value, grad


def _freeze_alphabet(sentence_vectors, cutoff: int):
    counts: dict[str, int] = {}
    for vectors in sentence_vectors:
        for vec in vectors:
            for fid, _ in vec:
                counts[fid] = counts.get(fid, 0) + 1
    # dense ids in first-occurrence order, skipping rare features
    index: dict[str, int] = {}
    for vectors in sentence_vectors:
        for vec in vectors:
            for fid, _ in vec:
                if fid not in index and counts[fid] >= cutoff:
                    index[fid] = len(index)
    return index


def train(corpus: Corpus, cfg: FeatureConfig, gazetteers=None, *,
          l2_sigma: float = 10.0, max_iter: int = 200, tol: float = 1e-5,
          feature_cutoff: int = 1, history_size: int = 10,
          progress=None) -> Model:
    """Penalized maximum-likelihood training with L-BFGS from zero weights.

    The feature alphabet is frozen from the training corpus; gazetteers is
    a mapping of name -> Gazetteer covering cfg.gazetteers.  Raises if the
    corpus is empty, unlabeled, or fails BIO validation.
    """
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.labeled:
        raise ValueError("training corpus must be labeled")
    _, violations = validate_bio(corpus, repair=False)
    if violations:
        v = violations[0]
        raise ValueError(
            f"corpus is not BIO-valid ({len(violations)} stray I- labels, first at "
            f"sentence {v.sentence} position {v.position}); run validate_bio "
            f"with repair to fix"
        )

    labels = tuple(sorted(corpus.labels))
    label_index = {y: i for i, y in enumerate(labels)}
    gazetteers = dict(gazetteers or {})

    sentence_vectors = []
    gold_ids = []
    for sent in corpus:
        matches = sentence_matches(sent, cfg, gazetteers)
        sentence_vectors.append(extract_sentence(sent, cfg, matches))
        gold_ids.append(
            np.asarray([label_index[t.ne] for t in sent.tokens], dtype=np.int64)
        )

    feature_index = _freeze_alphabet(sentence_vectors, feature_cutoff)
    feature_ids = tuple(feature_index)
    encoded = [
        (_encode(vectors, feature_index), gold)
        for vectors, gold in zip(sentence_vectors, gold_ids)
    ]

    F, L = len(feature_ids), len(labels)
    theta0 = np.zeros(F * L + (L + 1) * L)
    result = minimize_lbfgs(
        lambda th: _objective(th, F, L, encoded, l2_sigma),
        theta0,
        history_size=history_size,
        max_iter=max_iter,
        tol=tol,
        callback=progress,
    )

    split = F * L
    config_hash = hashlib.sha256(json.dumps(
        {"features": _config_to_dict(cfg), "l2_sigma": l2_sigma,
         "max_iter": max_iter, "tol": tol, "feature_cutoff": feature_cutoff},
        sort_keys=True,
    ).encode("utf-8")).hexdigest()

    active = {name: gazetteers[name] for name in cfg.gazetteers if name in gazetteers}
    return Model(
        labels=labels,
        feature_ids=feature_ids,
        unigram=result.x[:split].reshape(F, L).copy(),
        trans_full=result.x[split:].reshape(L + 1, L).copy(),
        l2_sigma=l2_sigma,
        config=cfg,
        gazetteers=active,
        metadata={
            "iterations": result.iterations,
            "objective": result.fval,
            "objective_history": result.history,
            "converged": result.converged,
            "stop_reason": result.message,
            "config_sha256": config_hash,
            "backend": kernels.BACKEND,
            "n_sentences": len(corpus),
            "n_features": F,
        },
    )


def tag_corpus(model: Model, corpus: Corpus) -> Corpus:
    """Viterbi-tag every sentence using the model's own config and gazetteers."""
    predicted = []
    for sent in corpus:
        matches = sentence_matches(sent, model.config, model.gazetteers)
        vectors = extract_sentence(sent, model.config, matches)
        labels, _ = viterbi(model, vectors)
        predicted.append(labels)
    return with_labels(corpus, predicted)
