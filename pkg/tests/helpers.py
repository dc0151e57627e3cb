"""Shared test fixtures: brute-force oracles and synthetic corpora.

The oracles enumerate every label sequence, so they stay independent of
the dynamic-programming code they check.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from crfner.corpus import Corpus, Sentence, Token


def sent(surfaces, poses=None, chunks=None, labels=None) -> Sentence:
    n = len(surfaces)
    poses = poses or ["NN"] * n
    chunks = chunks or ["B-NP"] * n
    labels = labels if labels is not None else [None] * n
    return Sentence(tuple(
        Token(s, p, c, l) for s, p, c, l in zip(surfaces, poses, chunks, labels)
    ))


def corpus_of(*sentences) -> Corpus:
    return Corpus(tuple(sentences))


def path_score(seq, node, trans, start) -> float:
    s = start[seq[0]] + node[0][seq[0]]
    for t in range(1, len(seq)):
        s += trans[seq[t - 1]][seq[t]] + node[t][seq[t]]
    return float(s)


def enum_scores(node, trans, start):
    """Every label sequence with its path score, by plain enumeration."""
    T, L = node.shape
    seqs = np.array(list(product(range(L), repeat=T)), dtype=np.intp)
    seqs = seqs.reshape(L**T, T)
    scores = start[seqs[:, 0]].astype(float)
    for t in range(T):
        scores = scores + node[t, seqs[:, t]]
    for t in range(1, T):
        scores = scores + trans[seqs[:, t - 1], seqs[:, t]]
    return seqs, scores


def brute_logz(node, trans, start) -> float:
    _, scores = enum_scores(node, trans, start)
    m = scores.max()
    return float(m + math.log(np.exp(scores - m).sum()))


def brute_marginals(node, trans, start):
    T, L = node.shape
    seqs, scores = enum_scores(node, trans, start)
    w = np.exp(scores - scores.max())
    w /= w.sum()
    unary = np.zeros((T, L))
    pair = np.zeros((T - 1, L, L))
    for t in range(T):
        np.add.at(unary, (t, seqs[:, t]), w)
    for t in range(T - 1):
        np.add.at(pair, (t, seqs[:, t], seqs[:, t + 1]), w)
    return unary, pair


def brute_viterbi(node, trans, start):
    """Exhaustive argmax under the decoder's tie rule.

    Lowest-index backpointer decisions mean that among max-scoring paths
    the decoder returns the one whose labels, read from the last position
    backwards, are lexicographically smallest.
    """
    seqs, scores = enum_scores(node, trans, start)
    best = scores.max()
    candidates = seqs[scores == best]
    winner = min(map(list, candidates), key=lambda q: q[::-1])
    return winner, float(best)


def random_lattice(rng, max_len=6, max_labels=4, lo=-3.0, hi=3.0):
    T = int(rng.integers(1, max_len + 1))
    L = int(rng.integers(2, max_labels + 1))
    node = rng.uniform(lo, hi, (T, L))
    trans = rng.uniform(lo, hi, (L, L))
    start = rng.uniform(lo, hi, L)
    return node, trans, start


NAME_WORDS = [f"nam{i:02d}" for i in range(6)]
FILLER_WORDS = [f"tok{i:02d}" for i in range(14)]


def person_corpus(n_sentences, seed) -> Corpus:
    """Separable synthetic data: name-list words are always PER.

    Labels are a pure function of the surfaces (B-PER on a name word not
    preceded by one, I-PER otherwise, O elsewhere), so a 20-word
    vocabulary makes the task fully learnable.
    """
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(n_sentences):
        length = int(rng.integers(4, 11))
        surfaces = []
        while len(surfaces) < length:
            if rng.random() < 0.22:
                for _ in range(int(rng.integers(1, 3))):
                    surfaces.append(NAME_WORDS[int(rng.integers(len(NAME_WORDS)))])
            else:
                surfaces.append(FILLER_WORDS[int(rng.integers(len(FILLER_WORDS)))])
        surfaces = surfaces[:length]
        poses, chunks, labels = [], [], []
        for i, w in enumerate(surfaces):
            if w in NAME_WORDS:
                first = i == 0 or surfaces[i - 1] not in NAME_WORDS
                labels.append("B-PER" if first else "I-PER")
                poses.append("NNP")
                chunks.append("B-NP" if first else "I-NP")
            else:
                labels.append("O")
                poses.append("VB" if rng.random() < 0.2 else "NN")
                chunks.append("B-NP")
        sentences.append(sent(surfaces, poses, chunks, labels))
    return Corpus(tuple(sentences))


GAZ_ENTITY_PAIRS = [("aroo", "bqee"), ("cmii", "dwuu")]
GAZ_DECOY_PAIRS = [("aroo", "dwuu"), ("cmii", "bqee")]
GAZ_FILLERS = [f"fil{i:02d}" for i in range(8)]


def gazetteer_corpus(n_sentences, seed) -> Corpus:
    """Data where entity-hood is an XOR over word pairs.

    Entity bigrams and decoy bigrams reuse the same four surfaces, so no
    additive combination of single-word features separates them; the
    span-matching gazetteer flag does.
    """
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(n_sentences):
        n_lead = int(rng.integers(1, 4))
        n_trail = int(rng.integers(1, 4))
        lead = [GAZ_FILLERS[int(rng.integers(len(GAZ_FILLERS)))] for _ in range(n_lead)]
        trail = [GAZ_FILLERS[int(rng.integers(len(GAZ_FILLERS)))] for _ in range(n_trail)]
        is_entity = bool(rng.integers(2))
        pair = (GAZ_ENTITY_PAIRS if is_entity else GAZ_DECOY_PAIRS)[int(rng.integers(2))]
        surfaces = lead + list(pair) + trail
        labels = (["O"] * n_lead
                  + (["B-PER", "I-PER"] if is_entity else ["O", "O"])
                  + ["O"] * n_trail)
        poses = ["NN"] * n_lead + ["NNP", "NNP"] + ["NN"] * n_trail
        sentences.append(sent(surfaces, poses, None, labels))
    return Corpus(tuple(sentences))


def write_gazetteer_file(path):
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in GAZ_ENTITY_PAIRS:
            fh.write(f"{a} {b}\n")
