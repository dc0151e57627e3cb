#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot operations (posterior computation, Viterbi decoding,
and the per-sentence NLL/gradient pass that dominates training) on
synthetic workloads and prints the speedup.

    python benchmarks/bench_kernels.py [--sentences N] [--labels L] [--repeats R]
"""

import argparse
import time

import numpy as np

from crfner.kernels import numpy_backend

try:
    from crfner.kernels import _native
except ImportError:
    _native = None


def make_workload(n_sentences, n_labels, n_features, rng):
    unigram = rng.normal(scale=0.3, size=(n_features, n_labels))
    trans_full = rng.normal(scale=0.3, size=(n_labels + 1, n_labels))
    sentences = []
    for _ in range(n_sentences):
        T = int(rng.integers(5, 25))
        per_pos = 12
        ids = np.concatenate(
            [rng.permutation(n_features)[:per_pos] for _ in range(T)]
        ).astype(np.int64)
        vals = np.ones(T * per_pos)
        offsets = np.arange(0, T * per_pos + 1, per_pos, dtype=np.int64)
        gold = rng.integers(0, n_labels, T).astype(np.int64)
        node = rng.normal(size=(T, n_labels))
        sentences.append((ids, vals, offsets, gold, node))
    return unigram, trans_full, sentences


def time_fn(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(backend, unigram, trans_full, sentences, repeats):
    L = trans_full.shape[1]
    trans, start = trans_full[:L], trans_full[L]

    def run_posteriors():
        for _, _, _, _, node in sentences:
            backend.posteriors(node, trans, start)

    def run_viterbi():
        for _, _, _, _, node in sentences:
            backend.viterbi_path(node, trans, start)

    def run_grad():
        gU = np.zeros_like(unigram)
        gT = np.zeros_like(trans_full)
        total = 0.0
        for ids, vals, offsets, gold, _ in sentences:
            total += backend.sequence_nll_grad(
                unigram, trans_full, ids, vals, offsets, gold, gU, gT)
        return total

    return {
        "posteriors": time_fn(run_posteriors, repeats),
        "viterbi": time_fn(run_viterbi, repeats),
        "nll+gradient": time_fn(run_grad, repeats),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sentences", type=int, default=500)
    parser.add_argument("--labels", type=int, default=9)
    parser.add_argument("--features", type=int, default=20000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    unigram, trans_full, sentences = make_workload(
        args.sentences, args.labels, args.features, rng)
    tokens = sum(len(s[3]) for s in sentences)
    print(f"workload: {args.sentences} sentences, {tokens} tokens, "
          f"{args.labels} labels, {args.features} features")

    numpy_times = bench(numpy_backend, unigram, trans_full, sentences, args.repeats)
    if _native is None:
        print("compiled kernels not built; showing numpy fallback only")
        for op, t in numpy_times.items():
            print(f"  {op:<14} numpy {t * 1e3:8.1f} ms")
        return

    native_times = bench(_native, unigram, trans_full, sentences, args.repeats)
    print(f"{'operation':<14} {'numpy':>10} {'native':>10} {'speedup':>8}")
    for op in numpy_times:
        tn, tc = numpy_times[op], native_times[op]
        print(f"{op:<14} {tn * 1e3:8.1f}ms {tc * 1e3:8.1f}ms {tn / tc:7.1f}x")


if __name__ == "__main__":
    main()
