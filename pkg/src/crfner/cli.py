"""Batch command line: train, tag, eval, stats.

Exit codes are stable for scripting: 0 success, 1 runtime failure
(training, parsing, scoring), 2 usage or configuration error (missing
flags or files, unknown config keys).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import crf, evaluate
from .config import ConfigError, parse_config_file, resolve_gazetteers
from .corpus import (
    ParseError,
    corpus_stats,
    nfc_normalize,
    parse_column_file,
    validate_bio,
    write_column_file,
)
from .gazetteer import load_gazetteer
from .model import ModelLoadError, load_model, save_model

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _fail(code: int, message: str) -> int:
    print(f"crfner: {message}", file=sys.stderr)
    return code


def _require_files(*paths) -> str | None:
    for p in paths:
        if p is not None and not os.path.isfile(p):
            return p
    return None


def _load_corpus(path, labeled: bool, nfc: bool):
    corpus = parse_column_file(path, labeled=labeled)
    return nfc_normalize(corpus) if nfc else corpus


def _sniff_columns(path) -> int | None:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                return len(line.split())
    return None


def _gazetteer_flags(pairs) -> dict[str, str]:
    out = {}
    for pair in pairs or []:
        name, sep, path = pair.partition("=")
        if not sep or not name or not path:
            raise ConfigError(f"--gazetteer expects name=path, got {pair!r}")
        out[name] = path
    return out


def run_train(args) -> int:
    try:
        run = parse_config_file(args.config)
        run.gazetteer_paths.update(_gazetteer_flags(args.gazetteer))
        active = resolve_gazetteers(run)
    except ConfigError as exc:
        return _fail(USAGE_ERROR, str(exc))
    except OSError as exc:
        return _fail(USAGE_ERROR, f"cannot read config: {exc}")

    gaz_files = [run.gazetteer_paths[name] for name in active]
    missing = _require_files(args.train, args.dev, *gaz_files)
    if missing is not None:
        return _fail(USAGE_ERROR, f"no such file: {missing}")
    for name in run.gazetteer_paths:
        if name not in active:
            print(f"crfner: note: gazetteer {name!r} has a file but is not "
                  f"active in this configuration", file=sys.stderr)

    from dataclasses import replace
    cfg = replace(run.feature, gazetteers=active)

    try:
        corpus = _load_corpus(args.train, labeled=True, nfc=args.nfc)
        if args.repair_bio:
            corpus, repaired = validate_bio(corpus, repair=True)
            if repaired:
                print(f"crfner: repaired {len(repaired)} stray I- labels",
                      file=sys.stderr)
        gazetteers = {
            name: load_gazetteer(run.gazetteer_paths[name], name,
                                 run.fold_case_for(name))
            for name in active
        }
        model = crf.train(
            corpus, cfg, gazetteers,
            l2_sigma=run.l2_sigma, max_iter=run.max_iter, tol=run.tol,
            feature_cutoff=run.feature_cutoff,
        )
        save_model(model, args.model_out)
    except (ParseError, ValueError, OSError) as exc:
        return _fail(RUNTIME_ERROR, str(exc))

    meta = model.metadata
    print(f"trained {meta['n_features']} features over {len(model.labels)} labels "
          f"in {meta['iterations']} iterations "
          f"(objective {meta['objective']:.4f}, backend {meta['backend']})")
    print(f"model written to {args.model_out}")

    if args.dev:
        try:
            gold = _load_corpus(args.dev, labeled=True, nfc=args.nfc)
            pred = crf.tag_corpus(model, gold)
            report = evaluate.score(gold, pred)
        except (ParseError, ValueError) as exc:
            return _fail(RUNTIME_ERROR, f"dev evaluation failed: {exc}")
        print(evaluate.format_table(report))
    return 0


def run_tag(args) -> int:
    missing = _require_files(args.model, args.input)
    if missing is not None:
        return _fail(USAGE_ERROR, f"no such file: {missing}")
    try:
        model = load_model(args.model)
    except ModelLoadError as exc:
        return _fail(RUNTIME_ERROR, str(exc))
    try:
        corpus = _load_corpus(args.input, labeled=False, nfc=args.nfc)
    except ParseError as exc:
        # tag input must be 3-column; a labeled file is a usage mistake
        return _fail(USAGE_ERROR, str(exc))
    try:
        tagged = crf.tag_corpus(model, corpus)
        write_column_file(tagged, args.output)
    except (ValueError, OSError) as exc:
        return _fail(RUNTIME_ERROR, str(exc))
    return 0


def run_eval(args) -> int:
    missing = _require_files(args.gold, args.pred)
    if missing is not None:
        return _fail(USAGE_ERROR, f"no such file: {missing}")
    try:
        gold = _load_corpus(args.gold, labeled=True, nfc=args.nfc)
        pred = _load_corpus(args.pred, labeled=True, nfc=args.nfc)
        report = evaluate.score(gold, pred)
    except (ParseError, ValueError) as exc:
        return _fail(RUNTIME_ERROR, str(exc))
    print(evaluate.format_records(report) if args.records
          else evaluate.format_table(report))
    return 0


def run_stats(args) -> int:
    missing = _require_files(args.input)
    if missing is not None:
        return _fail(USAGE_ERROR, f"no such file: {missing}")
    try:
        columns = _sniff_columns(args.input)
        corpus = _load_corpus(args.input, labeled=(columns == 4), nfc=args.nfc)
    except ParseError as exc:
        return _fail(RUNTIME_ERROR, str(exc))
    stats = corpus_stats(corpus)
    print(f"sentences: {stats.sentence_count}")
    print(f"tokens: {stats.token_count}")
    for label in sorted(stats.label_histogram):
        print(f"label {label}: {stats.label_histogram[label]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crfner",
        description="Linear-chain CRF named-entity recognizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a labeled corpus")
    p.add_argument("--train", required=True, help="labeled 4-column training file")
    p.add_argument("--config", required=True, help="key=value configuration file")
    p.add_argument("--model-out", required=True, help="where to write the model")
    p.add_argument("--gazetteer", action="append", metavar="NAME=PATH",
                   help="gazetteer file; repeatable")
    p.add_argument("--dev", help="labeled file to score after training")
    p.add_argument("--repair-bio", action="store_true",
                   help="rewrite stray I- labels to B- before training")
    p.add_argument("--nfc", action="store_true",
                   help="apply NFC normalization to input text")
    p.set_defaults(func=run_train)

    p = sub.add_parser("tag", help="label an unlabeled corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="unlabeled 3-column file")
    p.add_argument("--output", required=True, help="4-column output path")
    p.add_argument("--nfc", action="store_true")
    p.set_defaults(func=run_tag)

    p = sub.add_parser("eval", help="entity-level scoring of pred against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--records", action="store_true",
                   help="machine-readable key=value lines instead of a table")
    p.add_argument("--nfc", action="store_true")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("stats", help="sentence/token counts and label histogram")
    p.add_argument("--input", required=True)
    p.add_argument("--nfc", action="store_true")
    p.set_defaults(func=run_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
