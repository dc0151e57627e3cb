"""Linear-chain CRF toolkit for named-entity recognition.

Corpus handling, gazetteer matching, sparse feature extraction, CRF
training/decoding, and entity-level evaluation, usable as a library or
through the `crfner` command line.
"""

from .corpus import (
    Corpus,
    ParseError,
    Sentence,
    Token,
    corpus_stats,
    parse_column_file,
    validate_bio,
    write_column_file,
)
from .crf import (
    Lattice,
    build_lattice,
    decode_lattice,
    log_partition,
    marginals,
    nll_and_gradient,
    tag_corpus,
    train,
    viterbi,
)
from .evaluate import EvalReport, extract_entities, f_measure, score
from .features import FeatureConfig, extract_features
from .gazetteer import Gazetteer, load_gazetteer, match_spans
from .kernels import BACKEND
from .model import Model, ModelLoadError, load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Corpus",
    "EvalReport",
    "FeatureConfig",
    "Gazetteer",
    "Lattice",
    "Model",
    "ModelLoadError",
    "ParseError",
    "Sentence",
    "Token",
    "build_lattice",
    "corpus_stats",
    "decode_lattice",
    "extract_entities",
    "extract_features",
    "f_measure",
    "load_gazetteer",
    "load_model",
    "log_partition",
    "marginals",
    "match_spans",
    "nll_and_gradient",
    "parse_column_file",
    "save_model",
    "score",
    "tag_corpus",
    "train",
    "validate_bio",
    "viterbi",
    "write_column_file",
]
