"""Trained model container and its on-disk format.

Layout of a model file, all little-endian:

    bytes 0..6    magic b"CRFSEQ1"
    bytes 7..10   format version (u32)
    bytes 11..18  header length (u64)
    header        UTF-8 JSON: labels, feature alphabet, l2_sigma,
                  feature config, gazetteer entries, metadata
    payload       unigram weights then transition weights, raw float64
    last 32 bytes SHA-256 of everything before them

The transition matrix has one extra row: index |labels| is the virtual
start state, so trans[p, y] scores label y following p and trans[L, y]
scores y sentence-initially.  Feature config and gazetteers are embedded
so that tagging needs nothing but the model file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureConfig
from .gazetteer import Gazetteer

MAGIC = b"CRFSEQ1"
FORMAT_VERSION = 1


class ModelLoadError(Exception):
    pass


class BadMagicError(ModelLoadError):
    pass


class VersionError(ModelLoadError):
    pass


class TruncatedError(ModelLoadError):
    pass


class ChecksumError(ModelLoadError):
    pass


@dataclass
class Model:
    labels: tuple[str, ...]
    feature_ids: tuple[str, ...]
    unigram: np.ndarray        # (n_features, n_labels)
    trans_full: np.ndarray     # (n_labels + 1, n_labels), last row = start
    l2_sigma: float
    config: FeatureConfig
    gazetteers: dict[str, Gazetteer] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.labels or len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be nonempty and duplicate-free")
        L = len(self.labels)
        self.unigram = np.ascontiguousarray(self.unigram, dtype=np.float64)
        self.trans_full = np.ascontiguousarray(self.trans_full, dtype=np.float64)
        if self.unigram.shape != (len(self.feature_ids), L):
            raise ValueError("unigram weight shape mismatch")
        if self.trans_full.shape != (L + 1, L):
            raise ValueError("transition weight shape mismatch")
        if not (np.isfinite(self.unigram).all() and np.isfinite(self.trans_full).all()):
            raise ValueError("weights contain NaN or Inf")
        if self.l2_sigma <= 0:
            raise ValueError("l2_sigma must be positive")
        self.feature_index = {f: i for i, f in enumerate(self.feature_ids)}
        self.label_index = {y: i for i, y in enumerate(self.labels)}
        if len(self.feature_index) != len(self.feature_ids):
            raise ValueError("duplicate feature id")

    @property
    def transitions(self) -> np.ndarray:
        return self.trans_full[: len(self.labels)]

    @property
    def start_weights(self) -> np.ndarray:
        return self.trans_full[len(self.labels)]


def _config_to_dict(cfg: FeatureConfig) -> dict:
    return {
        "context_window": cfg.context_window,
        "affix_min": cfg.affix_min,
        "affix_max": cfg.affix_max,
        "affix_nnp_only": cfg.affix_nnp_only,
        "use_pos": cfg.use_pos,
        "use_chunk": cfg.use_chunk,
        "use_boundary": cfg.use_boundary,
        "use_digit": cfg.use_digit,
        "use_position": cfg.use_position,
        "use_verb": cfg.use_verb,
        "verb_tags": sorted(cfg.verb_tags),
        "use_capital": cfg.use_capital,
        "gazetteers": list(cfg.gazetteers),
        "gaz_match": cfg.gaz_match,
    }


def _config_from_dict(d: dict) -> FeatureConfig:
    d = dict(d)
    d["verb_tags"] = frozenset(d["verb_tags"])
    d["gazetteers"] = tuple(d["gazetteers"])
    return FeatureConfig(**d)


def save_model(model: Model, path) -> None:
    header = {
        "labels": list(model.labels),
        "features": list(model.feature_ids),
        "l2_sigma": model.l2_sigma,
        "config": _config_to_dict(model.config),
        "gazetteers": {
            name: {
                "fold_case": gaz.fold_case,
                "entries": sorted(list(e) for e in gaz.entries),
            }
            for name, gaz in sorted(model.gazetteers.items())
        },
        "metadata": model.metadata,
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += FORMAT_VERSION.to_bytes(4, "little")
    out += len(blob).to_bytes(8, "little")
    out += blob
    out += model.unigram.astype("<f8").tobytes()
    out += model.trans_full.astype("<f8").tobytes()
    out += hashlib.sha256(out).digest()
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def load_model(path) -> Model:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC):
        raise TruncatedError(f"{path}: file shorter than the magic string")
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: bad magic, not a model file")
    if len(data) < len(MAGIC) + 12 + 32:
        raise TruncatedError(f"{path}: header cut short")
    version = int.from_bytes(data[7:11], "little")
    if version != FORMAT_VERSION:
        raise VersionError(
            f"{path}: format version {version}, this build reads {FORMAT_VERSION}"
        )
    if hashlib.sha256(data[:-32]).digest() != data[-32:]:
        raise ChecksumError(f"{path}: checksum mismatch, file corrupted")

    header_len = int.from_bytes(data[11:19], "little")
    header_end = 19 + header_len
    if header_end + 32 > len(data):
        raise TruncatedError(f"{path}: header overruns file")
    try:
        header = json.loads(data[19:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"{path}: undecodable header: {exc}") from exc

    labels = tuple(header["labels"])
    features = tuple(header["features"])
    L, F = len(labels), len(features)
    need = (F * L + (L + 1) * L) * 8
    payload = data[header_end:-32]
    if len(payload) != need:
        raise TruncatedError(
            f"{path}: weight payload is {len(payload)} bytes, expected {need}"
        )
    flat = np.frombuffer(payload, dtype="<f8")
    unigram = flat[: F * L].reshape(F, L).copy()
    trans_full = flat[F * L:].reshape(L + 1, L).copy()
    gazetteers = {
        name: Gazetteer.build(name, g["entries"], g["fold_case"])
        for name, g in header["gazetteers"].items()
    }
    return Model(
        labels=labels,
        feature_ids=features,
        unigram=unigram,
        trans_full=trans_full,
        l2_sigma=float(header["l2_sigma"]),
        config=_config_from_dict(header["config"]),
        gazetteers=gazetteers,
        metadata=header["metadata"],
    )
