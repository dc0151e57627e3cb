"""Column-format annotated corpora and the BIO label scheme.

A corpus file is UTF-8 text, one token per line, blank lines between
sentences.  Labeled files carry four whitespace-separated columns
(surface, POS, chunk, NE label), unlabeled files three.  Reading accepts
any run of tabs/spaces as the separator and LF or CRLF line ends; writing
emits single tabs and LF.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

_NE_PATTERN = re.compile(r"^(O|[BI]-.+)$")


class ParseError(ValueError):
    """Malformed corpus file; message carries path and line number."""


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    chunk: str
    ne: str | None = None

    def __post_init__(self):
        if not self.surface or re.search(r"\s", self.surface):
            raise ValueError(f"bad token surface: {self.surface!r}")
        if self.ne is not None and not _NE_PATTERN.match(self.ne):
            raise ValueError(f"bad NE label: {self.ne!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("empty sentence")
        labeled = sum(1 for t in self.tokens if t.ne is not None)
        if labeled not in (0, len(self.tokens)):
            raise ValueError("sentence mixes labeled and unlabeled tokens")

    def __len__(self):
        return len(self.tokens)

    @property
    def labeled(self) -> bool:
        return self.tokens[0].ne is not None

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def labels(self) -> list[str]:
        return [t.ne for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def labels(self) -> frozenset[str]:
        """Exact set of NE labels observed over all tokens (empty if unlabeled)."""
        return frozenset(
            t.ne for s in self.sentences for t in s.tokens if t.ne is not None
        )

    @property
    def labeled(self) -> bool:
        return bool(self.sentences) and self.sentences[0].labeled


@dataclass(frozen=True)
class BioViolation:
    """A stray I-X label, i.e. one not preceded by B-X or I-X."""

    sentence: int
    position: int
    label: str


@dataclass(frozen=True)
class CorpusStats:
    sentence_count: int
    token_count: int
    label_histogram: dict[str, int]


def parse_column_file(path, labeled: bool) -> Corpus:
    """Parse a column-format file into a Corpus.

    `labeled` fixes the expected column count (4 vs 3); any line with a
    different count raises ParseError naming the line.  An empty file
    yields an empty Corpus.
    """
    want = 4 if labeled else 3
    sentences: list[Sentence] = []
    pending: list[Token] = []
    with open(path, encoding="utf-8", newline=None) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                if pending:
                    sentences.append(Sentence(tuple(pending)))
                    pending = []
                continue
            cols = line.split()
            if len(cols) != want:
                raise ParseError(
                    f"{path}:{lineno}: expected {want} columns, got {len(cols)}"
                )
            ne = cols[3] if labeled else None
            if labeled and not _NE_PATTERN.match(ne):
                raise ParseError(
                    f"{path}:{lineno}: NE label must be O or B-/I-<TYPE>, got {ne!r}"
                )
            pending.append(Token(cols[0], cols[1], cols[2], ne))
    if pending:
        sentences.append(Sentence(tuple(pending)))
    return Corpus(tuple(sentences))


def write_column_file(corpus: Corpus, path) -> None:
    """Write a Corpus back out; inverse of parse_column_file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in corpus:
            for tok in sent.tokens:
                cols = [tok.surface, tok.pos, tok.chunk]
                if tok.ne is not None:
                    cols.append(tok.ne)
                fh.write("\t".join(cols) + "\n")
            fh.write("\n")


def validate_bio(corpus: Corpus, repair: bool = False) -> tuple[Corpus, list[BioViolation]]:
    """Check (and optionally repair) BIO chain consistency.

    A violation is an I-X whose predecessor is neither B-X nor I-X.  With
    repair=True each such label is rewritten to B-X and the repaired corpus
    is returned; otherwise the corpus comes back unchanged.
    """
    if not corpus.labeled:
        raise ValueError("validate_bio requires a labeled corpus")
    violations: list[BioViolation] = []
    new_sentences: list[Sentence] = []
    for si, sent in enumerate(corpus):
        fixed: list[Token] = []
        prev = "O"
        for ti, tok in enumerate(sent.tokens):
            label = tok.ne
            if label.startswith("I-"):
                etype = label[2:]
                if prev not in (f"B-{etype}", f"I-{etype}"):
                    violations.append(BioViolation(si, ti, label))
                    if repair:
                        label = f"B-{etype}"
            prev = label
            fixed.append(tok if label == tok.ne else
                         Token(tok.surface, tok.pos, tok.chunk, label))
        new_sentences.append(Sentence(tuple(fixed)) if repair else sent)
    return (Corpus(tuple(new_sentences)) if repair else corpus), violations


def corpus_stats(corpus: Corpus) -> CorpusStats:
    hist: Counter[str] = Counter()
    tokens = 0
    for sent in corpus:
        tokens += len(sent)
        for tok in sent.tokens:
            if tok.ne is not None:
                hist[tok.ne] += 1
    return CorpusStats(len(corpus), tokens, dict(hist))


def nfc_normalize(corpus: Corpus) -> Corpus:
    """Apply NFC normalization to every field of every token."""

    def norm(s):
        return None if s is None else unicodedata.normalize("NFC", s)

    return Corpus(tuple(
        Sentence(tuple(
            Token(norm(t.surface), norm(t.pos), norm(t.chunk), norm(t.ne))
            for t in sent.tokens
        ))
        for sent in corpus
    ))


def strip_labels(corpus: Corpus) -> Corpus:
    """Drop NE labels, producing an unlabeled corpus with identical tokens."""
    return Corpus(tuple(
        Sentence(tuple(Token(t.surface, t.pos, t.chunk) for t in sent.tokens))
        for sent in corpus
    ))


def with_labels(corpus: Corpus, labels: list[list[str]]) -> Corpus:
    """Attach per-sentence label sequences to an unlabeled corpus."""
    if len(labels) != len(corpus):
        raise ValueError("label sequence count does not match corpus")
    sentences = []
    for sent, seq in zip(corpus, labels):
        if len(seq) != len(sent):
            raise ValueError("label sequence length does not match sentence")
        sentences.append(Sentence(tuple(
            Token(t.surface, t.pos, t.chunk, ne)
            for t, ne in zip(sent.tokens, seq)
        )))
    return Corpus(tuple(sentences))
