"""Sparse per-token feature extraction.

Feature families, each gated by a FeatureConfig toggle and namespaced in
the feature-id string:

  w[k]=      context word identities at relative offsets -window..+window,
             with BOS/EOS sentinels past the sentence edge
  preK=/sufK= prefixes and suffixes of the current word, K code points,
             affix_min..affix_max (optionally only for POS == "NNP")
  pos[k]=    POS tags at offsets -1..+1
  chunk[k]=  chunk tags at offsets -1..+1
  first      sentence-initial indicator
  penult     penultimate-token indicator (index == len-2)
  digit      some code point is a decimal digit
  posn       real-valued relative position, index/(len-1), in [0,1]
  verb=      surface of the nearest verb-tagged token (rightward on ties)
  gaz:N:F    gazetteer N matched here with flag F in {B, I}
  cap        first code point is an uppercase letter

All values are 1.0 except posn.  Vectors come back sorted by feature id,
so identical inputs produce identical vectors, entries included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_VERB_TAGS = frozenset(
    {"VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "VM", "VAUX"}
)

FeatureVector = list[tuple[str, float]]


@dataclass(frozen=True)
class FeatureConfig:
    context_window: int = 1
    affix_min: int = 3
    affix_max: int = 5
    affix_nnp_only: bool = False
    use_pos: bool = True
    use_chunk: bool = True
    use_boundary: bool = True
    use_digit: bool = True
    use_position: bool = True
    use_verb: bool = True
    verb_tags: frozenset[str] = DEFAULT_VERB_TAGS
    use_capital: bool = False
    gazetteers: tuple[str, ...] = ()
    gaz_match: str = "span"

    def __post_init__(self):
        if not 0 < self.affix_min <= self.affix_max:
            raise ValueError("need 0 < affix_min <= affix_max")
        if not 0 <= self.context_window <= 4:
            raise ValueError("context_window must be in 0..4")
        if self.gaz_match not in ("span", "token"):
            raise ValueError(f"unknown gaz_match: {self.gaz_match!r}")
        if len(set(self.gazetteers)) != len(self.gazetteers):
            raise ValueError("duplicate gazetteer name")


def affixes(word: str, min_len: int, max_len: int) -> list[tuple[str, str]]:
    """(kind, substring) pairs for each length min_len..min(max_len, len).

    Lengths count Unicode code points; a word shorter than min_len yields
    nothing.
    """
    out = []
    for k in range(min_len, min(max_len, len(word)) + 1):
        out.append(("prefix", word[:k]))
        out.append(("suffix", word[-k:]))
    return out


def has_digit(word: str) -> bool:
    return any(c.isdecimal() for c in word)


def is_capitalized(word: str) -> bool:
    if not word:
        raise ValueError("empty word")
    return word[0].isupper()


def position_value(index: int, sentence_len: int) -> float:
    if sentence_len > 1:
        return index / (sentence_len - 1)
    return 0.0


def nearest_verb(sentence, index: int, verb_tags) -> str | None:
    """Surface of the closest verb-tagged token; the following one on ties."""
    tokens = sentence.tokens
    n = len(tokens)
    if tokens[index].pos in verb_tags:
        return tokens[index].surface
    for d in range(1, n):
        right = index + d
        if right < n and tokens[right].pos in verb_tags:
            return tokens[right].surface
        left = index - d
        if left >= 0 and tokens[left].pos in verb_tags:
            return tokens[left].surface
    return None


def _offset(k: int) -> str:
    return f"+{k}" if k > 0 else str(k)


def _at(values: list[str], i: int) -> str:
    if i < 0:
        return "BOS"
    if i >= len(values):
        return "EOS"
    return values[i]


def extract_features(sentence, index: int, cfg: FeatureConfig,
                     matches: dict[str, list[str]] | None = None) -> FeatureVector:
    """Feature vector for one token position.

    `matches` maps gazetteer name to its per-token B/I/O flags (from
    gazetteer.match_spans); names in cfg.gazetteers missing from it
    simply emit nothing.
    """
    tokens = sentence.tokens
    n = len(tokens)
    tok = tokens[index]
    surfaces = [t.surface for t in tokens]
    out: FeatureVector = []

    for k in range(-cfg.context_window, cfg.context_window + 1):
        out.append((f"w[{_offset(k)}]={_at(surfaces, index + k)}", 1.0))

    if not cfg.affix_nnp_only or tok.pos == "NNP":
        for kind, sub in affixes(tok.surface, cfg.affix_min, cfg.affix_max):
            out.append((f"{kind[:3]}{len(sub)}={sub}", 1.0))

    if cfg.use_pos:
        poses = [t.pos for t in tokens]
        for k in (-1, 0, 1):
            out.append((f"pos[{_offset(k)}]={_at(poses, index + k)}", 1.0))

    if cfg.use_chunk:
        chunks = [t.chunk for t in tokens]
        for k in (-1, 0, 1):
            out.append((f"chunk[{_offset(k)}]={_at(chunks, index + k)}", 1.0))

    if cfg.use_boundary:
        if index == 0:
            out.append(("first", 1.0))
        if n >= 2 and index == n - 2:
            out.append(("penult", 1.0))

    if cfg.use_digit and has_digit(tok.surface):
        out.append(("digit", 1.0))

    if cfg.use_position:
        out.append(("posn", position_value(index, n)))

    if cfg.use_verb:
        verb = nearest_verb(sentence, index, cfg.verb_tags)
        if verb is not None:
            out.append((f"verb={verb}", 1.0))

    if matches:
        for name in cfg.gazetteers:
            flags = matches.get(name)
            if flags is not None and flags[index] != "O":
                out.append((f"gaz:{name}:{flags[index]}", 1.0))

    if cfg.use_capital and is_capitalized(tok.surface):
        out.append(("cap", 1.0))

    out.sort(key=lambda e: e[0])
    return out


def extract_sentence(sentence, cfg: FeatureConfig,
                     matches: dict[str, list[str]] | None = None) -> list[FeatureVector]:
    return [extract_features(sentence, i, cfg, matches) for i in range(len(sentence))]


def sentence_matches(sentence, cfg: FeatureConfig, gazetteers) -> dict[str, list[str]]:
    """B/I/O flag arrays for each configured gazetteer, keyed by name."""
    from .gazetteer import match_spans

    out = {}
    for name in cfg.gazetteers:
        gaz = gazetteers.get(name) if gazetteers else None
        if gaz is not None:
            out[name] = match_spans(gaz, sentence, mode=cfg.gaz_match)
    return out
