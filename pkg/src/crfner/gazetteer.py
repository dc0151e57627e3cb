"""Name-list gazetteers with longest leftmost span matching.

Entries are token sequences indexed in a nested-dict prefix tree, so
scanning a sentence costs O(length x longest entry) lookups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_END = ""  # marker key: entry terminates at this trie node


@dataclass(frozen=True)
class Gazetteer:
    name: str
    entries: frozenset[tuple[str, ...]]
    fold_case: bool = False
    _trie: dict = field(default_factory=dict, repr=False, compare=False)
    _vocab: frozenset[str] = field(default=frozenset(), repr=False, compare=False)

    @staticmethod
    def build(name: str, entries, fold_case: bool = False) -> "Gazetteer":
        normalized = set()
        for entry in entries:
            toks = tuple(t.casefold() if fold_case else t for t in entry)
            if not toks or any(not t for t in toks):
                raise ValueError(f"gazetteer {name!r}: entry with empty token")
            normalized.add(toks)
        trie: dict = {}
        vocab = set()
        for toks in sorted(normalized):
            node = trie
            for t in toks:
                node = node.setdefault(t, {})
                vocab.add(t)
            node[_END] = True
        return Gazetteer(name, frozenset(normalized), fold_case, trie, frozenset(vocab))

    def __len__(self):
        return len(self.entries)


def load_gazetteer(path, name: str, fold_case: bool = False) -> Gazetteer:
    """Load one name per line; internal whitespace splits multi-token names.

    Blank lines are skipped and duplicates (after optional case folding)
    merge into one entry.
    """
    entries = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            toks = raw.split()
            if toks:
                entries.append(toks)
    return Gazetteer.build(name, entries, fold_case)


def match_spans(gaz: Gazetteer, surfaces, fold_case: bool | None = None,
                mode: str = "span") -> list[str]:
    """Flag each token B/I/O by greedy left-to-right longest entry match.

    At every unconsumed position the longest entry starting there is taken
    and flagged B, I, I...; matches never overlap.  mode="token" instead
    flags B on any token that occurs anywhere in the gazetteer's entries.
    `surfaces` may be a Sentence or a plain list of token strings.
    """
    if hasattr(surfaces, "tokens"):
        surfaces = [t.surface for t in surfaces.tokens]
    if fold_case is None:
        fold_case = gaz.fold_case
    words = [w.casefold() for w in surfaces] if fold_case else list(surfaces)
    n = len(words)
    flags = ["O"] * n

    if mode == "token":
        for i, w in enumerate(words):
            if w in gaz._vocab:
                flags[i] = "B"
        return flags
    if mode != "span":
        raise ValueError(f"unknown gazetteer match mode: {mode!r}")

    i = 0
    while i < n:
        node = gaz._trie
        best = 0
        j = i
        while j < n and words[j] in node:
            node = node[words[j]]
            j += 1
            if _END in node:
                best = j - i
        if best:
            flags[i] = "B"
            for k in range(i + 1, i + best):
                flags[k] = "I"
            i += best
        else:
            i += 1
    return flags
