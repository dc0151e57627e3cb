"""Entity-level precision/recall/F scoring of BIO label sequences.

A predicted entity counts as correct only on an exact (start, end, type)
match against gold; overall figures are micro-averaged over the summed
counts, one row per entity type plus an overall row.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EntitySpan:
    start: int   # inclusive token index
    end: int     # exclusive
    etype: str

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("span must satisfy start < end")
        if not self.etype:
            raise ValueError("span needs a nonempty type")


@dataclass(frozen=True)
class TypeScore:
    gold_count: int
    pred_count: int
    correct_count: int

    @property
    def precision(self) -> float:
        return self.correct_count / self.pred_count if self.pred_count else 0.0

    @property
    def recall(self) -> float:
        return self.correct_count / self.gold_count if self.gold_count else 0.0

    @property
    def f1(self) -> float:
        return f_measure(self.precision, self.recall)


@dataclass(frozen=True)
class EvalReport:
    per_type: dict[str, TypeScore]
    overall: TypeScore


def extract_entities(labels) -> set[EntitySpan]:
    """Spans of maximal B-X (I-X)* runs; tolerant of malformed BIO.

    A stray I-X (no matching open span) starts a new span, and O closes
    whatever is open.
    """
    spans = set()
    start = None
    etype = None
    for i, label in enumerate(labels):
        if label == "O" or label is None:
            if start is not None:
                spans.add(EntitySpan(start, i, etype))
                start = None
            continue
        prefix, _, found = label.partition("-")
        if prefix == "B" or etype != found or start is None:
            if start is not None:
                spans.add(EntitySpan(start, i, etype))
            start, etype = i, found
    if start is not None:
        spans.add(EntitySpan(start, len(labels), etype))
    return spans


def f_measure(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def score(gold, pred) -> EvalReport:
    """Score a predicted corpus against gold.

    Both must align exactly in sentence count, sentence lengths, and token
    surfaces; the first divergence is named in the error.
    """
    if len(gold) != len(pred):
        raise ValueError(
            f"sentence count differs: gold has {len(gold)}, prediction has {len(pred)}"
        )
    counts: dict[str, list[int]] = {}  # etype -> [gold, pred, correct]
    for si, (gs, ps) in enumerate(zip(gold, pred)):
        if len(gs) != len(ps):
            raise ValueError(
                f"sentence {si}: token count differs ({len(gs)} vs {len(ps)})"
            )
        for ti, (gt, pt) in enumerate(zip(gs.tokens, ps.tokens)):
            if gt.surface != pt.surface:
                raise ValueError(
                    f"sentence {si}: surface mismatch at token {ti} "
                    f"({gt.surface!r} vs {pt.surface!r})"
                )
        gold_spans = extract_entities(gs.labels)
        pred_spans = extract_entities(ps.labels)
        for span in gold_spans:
            counts.setdefault(span.etype, [0, 0, 0])[0] += 1
        for span in pred_spans:
            row = counts.setdefault(span.etype, [0, 0, 0])
            row[1] += 1
            if span in gold_spans:
                row[2] += 1
    per_type = {t: TypeScore(*c) for t, c in sorted(counts.items())}
    overall = TypeScore(
        sum(s.gold_count for s in per_type.values()),
        sum(s.pred_count for s in per_type.values()),
        sum(s.correct_count for s in per_type.values()),
    )
    return EvalReport(per_type, overall)


def format_table(report: EvalReport) -> str:
    """Fixed-width table with Precision / Recall / F-Measure columns."""
    width = max([len("OVERALL")] + [len(t) for t in report.per_type])
    lines = [
        f"{'Type':<{width}}  {'Gold':>6} {'Pred':>6} {'Corr':>6} "
        f"{'Precision':>9} {'Recall':>9} {'F-Measure':>9}"
    ]
    rows = list(report.per_type.items()) + [("OVERALL", report.overall)]
    for name, s in rows:
        lines.append(
            f"{name:<{width}}  {s.gold_count:>6} {s.pred_count:>6} "
            f"{s.correct_count:>6} {s.precision:>9.4f} {s.recall:>9.4f} "
            f"{s.f1:>9.4f}"
        )
    return "\n".join(lines)


def format_records(report: EvalReport) -> str:
    """One machine-readable key=value line per type, then the overall line."""
    def line(name, s):
        return (
            f"type={name} gold={s.gold_count} pred={s.pred_count} "
            f"correct={s.correct_count} precision={s.precision:.4f} "
            f"recall={s.recall:.4f} f1={s.f1:.4f}"
        )

    rows = [line(t, s) for t, s in report.per_type.items()]
    rows.append(line("OVERALL", report.overall))
    return "\n".join(rows)
