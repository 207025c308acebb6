"""Score predicted merged lines against ground truth.

Metrics are pairwise co-membership counts over the truth's segment-id
universe: a pair of segments is a true positive when both partitions put
them on the same line. Segments missing from the prediction (pruned) count
as singletons there. ``exact_accuracy`` is the share of truth lines that
appear verbatim as a predicted line.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import EmptyBatch, TypeMismatch, UniverseMismatch
from .merge import MergedLineMap


@dataclass(frozen=True)
class GroundTruth:
    lines: MergedLineMap
    attachments: tuple[tuple[int, int], ...] | None = None   # (symbol id, line id)

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"lines": self.lines.to_dict()}
        if self.attachments is not None:
            doc["attachments"] = [{"symbol": s, "line": l} for s, l in self.attachments]
        return doc

    @classmethod
    def from_dict(cls, doc: Any) -> "GroundTruth":
        if not isinstance(doc, dict) or "lines" not in doc:
            raise TypeMismatch("expected a truth document with a 'lines' key", "$")
        lines = MergedLineMap.from_dict(doc["lines"])
        atts = doc.get("attachments")
        if atts is not None:
            atts = tuple((int(a["symbol"]), int(a["line"])) if isinstance(a, dict)
                         else (int(a[0]), int(a[1])) for a in atts)
        return cls(lines, atts)


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    exact_lines: int = 0
    truth_lines: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 1.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 1.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    @property
    def exact_accuracy(self) -> float:
        return self.exact_lines / self.truth_lines if self.truth_lines else 1.0

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.tp, self.fp, self.fn

    def __add__(self, other: "Metrics") -> "Metrics":
        return Metrics(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn,
                       self.exact_lines + other.exact_lines,
                       self.truth_lines + other.truth_lines)

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "exact_accuracy": self.exact_accuracy,
                "tp": self.tp, "fp": self.fp, "fn": self.fn,
                "exact_lines": self.exact_lines, "truth_lines": self.truth_lines}


def pairwise_metrics(pred: MergedLineMap, truth: GroundTruth | MergedLineMap) -> Metrics:
    truth_lines = truth.lines if isinstance(truth, GroundTruth) else truth
    truth_of = truth_lines.line_of()
    unknown = sorted(set(pred.segment_ids()) - truth_of.keys())
    if unknown:
        raise UniverseMismatch(f"predicted segment ids not in truth: {unknown[:10]}")
    pred_pairs = sum(_pairs(len(m)) for m in pred.lines.values())
    truth_pairs = sum(_pairs(len(m)) for m in truth_lines.lines.values())
    overlap = Counter((k, truth_of[m]) for k, members in pred.items() for m in members)
    tp = sum(_pairs(n) for n in overlap.values())
    pred_sets = {frozenset(m) for m in pred.lines.values()}
    exact = sum(frozenset(m) in pred_sets for m in truth_lines.lines.values())
    return Metrics(tp, pred_pairs - tp, truth_pairs - tp, exact, len(truth_lines))


@dataclass(frozen=True)
class BatchReport:
    pooled: Metrics
    rows: list[tuple[str, Metrics]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"pooled": self.pooled.to_dict(),
                "cases": [{"case": name, **m.to_dict()} for name, m in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def table(self) -> str:
        header = f"{'case':<24} {'P':>7} {'R':>7} {'F1':>7} {'exact':>7} {'TP':>7} {'FP':>6} {'FN':>6}"
        out = [header, "-" * len(header)]
        for name, m in self.rows + [("POOLED", self.pooled)]:
            out.append(f"{name:<24} {m.precision:7.4f} {m.recall:7.4f} {m.f1:7.4f} "
                       f"{m.exact_accuracy:7.4f} {m.tp:7d} {m.fp:6d} {m.fn:6d}")
        return "\n".join(out)


def batch_evaluate(cases: Iterable[tuple[MergedLineMap, GroundTruth | MergedLineMap]],
                   names: Sequence[str] | None = None) -> BatchReport:
    """Micro-average: TP/FP/FN and exact-line counts pooled over cases."""
    rows = [pairwise_metrics(pred, truth) for pred, truth in cases]
    if not rows:
        raise EmptyBatch("batch_evaluate needs at least one case")
    names = list(names) if names is not None else [str(i) for i in range(len(rows))]
    pooled = Metrics(0, 0, 0)
    for m in rows:
        pooled = pooled + m
    return BatchReport(pooled, list(zip(names, rows)))
