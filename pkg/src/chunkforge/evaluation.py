"""Boundary-level precision/recall/F1.

Each document contributes N-1 binary labels (one per adjacent-sentence gap;
the last sentence carries none). The primary numbers are micro-averaged:
true/false positive/negative counts are pooled over the corpus and the
ratios computed once. A macro F1 (mean of per-document F1, documents without
any gold boundary skipped) is reported alongside as a secondary column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .scoring import BoundaryProbs


def binarize(probs: BoundaryProbs, t1: float = 0.5) -> list[bool]:
    """Decision rule: label i is positive iff probs[i] >= t1 (inclusive)."""
    return [p >= t1 for p in probs]


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    return _safe_div(2 * precision * recall, precision + recall)


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    doc_count: int
    macro_f1: float = 0.0

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int, doc_count: int, macro_f1: float = 0.0) -> "EvalReport":
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        return cls(
            tp=tp, fp=fp, fn=fn,
            precision=precision, recall=recall, f1=_f1(precision, recall),
            doc_count=doc_count, macro_f1=macro_f1,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1,
                "macro_f1": self.macro_f1, "doc_count": self.doc_count,
            }
        )

    def to_table(self) -> str:
        rows = [
            ("documents", f"{self.doc_count}"),
            ("tp / fp / fn", f"{self.tp} / {self.fp} / {self.fn}"),
            ("precision", f"{self.precision:.4f}"),
            ("recall", f"{self.recall:.4f}"),
            ("f1 (micro)", f"{self.f1:.4f}"),
            ("f1 (macro)", f"{self.macro_f1:.4f}"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def _pair_counts(pred: Sequence[bool], gold: Sequence[bool]) -> tuple[int, int, int]:
    if len(pred) != len(gold):
        raise InputError(f"label length mismatch: {len(pred)} predicted vs {len(gold)} gold")
    tp = fp = fn = 0
    for p, g in zip(pred, gold):
        if p and g:
            tp += 1
        elif p:
            fp += 1
        elif g:
            fn += 1
    return tp, fp, fn


def boundary_metrics(pred: Sequence[bool], gold: Sequence[bool]) -> EvalReport:
    """Metrics for a single document's label vectors."""
    tp, fp, fn = _pair_counts(pred, gold)
    report = EvalReport.from_counts(tp, fp, fn, doc_count=1)
    macro = report.f1 if any(gold) else 0.0
    return EvalReport.from_counts(tp, fp, fn, doc_count=1, macro_f1=macro)


def corpus_metrics(pairs: Sequence[tuple[Sequence[bool], Sequence[bool]]]) -> EvalReport:
    """Micro-averaged metrics over (pred, gold) pairs, one pair per document."""
    tp = fp = fn = 0
    per_doc_f1: list[float] = []
    for pred, gold in pairs:
        dtp, dfp, dfn = _pair_counts(pred, gold)
        tp += dtp
        fp += dfp
        fn += dfn
        if any(gold):
            p = _safe_div(dtp, dtp + dfp)
            r = _safe_div(dtp, dtp + dfn)
            per_doc_f1.append(_f1(p, r))
    macro = sum(per_doc_f1) / len(per_doc_f1) if per_doc_f1 else 0.0
    return EvalReport.from_counts(tp, fp, fn, doc_count=len(pairs), macro_f1=macro)
