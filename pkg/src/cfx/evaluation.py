"""Classification and span metrics.

Binary metrics treat label 1 (counterfactual) as the positive class.
Span metrics treat each role's character range as an index set and
macro-average precision/recall/F1 over every (example, role) pair in
which either side is non-empty; exact match is per example and requires
both roles to agree, with None == None counting as agreement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import CfxError, DataFormatError

Range = tuple[int, int]  # inclusive character range


@dataclass(frozen=True)
class BinaryMetrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class SpanMetrics:
    precision: float
    recall: float
    f1: float
    exact_match: float


class SpanExample(Protocol):
    """Anything with an id and two optional inclusive char ranges."""

    @property
    def id(self) -> str: ...

    @property
    def antecedent(self) -> Range | None: ...

    @property
    def consequent(self) -> Range | None: ...


@dataclass(frozen=True)
class SpanPredictionRecord:
    """Concrete SpanExample for the prediction side of span_metrics."""

    id: str
    antecedent: Range | None
    consequent: Range | None


def _f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def prf_binary(gold: Sequence[int], pred: Sequence[int]) -> BinaryMetrics:
    """Precision/recall/F1 for the positive class, with 0/0 -> 0."""
    if len(gold) != len(pred):
        raise CfxError(f"gold has {len(gold)} labels, pred has {len(pred)}")
    if not gold:
        raise CfxError("prf_binary needs at least one example")
    tp = fp = fn = tn = 0
    for g, p in zip(gold, pred):
        if g not in (0, 1) or p not in (0, 1):
            raise DataFormatError(f"labels must be 0 or 1, got gold={g!r} pred={p!r}")
        if p == 1:
            tp, fp = (tp + 1, fp) if g == 1 else (tp, fp + 1)
        else:
            fn, tn = (fn + 1, tn) if g == 1 else (fn, tn + 1)
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return BinaryMetrics(precision, recall, _f1(precision, recall), tp, fp, fn, tn)


def _overlap(a: Range, b: Range) -> int:
    return max(0, min(a[1], b[1]) - max(a[0], b[0]) + 1)


def _size(r: Range) -> int:
    return r[1] - r[0] + 1


def _pair_prf(gold: Range | None, pred: Range | None) -> tuple[float, float]:
    if pred is None:
        p = 1.0 if gold is None else 0.0
    else:
        p = (_overlap(pred, gold) / _size(pred)) if gold is not None else 0.0
    if gold is None:
        r = 1.0 if pred is None else 0.0
    else:
        r = (_overlap(pred, gold) / _size(gold)) if pred is not None else 0.0
    return p, r


def span_metrics(gold: Sequence[SpanExample], pred: Sequence[SpanExample]) -> SpanMetrics:
    """Char-level macro P/R/F1 plus exact-match fraction over id-aligned lists."""
    if not gold:
        raise CfxError("span_metrics needs at least one example")
    if len(gold) != len(pred):
        raise CfxError(f"gold has {len(gold)} examples, pred has {len(pred)}")
    precisions: list[float] = []
    recalls: list[float] = []
    f1s: list[float] = []
    exact = 0
    for g, p in zip(gold, pred):
        if g.id != p.id:
            raise DataFormatError(f"id mismatch: gold {g.id!r} vs pred {p.id!r}")
        for g_range, p_range in ((g.antecedent, p.antecedent), (g.consequent, p.consequent)):
            if g_range is None and p_range is None:
                continue
            pp, rr = _pair_prf(g_range, p_range)
            precisions.append(pp)
            recalls.append(rr)
            f1s.append(_f1(pp, rr))
        if g.antecedent == p.antecedent and g.consequent == p.consequent:
            exact += 1
    if not precisions:  # no example had any span on either side: vacuously perfect
        return SpanMetrics(1.0, 1.0, 1.0, exact / len(gold))
    n = len(precisions)
    return SpanMetrics(sum(precisions) / n, sum(recalls) / n, sum(f1s) / n, exact / len(gold))
