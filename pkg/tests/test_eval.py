"""Classification and span metrics."""

import pytest

from cfx.errors import CfxError, DataFormatError
from cfx.evaluation import SpanPredictionRecord, prf_binary, span_metrics


def rec(i, ant, con):
    return SpanPredictionRecord(str(i), ant, con)


def test_prf_counts_and_values():
    gold = [1, 1, 1, 1, 0, 0, 0]
    pred = [1, 1, 1, 0, 1, 0, 0]
    m = prf_binary(gold, pred)
    assert (m.tp, m.fp, m.fn, m.tn) == (3, 1, 1, 2)
    assert m.precision == pytest.approx(0.75)
    assert m.recall == pytest.approx(0.75)
    assert m.f1 == pytest.approx(0.75)


def test_prf_perfect_and_degenerate():
    assert prf_binary([1, 0, 1], [1, 0, 1]).f1 == 1.0
    # no positive predictions: precision 0/0 -> 0, so F1 is 0
    m = prf_binary([1, 0], [0, 0])
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
    m = prf_binary([0, 0], [0, 0])
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)


def test_prf_validation():
    with pytest.raises(CfxError):
        prf_binary([1, 0], [1])
    with pytest.raises(CfxError):
        prf_binary([], [])
    with pytest.raises(DataFormatError):
        prf_binary([1, 2], [0, 0])


def test_span_half_coverage():
    # prediction covers exactly the first half of the gold range
    gold = [rec(1, (0, 9), None)]
    pred = [rec(1, (0, 4), None)]
    m = span_metrics(gold, pred)
    assert m.precision == pytest.approx(1.0)
    assert m.recall == pytest.approx(0.5)
    assert m.f1 == pytest.approx(2 / 3)
    assert m.exact_match == 0.0


def test_span_disjoint_is_zero():
    m = span_metrics([rec(1, (0, 4), None)], [rec(1, (10, 14), None)])
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)


def test_span_none_conventions():
    # pred None vs gold present: that pair scores zero
    m = span_metrics([rec(1, (0, 4), None)], [rec(1, None, None)])
    assert (m.precision, m.recall, m.f1, m.exact_match) == (0.0, 0.0, 0.0, 0.0)
    # pred present vs gold None: also zero
    m = span_metrics([rec(1, None, None)], [rec(1, (0, 4), None)])
    assert (m.precision, m.recall, m.f1, m.exact_match) == (0.0, 0.0, 0.0, 0.0)
    # both None everywhere: excluded pairs, vacuously perfect, exact match 1
    m = span_metrics([rec(1, None, None)], [rec(1, None, None)])
    assert (m.precision, m.recall, m.f1, m.exact_match) == (1.0, 1.0, 1.0, 1.0)


def test_span_roles_average_together():
    gold = [rec(1, (0, 9), (20, 29))]
    pred = [rec(1, (0, 9), None)]  # antecedent perfect, consequent missed
    m = span_metrics(gold, pred)
    assert m.precision == pytest.approx(0.5)
    assert m.recall == pytest.approx(0.5)
    assert m.f1 == pytest.approx(0.5)


def test_span_exact_match_requires_both_roles():
    gold = [rec(1, (0, 9), (20, 29)), rec(2, (0, 3), None)]
    pred = [rec(1, (0, 9), (20, 29)), rec(2, (0, 3), (5, 6))]
    m = span_metrics(gold, pred)
    assert m.exact_match == pytest.approx(0.5)


def test_span_identity_is_perfect():
    gold = [rec(1, (0, 9), (12, 20)), rec(2, None, (3, 8)), rec(3, None, None)]
    m = span_metrics(gold, gold)
    assert (m.precision, m.recall, m.f1, m.exact_match) == (1.0, 1.0, 1.0, 1.0)


def test_span_exact_match_one_implies_perfect_f1():
    gold = [rec(1, (4, 9), (11, 30)), rec(2, (0, 2), None)]
    pred = [rec(1, (4, 9), (11, 30)), rec(2, (0, 2), None)]
    m = span_metrics(gold, pred)
    assert m.exact_match == 1.0 and m.f1 == 1.0


def test_span_order_of_examples_is_irrelevant_to_macro():
    gold = [rec(1, (0, 9), None), rec(2, (0, 4), (6, 9))]
    pred = [rec(1, (0, 4), None), rec(2, (0, 4), (6, 7))]
    m1 = span_metrics(gold, pred)
    m2 = span_metrics(list(reversed(gold)), list(reversed(pred)))
    assert m1 == m2


def test_span_validation():
    with pytest.raises(CfxError):
        span_metrics([], [])
    with pytest.raises(CfxError):
        span_metrics([rec(1, None, None)], [])
    with pytest.raises(DataFormatError, match="id mismatch"):
        span_metrics([rec(1, None, None)], [rec(2, None, None)])
