"""Grammatical-form classification and partitioning."""

import pytest

from cfx.corpus import LabeledSentence
from cfx.errors import CfxError
from cfx.forms import DEFAULT_MODALS, FormLabel, classify_form, load_modal_lexicon, partition_by_form
from cfx.text import tokenize


def classify(text, lexicon=DEFAULT_MODALS):
    return classify_form(tokenize(text), lexicon)


def test_canonical_examples():
    assert classify("I wish it had more.") is FormLabel.WISH
    assert (
        classify("If we had changed the battery on time, the car wouldn't have broken down.")
        is FormLabel.IF_THEN_MODAL
    )
    assert classify("The sky is blue.") is FormLabel.OTHER
    assert (
        classify("The car wouldn't have broken down if we had changed the battery.")
        is FormLabel.MODAL_THEN_IF
    )


def test_precedence_both_orderings():
    # "if ... would ... if": an if precedes a modal, so IfThenModal wins
    assert classify("if it would work even if it rained") is FormLabel.IF_THEN_MODAL


def test_wish_loses_to_if_forms():
    assert classify("I wish that if he tried he would win") is FormLabel.IF_THEN_MODAL


def test_wish_forms():
    assert classify("She wishes it were over") is FormLabel.WISH
    assert classify("They wished for rain") is FormLabel.WISH
    assert classify("The wishbone snapped") is FormLabel.OTHER  # token-exact


def test_no_substring_hits():
    assert classify("An iffy proposal") is FormLabel.OTHER


def test_case_invariance():
    for text in ["IF THEY WOULD GO", "If They Would Go", "if they would go"]:
        assert classify(text) is FormLabel.IF_THEN_MODAL


def test_modal_only_is_other():
    assert classify("He would go") is FormLabel.OTHER


def test_if_only_is_other():
    assert classify("If it rains we stay") is FormLabel.OTHER


def test_custom_lexicon(tmp_path):
    path = tmp_path / "modals.txt"
    path.write_text("# comment\nshall\n\n")
    lex = load_modal_lexicon(str(path))
    assert classify("If he shall pass", lex) is FormLabel.IF_THEN_MODAL
    assert classify("If he would pass", lex) is FormLabel.OTHER


def test_empty_lexicon_errors(tmp_path):
    path = tmp_path / "modals.txt"
    path.write_text("# only comments\n")
    with pytest.raises(CfxError, match="empty"):
        load_modal_lexicon(str(path))


def test_partition_covers_and_preserves_order():
    data = [
        LabeledSentence("1", "I wish it had more.", 1),
        LabeledSentence("2", "If we had changed the battery, the car wouldn't have broken down.", 1),
        LabeledSentence("3", "The sky is blue.", 0),
        LabeledSentence("4", "The car wouldn't have broken down if we had changed the battery.", 1),
        LabeledSentence("5", "I wish I knew.", 1),
    ]
    buckets = partition_by_form(data)
    assert set(buckets) == set(FormLabel)
    assert sum(len(v) for v in buckets.values()) == len(data)
    assert [ex.id for ex in buckets[FormLabel.WISH]] == ["1", "5"]
    assert [ex.id for ex in buckets[FormLabel.IF_THEN_MODAL]] == ["2"]
    assert [ex.id for ex in buckets[FormLabel.MODAL_THEN_IF]] == ["4"]
    assert [ex.id for ex in buckets[FormLabel.OTHER]] == ["3"]


def test_partition_empty_corpus():
    buckets = partition_by_form([])
    assert set(buckets) == set(FormLabel)
    assert all(v == [] for v in buckets.values())


def test_default_lexicon_contents():
    assert {"would", "could", "should", "might", "must", "ought", "'d"} <= DEFAULT_MODALS
    assert "wouldn't" in DEFAULT_MODALS
