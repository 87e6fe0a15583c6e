"""Span extraction: dependency heuristic plus CRF fallback."""

import numpy as np
import pytest
from helpers import fig1_parse

from cfx.corpus import ParseToken, ParsedSentence
from cfx.crf import CrfTrainConfig, train_crf
from cfx.errors import CfxError, DataFormatError
from cfx.spans import SpanPrediction, extract_if_antecedent, predict_spans
from cfx.text import spans_to_bio, tokenize

FIG1_TEXT = "If I were at DreamWorks Animation"


def test_heuristic_spans_whole_if_clause():
    # "if" marks the root, so the antecedent covers the full phrase
    assert extract_if_antecedent(fig1_parse()) == (0, 32)


def test_heuristic_requires_sconj_mark_if():
    # same shape, but "if" is tagged ADP: no trigger
    tokens = tuple(
        ParseToken(t.surface, t.char_start, t.char_end, "ADP" if t.surface == "If" else t.upos, t.head, t.deprel)
        for t in fig1_parse().tokens
    )
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) is None

    tokens = tuple(
        ParseToken(t.surface, t.char_start, t.char_end, t.upos, t.head, "case" if t.surface == "If" else t.deprel)
        for t in fig1_parse().tokens
    )
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) is None


def test_heuristic_no_if_returns_none():
    tokens = (
        ParseToken("We", 0, 1, "PRON", 1, "nsubj"),
        ParseToken("left", 3, 6, "VERB", None, "root"),
    )
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) is None


def test_heuristic_span_starts_at_trigger_not_subtree_left_edge():
    # the head's subtree reaches left of "if"; the span still starts at "if"
    tokens = (
        ParseToken("Honestly", 0, 7, "ADV", 4, "advmod"),
        ParseToken(",", 9, 9, "PUNCT", 4, "punct"),
        ParseToken("if", 11, 12, "SCONJ", 4, "mark"),
        ParseToken("I", 14, 14, "PRON", 4, "nsubj"),
        ParseToken("left", 16, 19, "VERB", None, "root"),
    )
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) == (11, 19)


def test_heuristic_headless_if_spans_itself():
    tokens = (ParseToken("If", 0, 1, "SCONJ", None, "mark"),)
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) == (0, 1)


def test_heuristic_uses_first_if_only():
    # two "if" triggers; the first one (marking the root) wins
    tokens = (
        ParseToken("If", 0, 1, "SCONJ", 2, "mark"),
        ParseToken("I", 3, 3, "PRON", 2, "nsubj"),
        ParseToken("knew", 5, 8, "VERB", None, "root"),
        ParseToken("if", 10, 11, "SCONJ", 4, "mark"),
        ParseToken("asked", 13, 17, "VERB", 2, "advcl"),
    )
    assert extract_if_antecedent(ParsedSentence(id="x", tokens=tokens)) == (0, 17)


def test_cycle_detection():
    tokens = (
        ParseToken("If", 0, 1, "SCONJ", 1, "mark"),
        ParseToken("a", 3, 3, "X", 2, "dep"),
        ParseToken("b", 5, 5, "X", 1, "dep"),
    )
    with pytest.raises(DataFormatError, match="cycle"):
        extract_if_antecedent(ParsedSentence(id="x", tokens=tokens))


def trained_models(seed=0):
    """Tiny taggers trained on one fixed pattern each."""
    rng = np.random.default_rng(seed)
    nouns = ["engine", "garden", "printer", "ladder", "camera", "kettle"]
    ant_data, con_data = [], []
    for i in range(12):
        a, b = (nouns[int(j)] for j in rng.choice(len(nouns), size=2, replace=False))
        text = f"If we had the {a} , we would use the {b} ."
        tokens = tokenize(text)
        surfaces = [t.surface for t in tokens]
        comma = surfaces.index(",")
        ant_span = (tokens[0].char_start, tokens[comma - 1].char_end)
        con_span = (tokens[comma + 1].char_start, tokens[-2].char_end)
        ant_data.append((surfaces, None, spans_to_bio(tokens, ant_span, role="antecedent")))
        con_data.append((surfaces, None, spans_to_bio(tokens, con_span, role="consequent")))
    cfg = CrfTrainConfig(seed=seed)
    return train_crf(ant_data, "antecedent", cfg), train_crf(con_data, "consequent", cfg)


def test_predict_spans_role_order_enforced():
    ant, con = trained_models()
    with pytest.raises(CfxError, match="in that order"):
        predict_spans("If only .", None, con, ant)


def test_predict_spans_crf_fallback():
    ant, con = trained_models()
    text = "If we had the engine , we would use the camera ."
    pred = predict_spans(text, None, ant, con)
    assert text[pred.antecedent[0] : pred.antecedent[1] + 1] == "If we had the engine"
    assert text[pred.consequent[0] : pred.consequent[1] + 1] == "we would use the camera"


def test_predict_spans_heuristic_overrides_antecedent():
    ant, con = trained_models()
    pred = predict_spans(FIG1_TEXT, fig1_parse(), ant, con)
    assert pred.antecedent == (0, 32)  # from the parse, not the tagger


def test_predict_spans_empty_text():
    ant, con = trained_models()
    assert predict_spans("", None, ant, con) == SpanPrediction(None, None)


def test_predict_spans_all_o_is_none():
    ant, con = trained_models()
    # no counterfactual scaffolding: the taggers emit all-O
    pred = predict_spans("The engine worked well .", None, ant, con)
    assert pred.antecedent is None and pred.consequent is None


def test_predicted_ranges_inside_text():
    ant, con = trained_models()
    texts = [
        "If we had the garden , we would use the ladder .",
        "If we had the kettle , we would use the printer .",
    ]
    for text in texts:
        pred = predict_spans(text, None, ant, con)
        for span in (pred.antecedent, pred.consequent):
            if span is not None:
                s, e = span
                assert 0 <= s <= e < len(text)
