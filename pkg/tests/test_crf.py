"""Linear-chain CRF: enumeration oracles, gradient checks, training."""

import itertools
import math

import numpy as np
import pytest
from helpers import random_crf_model, random_feats

from cfx.crf import (
    K,
    TAGS,
    CrfModel,
    CrfTrainConfig,
    forward_backward,
    position_features,
    sentence_features,
    sentence_nll,
    sentence_nll_gradient,
    sequence_score,
    train_crf,
    viterbi,
    viterbi_score,
)
from cfx.errors import CfxError, DataFormatError, TrainingError
from cfx.text import TagSequence, spans_to_bio, tokenize


def all_paths(T):
    return itertools.product(TAGS, repeat=T)


def brute_logz(model, feats):
    scores = [sequence_score(model, feats, path) for path in all_paths(len(feats))]
    m = max(scores)
    return m + math.log(sum(math.exp(s - m) for s in scores))


def brute_marginals(model, feats):
    """Node and summed pairwise marginals by explicit path enumeration."""
    T = len(feats)
    logz = brute_logz(model, feats)
    node = np.zeros((T, K))
    pair = np.zeros((K, K))
    for path in all_paths(T):
        p = math.exp(sequence_score(model, feats, path) - logz)
        idx = [TAGS.index(t) for t in path]
        for t, k in enumerate(idx):
            node[t, k] += p
        for a, b in zip(idx, idx[1:]):
            pair[a, b] += p
    return node, pair


def test_logz_matches_enumeration():
    rng = np.random.default_rng(0)
    for trial in range(20):
        model = random_crf_model(rng)
        T = int(rng.integers(1, 9))
        feats = random_feats(rng, T)
        logz, ex = forward_backward(model, feats)
        oracle = brute_logz(model, feats)
        assert abs(logz - oracle) <= 1e-9
        assert abs(logz - ex.logz_backward) <= 1e-9


def test_viterbi_matches_enumeration():
    rng = np.random.default_rng(1)
    for trial in range(20):
        model = random_crf_model(rng)
        T = int(rng.integers(1, 9))
        feats = random_feats(rng, T)
        best = max(all_paths(T), key=lambda p: sequence_score(model, feats, p))
        assert viterbi(model, feats).tags == best
        assert viterbi_score(model, feats) == pytest.approx(
            sequence_score(model, feats, best), abs=1e-9
        )


def test_marginals_match_enumeration():
    rng = np.random.default_rng(2)
    for trial in range(10):
        model = random_crf_model(rng)
        T = int(rng.integers(1, 7))
        feats = random_feats(rng, T)
        _, ex = forward_backward(model, feats)
        node_o, pair_o = brute_marginals(model, feats)
        np.testing.assert_allclose(ex.node, node_o, atol=1e-8)
        np.testing.assert_allclose(ex.pair, pair_o, atol=1e-8)
        assert np.array_equal(ex.start, ex.node[0]) and np.array_equal(ex.stop, ex.node[-1])


def test_zero_model_base_cases():
    model = CrfModel(
        role="antecedent",
        feature_index={"f0": 0},
        unary=np.zeros((1, K)),
        trans=np.zeros((K, K)),
        start=np.zeros(K),
        stop=np.zeros(K),
    )
    for T in (1, 2, 5):
        feats = [["f0"]] * T
        logz, ex = forward_backward(model, feats)
        assert logz == pytest.approx(T * math.log(3), abs=1e-12)
        np.testing.assert_allclose(ex.node, np.full((T, K), 1 / 3), atol=1e-12)
        # ties resolve toward the lowest tag index, i.e. all-B
        assert viterbi(model, feats).tags == ("B",) * T


def test_single_position_logz():
    rng = np.random.default_rng(3)
    model = random_crf_model(rng)
    feats = [["f0", "f2"]]
    logz, _ = forward_backward(model, feats)
    unary = model.unary[0] + model.unary[2]
    expected = np.logaddexp.reduce(model.start + unary + model.stop)
    assert logz == pytest.approx(float(expected), abs=1e-12)


def test_viterbi_never_exceeds_logz():
    rng = np.random.default_rng(4)
    for trial in range(20):
        model = random_crf_model(rng)
        feats = random_feats(rng, int(rng.integers(1, 10)))
        logz, _ = forward_backward(model, feats)
        assert viterbi_score(model, feats) <= logz + 1e-9


def test_nll_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    model = random_crf_model(rng)
    feats = random_feats(rng, 3)
    tags = ("B", "I", "O")
    d_unary, d_trans, d_start, d_stop = sentence_nll_gradient(model, feats, tags)

    eps = 1e-5

    def central(arr, pos):
        orig = arr[pos]
        arr[pos] = orig + eps
        hi = sentence_nll(model, feats, tags)
        arr[pos] = orig - eps
        lo = sentence_nll(model, feats, tags)
        arr[pos] = orig
        return (hi - lo) / (2 * eps)

    for arr, grad in (
        (model.unary, d_unary),
        (model.trans, d_trans),
        (model.start, d_start),
        (model.stop, d_stop),
    ):
        for pos in np.ndindex(arr.shape):
            num = central(arr, pos)
            assert abs(num - grad[pos]) < 1e-4, (arr.shape, pos)


def test_unknown_feature_keys_are_dropped():
    rng = np.random.default_rng(6)
    model = random_crf_model(rng)
    known = [["f0"], ["f1", "f2"]]
    with_noise = [["f0", "zzz"], ["f1", "f2", "qqq"]]
    assert forward_backward(model, known)[0] == pytest.approx(
        forward_backward(model, with_noise)[0]
    )
    assert viterbi(model, known).tags == viterbi(model, with_noise).tags


def test_empty_sentence_rejected():
    rng = np.random.default_rng(7)
    model = random_crf_model(rng)
    with pytest.raises(CfxError):
        forward_backward(model, [])
    with pytest.raises(CfxError):
        viterbi(model, [])


def test_position_features_content():
    surfaces = ["If", "I", "wish", "would"]
    feats = position_features(surfaces, None, 0)
    assert feats == ["w=if", "is_if", "prev=<s>", "next=i", "bucket=first"]
    feats = position_features(surfaces, ["SCONJ", "PRON", "VERB", "AUX"], 2)
    assert feats == ["w=wish", "pos=VERB", "is_wish", "prev=i", "next=would", "bucket=interior"]
    feats = position_features(surfaces, None, 3)
    assert feats == ["w=would", "is_modal", "prev=wish", "next=</s>", "bucket=last"]
    assert len(sentence_features(surfaces, None)) == 4


def crf_corpus(n=10, seed=0):
    """Simple tagged corpus: the if-clause before the comma is the span."""
    rng = np.random.default_rng(seed)
    nouns = ["engine", "garden", "printer", "ladder", "camera", "kettle"]
    data = []
    for i in range(n):
        a, b = (nouns[int(j)] for j in rng.choice(len(nouns), size=2, replace=False))
        text = f"If we had the {a} , we would use the {b} ."
        tokens = tokenize(text)
        surfaces = [t.surface for t in tokens]
        comma = surfaces.index(",")
        span = (tokens[0].char_start, tokens[comma - 1].char_end)
        tags = spans_to_bio(tokens, span, role="antecedent")
        data.append((surfaces, None, tags))
    return data


def test_training_decodes_training_set():
    data = crf_corpus()
    model = train_crf(data, "antecedent", CrfTrainConfig(seed=0))
    for surfaces, upos, gold in data:
        assert viterbi(model, sentence_features(surfaces, upos)).tags == gold.tags


def test_training_determinism():
    data = crf_corpus(6)
    cfg = CrfTrainConfig(seed=11, epochs=3)
    m1 = train_crf(data, "antecedent", cfg)
    m2 = train_crf(data, "antecedent", cfg)
    assert np.array_equal(m1.unary, m2.unary)
    assert np.array_equal(m1.trans, m2.trans)
    assert m1.feature_index == m2.feature_index


def test_training_validation():
    with pytest.raises(TrainingError, match="empty"):
        train_crf([], "antecedent")
    bad = [(["a", "b"], None, TagSequence(("B",), "antecedent"))]
    with pytest.raises(TrainingError, match="tags for"):
        train_crf(bad, "antecedent")
    with pytest.raises(CfxError):
        CrfTrainConfig(lr=0.0)
    with pytest.raises(CfxError):
        CrfTrainConfig(epochs=0)


def test_model_role_validation():
    with pytest.raises(CfxError, match="role"):
        CrfModel(
            role="verb",
            feature_index={},
            unary=np.zeros((0, K)),
            trans=np.zeros((K, K)),
            start=np.zeros(K),
            stop=np.zeros(K),
        )


def test_serialization_round_trip():
    data = crf_corpus(4)
    model = train_crf(data, "antecedent", CrfTrainConfig(epochs=2))
    restored = CrfModel.from_json(model.to_json())
    assert restored.role == model.role
    assert restored.feature_index == model.feature_index
    np.testing.assert_allclose(restored.unary, model.unary)
    for surfaces, upos, _ in data:
        feats = sentence_features(surfaces, upos)
        assert viterbi(restored, feats).tags == viterbi(model, feats).tags


def test_unknown_schema_rejected():
    with pytest.raises(DataFormatError, match="schema"):
        CrfModel.from_json('{"schema": "cfx/other/v9"}')
