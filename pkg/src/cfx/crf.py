"""Linear-chain CRF BIO tagger with hand-built position features.

Tags are indexed B=0, I=1, O=2; that order is also the Viterbi tie-break.
Potentials are linear in binary position features (unary) plus transition,
start and stop weights. Training minimizes mean NLL + (lambda/2)||theta||^2
by mini-batch gradient descent on forward-backward expectations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import CfxError, DataFormatError, TrainingError
from .forms import DEFAULT_MODALS, WISH_FORMS
from .text import TagSequence

TAGS = ("B", "I", "O")
TAG_INDEX = {t: i for i, t in enumerate(TAGS)}
K = len(TAGS)

ROLES = ("antecedent", "consequent")


@dataclass(frozen=True)
class CrfTrainConfig:
    l2_lambda: float = 1e-4
    lr: float = 0.1
    lr_decay: float = 0.05  # per-epoch 1/(1 + decay*epoch) schedule
    epochs: int = 25
    batch_size: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lr <= 0 or self.l2_lambda <= 0:
            raise CfxError("lr and l2_lambda must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise CfxError("epochs and batch_size must be >= 1")


def position_features(surfaces: Sequence[str], upos: Sequence[str] | None, t: int) -> list[str]:
    """Feature keys for one token position (tags never participate)."""
    n = len(surfaces)
    low = surfaces[t].lower()
    feats = [f"w={low}"]
    if upos is not None:
        feats.append(f"pos={upos[t]}")
    if low == "if":
        feats.append("is_if")
    if low in WISH_FORMS:
        feats.append("is_wish")
    if low in DEFAULT_MODALS:
        feats.append("is_modal")
    feats.append(f"prev={surfaces[t - 1].lower()}" if t > 0 else "prev=<s>")
    feats.append(f"next={surfaces[t + 1].lower()}" if t < n - 1 else "next=</s>")
    if t == 0:
        feats.append("bucket=first")
    elif t == n - 1:
        feats.append("bucket=last")
    else:
        feats.append("bucket=interior")
    return feats


def sentence_features(surfaces: Sequence[str], upos: Sequence[str] | None) -> list[list[str]]:
    return [position_features(surfaces, upos, t) for t in range(len(surfaces))]


@dataclass
class CrfModel:
    role: str
    feature_index: dict[str, int]
    unary: np.ndarray  # (n_features, K)
    trans: np.ndarray  # (K, K)
    start: np.ndarray  # (K,)
    stop: np.ndarray  # (K,)

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise CfxError(f"unknown role {self.role!r}")

    def indexed(self, feats: list[list[str]]) -> tuple[np.ndarray, np.ndarray]:
        """Flatten per-position feature keys into (position, feature-row)
        index arrays; unknown keys are dropped."""
        pos_idx: list[int] = []
        feat_idx: list[int] = []
        for t, keys in enumerate(feats):
            for key in keys:
                row = self.feature_index.get(key)
                if row is not None:
                    pos_idx.append(t)
                    feat_idx.append(row)
        return np.array(pos_idx, dtype=np.int64), np.array(feat_idx, dtype=np.int64)

    def unary_scores(self, feats: list[list[str]]) -> np.ndarray:
        scores = np.zeros((len(feats), K))
        pos_idx, feat_idx = self.indexed(feats)
        np.add.at(scores, pos_idx, self.unary[feat_idx])
        return scores

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "cfx/crf-model/v1",
                "role": self.role,
                "feature_index": self.feature_index,
                "unary": self.unary.tolist(),
                "trans": self.trans.tolist(),
                "start": self.start.tolist(),
                "stop": self.stop.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CrfModel":
        doc = json.loads(text)
        if doc.get("schema") != "cfx/crf-model/v1":
            raise DataFormatError(f"unsupported CRF model schema {doc.get('schema')!r}")
        return cls(
            role=doc["role"],
            feature_index=doc["feature_index"],
            unary=np.array(doc["unary"]).reshape(-1, K),
            trans=np.array(doc["trans"]),
            start=np.array(doc["start"]),
            stop=np.array(doc["stop"]),
        )


@dataclass
class CrfExpectations:
    """Sufficient statistics of the NLL gradient under the current model."""

    node: np.ndarray  # (T, K) tag marginals per position
    pair: np.ndarray  # (K, K) transition marginals summed over positions
    logz_backward: float

    @property
    def start(self) -> np.ndarray:
        return self.node[0]

    @property
    def stop(self) -> np.ndarray:
        return self.node[-1]


def forward_backward(model: CrfModel, feats: list[list[str]]) -> tuple[float, CrfExpectations]:
    """Log partition plus expected-count statistics for one sentence."""
    if not feats:
        raise CfxError("forward_backward needs at least one position")
    unary = model.unary_scores(feats)
    logz_f, logz_b, node, pair = _kernels.crf_forward_backward(unary, model.trans, model.start, model.stop)
    return logz_f, CrfExpectations(node=node, pair=pair, logz_backward=logz_b)


def viterbi(model: CrfModel, feats: list[list[str]]) -> TagSequence:
    """Best-scoring tag path; ties resolve toward lower tag index (B<I<O)."""
    if not feats:
        raise CfxError("viterbi needs at least one position")
    unary = model.unary_scores(feats)
    _, path = _kernels.crf_viterbi(unary, model.trans, model.start, model.stop)
    return TagSequence(tuple(TAGS[i] for i in path), model.role)


def viterbi_score(model: CrfModel, feats: list[list[str]]) -> float:
    unary = model.unary_scores(feats)
    score, _ = _kernels.crf_viterbi(unary, model.trans, model.start, model.stop)
    return float(score)


def sequence_score(model: CrfModel, feats: list[list[str]], tags: Sequence[str]) -> float:
    """Unnormalized score of one explicit tag path."""
    unary = model.unary_scores(feats)
    idx = [TAG_INDEX[t] for t in tags]
    score = model.start[idx[0]] + model.stop[idx[-1]]
    for t, k in enumerate(idx):
        score += unary[t, k]
    for a, b in zip(idx, idx[1:]):
        score += model.trans[a, b]
    return float(score)


def sentence_nll(model: CrfModel, feats: list[list[str]], tags: Sequence[str]) -> float:
    logz, _ = forward_backward(model, feats)
    return logz - sequence_score(model, feats, tags)


def sentence_nll_gradient(
    model: CrfModel, feats: list[list[str]], tags: Sequence[str]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Analytic NLL gradient (d_unary, d_trans, d_start, d_stop): expected
    counts minus empirical counts."""
    T = len(feats)
    gold = np.array([TAG_INDEX[t] for t in tags], dtype=np.int64)
    _, exp_counts = forward_backward(model, feats)
    resid = exp_counts.node.copy()
    resid[np.arange(T), gold] -= 1.0
    d_unary = np.zeros_like(model.unary)
    pos_idx, feat_idx = model.indexed(feats)
    np.add.at(d_unary, feat_idx, resid[pos_idx])
    d_trans = exp_counts.pair.copy()
    for a, b in zip(gold, gold[1:]):
        d_trans[a, b] -= 1.0
    d_start = exp_counts.node[0].copy()
    d_start[gold[0]] -= 1.0
    d_stop = exp_counts.node[-1].copy()
    d_stop[gold[-1]] -= 1.0
    return d_unary, d_trans, d_start, d_stop


TrainExample = tuple[Sequence[str], Sequence[str] | None, TagSequence]


def _build_feature_index(data: Sequence[TrainExample]) -> dict[str, int]:
    index: dict[str, int] = {}
    for surfaces, upos, _ in data:
        for keys in sentence_features(surfaces, upos):
            for key in keys:
                if key not in index:
                    index[key] = len(index)
    return index


def train_crf(data: Sequence[TrainExample], role: str, cfg: CrfTrainConfig = CrfTrainConfig()) -> CrfModel:
    """Fit a CRF on (surfaces, optional UPOS, gold tags) triples."""
    if not data:
        raise TrainingError("CRF training data is empty")
    for surfaces, _, tags in data:
        if len(tags) != len(surfaces):
            raise TrainingError(f"{len(tags)} tags for {len(surfaces)} tokens")
        if len(surfaces) == 0:
            raise TrainingError("empty sentence in CRF training data")
    feature_index = _build_feature_index(data)
    model = CrfModel(
        role=role,
        feature_index=feature_index,
        unary=np.zeros((len(feature_index), K)),
        trans=np.zeros((K, K)),
        start=np.zeros(K),
        stop=np.zeros(K),
    )

    # precompute per-sentence index arrays and gold tag ids
    prepared = []
    for surfaces, upos, tags in data:
        feats = sentence_features(surfaces, upos)
        pos_idx, feat_idx = model.indexed(feats)
        gold = np.array([TAG_INDEX[t] for t in tags.tags], dtype=np.int64)
        prepared.append((len(surfaces), pos_idx, feat_idx, gold))

    rng = np.random.default_rng(cfg.seed)
    n = len(prepared)
    lam = cfg.l2_lambda
    for epoch in range(cfg.epochs):
        lr = cfg.lr / (1.0 + cfg.lr_decay * epoch)
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            d_unary = np.zeros_like(model.unary)
            d_trans = np.zeros_like(model.trans)
            d_start = np.zeros_like(model.start)
            d_stop = np.zeros_like(model.stop)
            batch_nll = 0.0
            for bi in batch:
                T, pos_idx, feat_idx, gold = prepared[bi]
                unary = np.zeros((T, K))
                np.add.at(unary, pos_idx, model.unary[feat_idx])
                logz, _, node, pair = _kernels.crf_forward_backward(unary, model.trans, model.start, model.stop)
                gold_score = model.start[gold[0]] + model.stop[gold[-1]] + float(unary[np.arange(T), gold].sum())
                for a, b in zip(gold, gold[1:]):
                    gold_score += model.trans[a, b]
                    pair[a, b] -= 1.0
                batch_nll += logz - gold_score
                node[np.arange(T), gold] -= 1.0
                np.add.at(d_unary, feat_idx, node[pos_idx])
                d_trans += pair
                d_start += node[0]
                d_stop += node[-1]
            if not np.isfinite(batch_nll):
                raise TrainingError(f"non-finite CRF loss at epoch {epoch}, batch {lo // cfg.batch_size}")
            inv = 1.0 / len(batch)
            model.unary -= lr * (d_unary * inv + lam * model.unary)
            model.trans -= lr * (d_trans * inv + lam * model.trans)
            model.start -= lr * (d_start * inv + lam * model.start)
            model.stop -= lr * (d_stop * inv + lam * model.stop)
    return model
