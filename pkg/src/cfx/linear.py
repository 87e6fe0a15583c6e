"""Class-weighted linear classifiers (hinge and logistic loss) trained by
stochastic subgradient descent with the 1/(lambda*t) step schedule.

The regularized objective is

    lam/2 * ||w||^2  +  (1/N_eff) * sum_i sw_i * loss(y_i, w.x_i + b)

with lam = 1/(C * N_eff) and N_eff = sum_i sw_i, where sw_i is the class
weight of example i (1 when unweighted). Counting each example by its
weight makes the weighted objective on a dataset identical to the
unweighted objective on the integer-duplication-expanded dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import CfxError, DataFormatError, TrainingError
from .features import SparseFeatureVector

LOSSES = ("hinge", "logistic")


@dataclass(frozen=True)
class LinearTrainConfig:
    C: float = 1.0
    epochs: int = 20
    seed: int = 0
    loss: str = "hinge"
    class_weights: dict[int, float] | None = None

    def __post_init__(self) -> None:
        if self.C <= 0:
            raise CfxError("C must be positive")
        if self.epochs < 1:
            raise CfxError("epochs must be >= 1")
        if self.loss not in LOSSES:
            raise CfxError(f"loss must be one of {LOSSES}")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    loss: str
    objective: float | None = None  # final training objective, when trained here

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "cfx/linear-model/v1",
                "loss": self.loss,
                "weights": self.weights.tolist(),
                "bias": self.bias,
                "n_features": self.n_features,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        doc = json.loads(text)
        if doc.get("schema") != "cfx/linear-model/v1":
            raise DataFormatError(f"unsupported linear model schema {doc.get('schema')!r}")
        weights = np.array(doc["weights"])
        if len(weights) != doc["n_features"]:
            raise DataFormatError("linear model weight length disagrees with n_features")
        return cls(weights=weights, bias=doc["bias"], loss=doc["loss"])


def _as_csr(
    vectors: Sequence[SparseFeatureVector], n_features: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(v)
    if indptr[-1] == 0:
        indices = np.empty(0, dtype=np.int64)
        data = np.empty(0)
    else:
        indices = np.concatenate([v.indices for v in vectors if len(v)]).astype(np.int64)
        data = np.concatenate([v.values for v in vectors if len(v)]).astype(np.float64)
    if len(indices) and indices.max() >= n_features:
        raise TrainingError(f"feature index {indices.max()} out of range for {n_features} features")
    if not np.all(np.isfinite(data)):
        raise TrainingError("non-finite value in feature data")
    return indptr, indices, data


def _sample_weights(labels: Sequence[int], cw: dict[int, float] | None) -> np.ndarray:
    if cw is None:
        return np.ones(len(labels))
    return np.array([cw[y] for y in labels], dtype=np.float64)


def linear_objective(
    weights: np.ndarray,
    bias: float,
    vectors: Sequence[SparseFeatureVector],
    labels: Sequence[int],
    cfg: LinearTrainConfig,
) -> float:
    """Evaluate the regularized training objective at fixed parameters."""
    sw = _sample_weights(labels, cfg.class_weights)
    n_eff = float(sw.sum())
    lam = 1.0 / (cfg.C * n_eff)
    total = 0.0
    for v, y, w_i in zip(vectors, labels, sw):
        score = v.dot(weights) + bias
        margin = (1.0 if y == 1 else -1.0) * score
        if cfg.loss == "hinge":
            total += w_i * max(0.0, 1.0 - margin)
        else:
            total += w_i * float(np.log1p(np.exp(-abs(margin))) + max(0.0, -margin))
    return 0.5 * lam * float(weights @ weights) + total / n_eff


def train_linear(
    vectors: Sequence[SparseFeatureVector],
    labels: Sequence[int],
    n_features: int,
    cfg: LinearTrainConfig,
) -> LinearModel:
    """Fit a linear model by Pegasos-style SGD; deterministic for a seed."""
    if not vectors:
        raise TrainingError("training data is empty")
    if len(vectors) != len(labels):
        raise TrainingError(f"{len(vectors)} vectors for {len(labels)} labels")
    if len(set(labels)) < 2:
        raise TrainingError("training data must contain both classes")
    indptr, indices, data = _as_csr(vectors, n_features)
    y = np.where(np.array(labels) == 1, 1.0, -1.0)
    sw = _sample_weights(labels, cfg.class_weights)
    n_eff = float(sw.sum())
    lam = 1.0 / (cfg.C * n_eff)

    rng = np.random.default_rng(cfg.seed)
    n = len(vectors)
    order = np.concatenate([rng.permutation(n) for _ in range(cfg.epochs)]).astype(np.int64)

    v = np.zeros(n_features)
    # t starts at 2: the t=1 shrink factor (1 - 1/t) would zero the iterate
    scale, bias, _ = _kernels.pegasos_epochs(
        indptr, indices, data, y, sw, order, lam, 0 if cfg.loss == "hinge" else 1, v, 0.0, 2
    )
    weights = scale * v
    model = LinearModel(weights=weights, bias=float(bias), loss=cfg.loss)
    model.objective = linear_objective(weights, model.bias, vectors, labels, cfg)
    return model


def predict_linear(model: LinearModel, x: SparseFeatureVector) -> tuple[int, float]:
    """Score one example; the label is positive iff the score is >= 0."""
    if len(x) and int(x.indices.max()) >= model.n_features:
        raise CfxError(f"feature index {int(x.indices.max())} out of range for {model.n_features} features")
    score = x.dot(model.weights) + model.bias
    return (1 if score >= 0 else 0, score)


def predict_linear_many(model: LinearModel, vectors: Sequence[SparseFeatureVector]) -> list[int]:
    return [predict_linear(model, v)[0] for v in vectors]
