"""Text CNN over static word embeddings, written directly in numpy.

Architecture: per kernel size, a 1-D convolution over time (im2col plus
one matmul), ReLU, max-over-time pooling; the pooled features are
concatenated, passed through inverted dropout (training only), and a
fully-connected layer produces two logits. Embeddings are frozen, so the
backward pass stops at the convolution inputs. The optimizer is AdamW
with decoupled weight decay applied to weight matrices but not biases.

All arrays are float64: the sizes here are small and it keeps the
finite-difference gradient check tight.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .balance import class_weights as balanced_class_weights
from .corpus import EmbeddingTable
from .errors import CfxError, TrainingError
from .evaluation import prf_binary

N_CLASSES = 2


@dataclass(frozen=True)
class CnnConfig:
    kernel_sizes: tuple[int, ...] = (3, 4, 5)
    filters_per_size: int = 100
    dropout_rate: float = 0.5
    max_len: int = 400
    embedding_dim: int = 300

    def __post_init__(self) -> None:
        if not self.kernel_sizes or any(k < 1 for k in self.kernel_sizes):
            raise CfxError("kernel sizes must be >= 1")
        if self.max_len < max(self.kernel_sizes):
            raise CfxError("max_len must be >= the largest kernel size")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise CfxError("dropout_rate must lie in [0, 1)")
        if self.filters_per_size < 1 or self.embedding_dim < 1:
            raise CfxError("filters_per_size and embedding_dim must be >= 1")

    @property
    def pooled_len(self) -> int:
        return self.filters_per_size * len(self.kernel_sizes)


@dataclass(frozen=True)
class OptimizerConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    epochs: int = 20
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise CfxError("lr must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise CfxError("beta1 and beta2 must lie in (0, 1)")
        if self.epochs < 1:
            raise CfxError("epochs must be >= 1")
        if self.batch_size < 1:
            raise CfxError("batch_size must be >= 1")


class CnnModel:
    """Parameter container; `params()` yields (name, array, decayed)."""

    def __init__(
        self,
        config: CnnConfig,
        conv_w: Sequence[np.ndarray],
        conv_b: Sequence[np.ndarray],
        fc_w: np.ndarray,
        fc_b: np.ndarray,
    ) -> None:
        self.config = config
        self.conv_w = list(conv_w)
        self.conv_b = list(conv_b)
        self.fc_w = fc_w
        self.fc_b = fc_b
        for k, w, b in zip(config.kernel_sizes, self.conv_w, self.conv_b):
            if w.shape != (k, config.embedding_dim, config.filters_per_size) or b.shape != (config.filters_per_size,):
                raise CfxError(f"conv parameter shapes inconsistent with config at kernel size {k}")
        if fc_w.shape != (config.pooled_len, N_CLASSES) or fc_b.shape != (N_CLASSES,):
            raise CfxError("fully-connected parameter shapes inconsistent with config")

    def params(self) -> list[tuple[str, np.ndarray, bool]]:
        out: list[tuple[str, np.ndarray, bool]] = []
        for k, w, b in zip(self.config.kernel_sizes, self.conv_w, self.conv_b):
            out.append((f"conv_w_{k}", w, True))
            out.append((f"conv_b_{k}", b, False))
        out.append(("fc_w", self.fc_w, True))
        out.append(("fc_b", self.fc_b, False))
        return out

    def copy(self) -> "CnnModel":
        return CnnModel(
            self.config,
            [w.copy() for w in self.conv_w],
            [b.copy() for b in self.conv_b],
            self.fc_w.copy(),
            self.fc_b.copy(),
        )


def init_cnn(config: CnnConfig, seed: int = 0) -> CnnModel:
    """Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights; conv biases zero."""
    rng = np.random.default_rng(seed)
    conv_w = []
    conv_b = []
    for k in config.kernel_sizes:
        limit = np.sqrt(1.0 / (k * config.embedding_dim))
        conv_w.append(rng.uniform(-limit, limit, size=(k, config.embedding_dim, config.filters_per_size)))
        conv_b.append(np.zeros(config.filters_per_size))
    limit = np.sqrt(1.0 / config.pooled_len)
    fc_w = rng.uniform(-limit, limit, size=(config.pooled_len, N_CLASSES))
    fc_b = rng.uniform(-limit, limit, size=N_CLASSES)
    return CnnModel(config, conv_w, conv_b, fc_w, fc_b)


def embed(tokens: Sequence[str], table: EmbeddingTable, max_len: int, min_len: int = 1) -> np.ndarray:
    """Token-wise lookup into a (rows, dim) matrix.

    Sequences are truncated at max_len and zero-padded up to min_len
    (callers pass the largest kernel size) so every kernel fits.
    """
    kept = list(tokens[:max_len])
    rows = max(len(kept), min_len)
    out = np.zeros((rows, table.dim))
    for i, tok in enumerate(kept):
        out[i] = table.lookup(tok)
    return out


def forward(
    model: CnnModel, matrix: np.ndarray, train_mode: bool = False, dropout_seed: int = 0
) -> tuple[np.ndarray, dict]:
    """Logits for one embedded sentence plus the cache for backward()."""
    cfg = model.config
    if matrix.ndim != 2 or matrix.shape[1] != cfg.embedding_dim:
        raise CfxError(f"input of shape {matrix.shape} does not match embedding_dim {cfg.embedding_dim}")
    if matrix.shape[0] < max(cfg.kernel_sizes):
        raise CfxError(f"input has {matrix.shape[0]} rows; pad to the largest kernel size first")
    cache: dict = {"cols": [], "pre": [], "argmax": []}
    pooled_parts = []
    length = matrix.shape[0]
    for k, w, b in zip(cfg.kernel_sizes, model.conv_w, model.conv_b):
        steps = length - k + 1
        # im2col: one row per window, then a single matmul does the convolution
        cols = np.stack([matrix[i : i + steps] for i in range(k)], axis=1).reshape(steps, k * cfg.embedding_dim)
        pre = cols @ w.reshape(k * cfg.embedding_dim, cfg.filters_per_size) + b
        act = np.maximum(pre, 0.0)
        arg = np.argmax(act, axis=0)  # first maximum wins
        pooled_parts.append(act[arg, np.arange(cfg.filters_per_size)])
        cache["cols"].append(cols)
        cache["pre"].append(pre)
        cache["argmax"].append(arg)
    pooled = np.concatenate(pooled_parts)
    if train_mode and cfg.dropout_rate > 0.0:
        rng = np.random.default_rng(dropout_seed)
        keep = 1.0 - cfg.dropout_rate
        mask = (rng.random(cfg.pooled_len) < keep).astype(float) / keep
    else:
        mask = np.ones(cfg.pooled_len)
    dropped = pooled * mask
    logits = dropped @ model.fc_w + model.fc_b
    cache["pooled"] = pooled
    cache["mask"] = mask
    cache["dropped"] = dropped
    return logits, cache


def backward(model: CnnModel, cache: dict, dlogits: np.ndarray) -> dict[str, np.ndarray]:
    """Parameter gradients for one example; no input gradient is formed
    because the embeddings are frozen."""
    cfg = model.config
    grads: dict[str, np.ndarray] = {
        "fc_w": np.outer(cache["dropped"], dlogits),
        "fc_b": dlogits.copy(),
    }
    dpooled = (model.fc_w @ dlogits) * cache["mask"]
    f = cfg.filters_per_size
    for i, k in enumerate(cfg.kernel_sizes):
        dpart = dpooled[i * f : (i + 1) * f]
        dact = np.zeros_like(cache["pre"][i])
        dact[cache["argmax"][i], np.arange(f)] = dpart
        dpre = dact * (cache["pre"][i] > 0.0)
        grads[f"conv_w_{k}"] = (cache["cols"][i].T @ dpre).reshape(k, cfg.embedding_dim, f)
        grads[f"conv_b_{k}"] = dpre.sum(axis=0)
    return grads


def loss_weighted_ce(logits: np.ndarray, label: int, weights: Sequence[float]) -> tuple[float, np.ndarray]:
    """Class-weighted cross entropy: w(label) * (-log softmax[label])."""
    if not np.all(np.isfinite(logits)):
        raise TrainingError("non-finite logits in loss")
    if label not in (0, 1):
        raise CfxError(f"label must be 0 or 1, got {label!r}")
    shifted = logits - logits.max()
    log_probs = shifted - np.log(np.exp(shifted).sum())
    w = float(weights[label])
    loss = -w * log_probs[label]
    dlogits = np.exp(log_probs)
    dlogits[label] -= 1.0
    return float(loss), w * dlogits


def predict_logits(model: CnnModel, matrix: np.ndarray) -> np.ndarray:
    logits, _ = forward(model, matrix, train_mode=False)
    return logits


def predict_label(model: CnnModel, matrix: np.ndarray) -> int:
    logits = predict_logits(model, matrix)
    return int(np.argmax(logits))


TokensAndLabel = tuple[Sequence[str], int]


def train_cnn(
    train: Sequence[TokensAndLabel],
    val: Sequence[TokensAndLabel],
    table: EmbeddingTable,
    cnn_cfg: CnnConfig | None = None,
    opt_cfg: OptimizerConfig = OptimizerConfig(),
    class_wts: Mapping[int, float] | None = None,
) -> CnnModel:
    """Train with AdamW and keep the checkpoint with the best validation F1.

    The embedding table is read-only throughout; class weights default to
    inverse class proportions on the training labels.
    """
    if not train or not val:
        raise TrainingError("train and validation sets must both be non-empty")
    if cnn_cfg is None:
        cnn_cfg = CnnConfig(embedding_dim=table.dim)
    if cnn_cfg.embedding_dim != table.dim:
        raise CfxError(f"config embedding_dim {cnn_cfg.embedding_dim} != table dim {table.dim}")
    if class_wts is None:
        class_wts = balanced_class_weights([label for _, label in train])
    weights = [float(class_wts.get(0, 1.0)), float(class_wts.get(1, 1.0))]

    min_len = max(cnn_cfg.kernel_sizes)
    train_x = [embed(toks, table, cnn_cfg.max_len, min_len) for toks, _ in train]
    train_y = [label for _, label in train]
    val_x = [embed(toks, table, cnn_cfg.max_len, min_len) for toks, _ in val]
    val_y = [label for _, label in val]

    rng = np.random.default_rng(opt_cfg.seed)
    model = init_cnn(cnn_cfg, seed=int(rng.integers(2**31)))
    adam_m = {name: np.zeros_like(arr) for name, arr, _ in model.params()}
    adam_v = {name: np.zeros_like(arr) for name, arr, _ in model.params()}
    step = 0
    best = model.copy()
    best_f1 = -1.0

    for epoch in range(opt_cfg.epochs):
        order = rng.permutation(len(train_x))
        for lo in range(0, len(order), opt_cfg.batch_size):
            batch = order[lo : lo + opt_cfg.batch_size]
            sums = {name: np.zeros_like(arr) for name, arr, _ in model.params()}
            batch_loss = 0.0
            for bi in batch:
                try:
                    logits, cache = forward(model, train_x[bi], train_mode=True, dropout_seed=int(rng.integers(2**63)))
                    loss, dlogits = loss_weighted_ce(logits, train_y[bi], weights)
                except TrainingError as err:
                    raise TrainingError(f"non-finite loss at epoch {epoch}, batch {lo // opt_cfg.batch_size}") from err
                batch_loss += loss
                for name, grad in backward(model, cache, dlogits).items():
                    sums[name] += grad
            if not np.isfinite(batch_loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {lo // opt_cfg.batch_size}")
            step += 1
            inv = 1.0 / len(batch)
            for name, arr, decayed in model.params():
                g = sums[name] * inv
                adam_m[name] = opt_cfg.beta1 * adam_m[name] + (1 - opt_cfg.beta1) * g
                adam_v[name] = opt_cfg.beta2 * adam_v[name] + (1 - opt_cfg.beta2) * g * g
                m_hat = adam_m[name] / (1 - opt_cfg.beta1**step)
                v_hat = adam_v[name] / (1 - opt_cfg.beta2**step)
                arr -= opt_cfg.lr * m_hat / (np.sqrt(v_hat) + opt_cfg.eps)
                if decayed and opt_cfg.weight_decay > 0:
                    arr -= opt_cfg.lr * opt_cfg.weight_decay * arr

        preds = [int(np.argmax(forward(model, x)[0])) for x in val_x]
        f1 = prf_binary(val_y, preds).f1
        if f1 > best_f1:
            best_f1 = f1
            best = model.copy()
    return best


def gradient_check(
    model: CnnModel,
    matrix: np.ndarray,
    label: int,
    weights: Sequence[float] = (1.0, 1.0),
    epsilon: float = 1e-4,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Dropout is disabled (train_mode off); intended for desk-scale configs
    since every parameter entry gets two forward passes.
    """

    def loss_at() -> float:
        logits, _ = forward(model, matrix, train_mode=False)
        loss, _ = loss_weighted_ce(logits, label, weights)
        return loss

    logits, cache = forward(model, matrix, train_mode=False)
    _, dlogits = loss_weighted_ce(logits, label, weights)
    analytic = backward(model, cache, dlogits)

    worst = 0.0
    for name, arr, _ in model.params():
        grad = analytic[name]
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for j in range(flat.size):
            keep = flat[j]
            flat[j] = keep + epsilon
            hi = loss_at()
            flat[j] = keep - epsilon
            lo = loss_at()
            flat[j] = keep
            numeric = (hi - lo) / (2.0 * epsilon)
            denom = max(abs(gflat[j]), abs(numeric), 1e-8)
            worst = max(worst, abs(gflat[j] - numeric) / denom)
    return worst


def save_cnn(model: CnnModel, path: str) -> None:
    arrays = {name: arr for name, arr, _ in model.params()}
    np.savez(
        path,
        schema="cfx/cnn-model/v1",
        config=json.dumps(asdict(model.config)),
        **arrays,
    )


def load_cnn(path: str) -> CnnModel:
    with np.load(path, allow_pickle=False) as doc:
        if str(doc["schema"]) != "cfx/cnn-model/v1":
            raise CfxError(f"unsupported CNN checkpoint schema {doc['schema']!r}")
        raw = json.loads(str(doc["config"]))
        cfg = CnnConfig(
            kernel_sizes=tuple(raw["kernel_sizes"]),
            filters_per_size=raw["filters_per_size"],
            dropout_rate=raw["dropout_rate"],
            max_len=raw["max_len"],
            embedding_dim=raw["embedding_dim"],
        )
        conv_w = [doc[f"conv_w_{k}"] for k in cfg.kernel_sizes]
        conv_b = [doc[f"conv_b_{k}"] for k in cfg.kernel_sizes]
        return CnnModel(cfg, conv_w, conv_b, doc["fc_w"], doc["fc_b"])
