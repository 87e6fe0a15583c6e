"""Class-imbalance remedies: inverse-proportion weights, random over- and
undersampling, and SMOTE interpolation for sparse feature vectors."""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np

from .errors import CfxError
from .features import SparseFeatureVector

T = TypeVar("T")


def class_weights(labels: Sequence[int]) -> dict[int, float]:
    """weight(c) = N / (2 * count(c)); a balanced set gives weight 1 per class."""
    counts: dict[int, int] = {}
    for y in labels:
        counts[y] = counts.get(y, 0) + 1
    if len(counts) < 2:
        raise CfxError("class weights need both classes present")
    n = len(labels)
    return {c: n / (2 * k) for c, k in counts.items()}


def _split_by_class(labels: Sequence[int]) -> tuple[list[int], list[int], int, int]:
    """Return (minority indices, majority indices, minority label, majority label)."""
    by_class: dict[int, list[int]] = {}
    for i, y in enumerate(labels):
        by_class.setdefault(y, []).append(i)
    if len(by_class) != 2:
        raise CfxError(f"resampling needs exactly two classes, found {sorted(by_class)}")
    (a, ai), (b, bi) = sorted(by_class.items())
    if len(ai) <= len(bi):
        return ai, bi, a, b
    return bi, ai, b, a


def oversample(items: Sequence[T], labels: Sequence[int], seed: int) -> tuple[list[T], list[int]]:
    """Append uniform-with-replacement copies of minority examples until the
    class counts are equal. The original rows keep their input order."""
    minority, majority, min_label, _ = _split_by_class(labels)
    rng = np.random.default_rng(seed)
    deficit = len(majority) - len(minority)
    picks = rng.integers(0, len(minority), size=deficit)
    out_items = list(items)
    out_labels = list(labels)
    for p in picks:
        out_items.append(items[minority[int(p)]])
        out_labels.append(min_label)
    return out_items, out_labels


def undersample(items: Sequence[T], labels: Sequence[int], seed: int) -> tuple[list[T], list[int]]:
    """Drop uniform-without-replacement majority examples until the class
    counts are equal; survivors keep their input order."""
    minority, majority, _, _ = _split_by_class(labels)
    rng = np.random.default_rng(seed)
    keep = rng.permutation(len(majority))[: len(minority)]
    kept_majority = {majority[int(i)] for i in keep}
    minority_set = set(minority)
    out_items = []
    out_labels = []
    for i, (item, y) in enumerate(zip(items, labels)):
        if i in minority_set or i in kept_majority:
            out_items.append(item)
            out_labels.append(y)
    return out_items, out_labels


def smote(
    vectors: Sequence[SparseFeatureVector],
    labels: Sequence[int],
    n_features: int,
    k: int = 5,
    seed: int = 0,
) -> tuple[list[SparseFeatureVector], list[int]]:
    """SMOTE oversampling: synthesize minority points on segments between a
    minority point and one of its k nearest minority neighbors (Euclidean),
    until the classes are equal. Synthetics are appended after the input
    rows, which pass through unchanged.
    """
    if k < 1:
        raise CfxError("SMOTE needs k >= 1")
    minority, majority, min_label, _ = _split_by_class(labels)
    if len(minority) < 2:
        raise CfxError("SMOTE needs >=2 minority samples")
    k = min(k, len(minority) - 1)
    rng = np.random.default_rng(seed)

    minority_mat = np.stack([vectors[i].to_dense(n_features) for i in minority])
    # pairwise squared Euclidean distances between minority points
    sq_norms = np.sum(minority_mat**2, axis=1)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (minority_mat @ minority_mat.T)
    np.fill_diagonal(d2, np.inf)
    neighbor_idx = np.argsort(d2, axis=1, kind="stable")[:, :k]

    out_items = list(vectors)
    out_labels = list(labels)
    for _ in range(len(majority) - len(minority)):
        base = int(rng.integers(0, len(minority)))
        neighbor = int(neighbor_idx[base, int(rng.integers(0, k))])
        u = float(rng.random())
        x = minority_mat[base]
        synthetic = x + u * (minority_mat[neighbor] - x)
        nz = np.nonzero(synthetic)[0]
        out_items.append(SparseFeatureVector(nz.astype(np.int64), synthetic[nz]))
        out_labels.append(min_label)
    return out_items, out_labels
