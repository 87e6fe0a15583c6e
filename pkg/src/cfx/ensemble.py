"""Hard-voting combination of binary classifiers.

The ensemble goes positive when the fraction of positive member votes
reaches the threshold (>= comparison, so a threshold of 1/3 passes with
exactly one positive vote out of three). Low thresholds trade precision
for recall.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CfxError, DataFormatError


@dataclass(frozen=True)
class EnsembleConfig:
    threshold: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise CfxError(f"threshold must lie in (0, 1], got {self.threshold}")


def vote(predictions: Sequence[int], cfg: EnsembleConfig = EnsembleConfig()) -> int:
    """One ensemble decision from one binary vote per member."""
    if not predictions:
        raise CfxError("vote needs at least one member prediction")
    for p in predictions:
        if p not in (0, 1):
            raise DataFormatError(f"member votes must be 0 or 1, got {p!r}")
    positive = sum(predictions)
    return 1 if positive / len(predictions) >= cfg.threshold else 0


def vote_many(columns: Sequence[Sequence[int]], cfg: EnsembleConfig = EnsembleConfig()) -> list[int]:
    """Vote element-wise across equal-length per-model prediction lists."""
    if not columns:
        raise CfxError("vote_many needs at least one member")
    n = len(columns[0])
    for col in columns:
        if len(col) != n:
            raise CfxError("member prediction lists differ in length")
    return [vote([col[i] for col in columns], cfg) for i in range(n)]
