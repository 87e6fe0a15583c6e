"""Word/POS n-gram vectorizers with top-K document-frequency selection.

Feature keys look like ``word:2:would have`` or ``pos:3:SCONJ PRON AUX``.
Selection keeps the `top_k` most document-frequent n-grams per
(channel, n) pair, ties broken lexicographically, which makes fitting
insensitive to corpus order.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CfxError, DataFormatError

CHANNELS = ("word", "pos")
WEIGHTINGS = ("binary", "count", "tfidf")

# The classic Glasgow IR stop-word list (as popularized by common
# vectorizer implementations); only consulted when keep_stopwords=False.
ENGLISH_STOP_WORDS = frozenset(
    """a about above across after afterwards again against all almost alone along
    already also although always am among amongst amoungst amount an and another
    any anyhow anyone anything anyway anywhere are around as at back be became
    because become becomes becoming been before beforehand behind being below
    beside besides between beyond bill both bottom but by call can cannot cant
    co con could couldnt cry de describe detail do done down due during each
    eg eight either eleven else elsewhere empty enough etc even ever every
    everyone everything everywhere except few fifteen fifty fill find fire first
    five for former formerly forty found four from front full further get give
    go had has hasnt have he hence her here hereafter hereby herein hereupon
    hers herself him himself his how however hundred i ie if in inc indeed
    interest into is it its itself keep last latter latterly least less ltd
    made many may me meanwhile might mill mine more moreover most mostly move
    much must my myself name namely neither never nevertheless next nine no
    nobody none noone nor not nothing now nowhere of off often on once one
    only onto or other others otherwise our ours ourselves out over own part
    per perhaps please put rather re same see seem seemed seeming seems serious
    several she should show side since sincere six sixty so some somehow someone
    something sometime sometimes somewhere still such system take ten than that
    the their them themselves then thence there thereafter thereby therefore
    therein thereupon these they thick thin third this those though three
    through throughout thru thus to together too top toward towards twelve
    twenty two un under until up upon us very via was we well were what whatever
    when whence whenever where whereafter whereas whereby wherein whereupon
    wherever whether which while whither who whoever whole whom whose why will
    with within without would yet you your yours yourself yourselves""".split()
)


@dataclass(frozen=True)
class VectorizerConfig:
    channels: tuple[str, ...] = ("word",)
    ngram_min: int = 1
    ngram_max: int = 1
    top_k: int = 1000  # per (channel, n) pair
    weighting: str = "count"
    keep_stopwords: bool = True
    lowercase: bool = True

    def __post_init__(self) -> None:
        if not self.channels or any(c not in CHANNELS for c in self.channels):
            raise CfxError(f"channels must be a non-empty subset of {CHANNELS}")
        if not 1 <= self.ngram_min <= self.ngram_max <= 3:
            raise CfxError("ngram range must satisfy 1 <= min <= max <= 3")
        if self.top_k <= 0:
            raise CfxError("top_k must be positive")
        if self.weighting not in WEIGHTINGS:
            raise CfxError(f"weighting must be one of {WEIGHTINGS}")

    def to_dict(self) -> dict:
        return {
            "channels": list(self.channels),
            "ngram_min": self.ngram_min,
            "ngram_max": self.ngram_max,
            "top_k": self.top_k,
            "weighting": self.weighting,
            "keep_stopwords": self.keep_stopwords,
            "lowercase": self.lowercase,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VectorizerConfig":
        return cls(
            channels=tuple(d["channels"]),
            ngram_min=d["ngram_min"],
            ngram_max=d["ngram_max"],
            top_k=d["top_k"],
            weighting=d["weighting"],
            keep_stopwords=d["keep_stopwords"],
            lowercase=d["lowercase"],
        )


@dataclass(frozen=True)
class SparseFeatureVector:
    """Strictly increasing column indices with their non-zero values."""

    indices: np.ndarray  # int64
    values: np.ndarray  # float64

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise CfxError("indices and values must have equal length")
        if len(self.indices) > 1 and not np.all(np.diff(self.indices) > 0):
            raise CfxError("indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.indices)

    def dot(self, dense: np.ndarray) -> float:
        return float(dense[self.indices] @ self.values)

    def to_dense(self, n_features: int) -> np.ndarray:
        out = np.zeros(n_features)
        out[self.indices] = self.values
        return out


Example = tuple[Sequence[str], Sequence[str] | None]  # (token surfaces, optional UPOS tags)


def _channel_grams(example: Example, channel: str, n: int, cfg: VectorizerConfig, position: int) -> list[str]:
    surfaces, upos = example
    if channel == "word":
        units = [s.lower() for s in surfaces] if cfg.lowercase else list(surfaces)
        if not cfg.keep_stopwords:
            units = [u for u in units if u.lower() not in ENGLISH_STOP_WORDS]
    else:
        if upos is None:
            raise CfxError(f"pos channel requested but example {position} carries no UPOS tags")
        if len(upos) != len(surfaces):
            raise CfxError(f"example {position}: {len(upos)} UPOS tags for {len(surfaces)} tokens")
        units = list(upos)
    return [" ".join(units[i : i + n]) for i in range(len(units) - n + 1)]


def _example_keys(example: Example, cfg: VectorizerConfig, position: int) -> list[str]:
    keys: list[str] = []
    for channel in cfg.channels:
        for n in range(cfg.ngram_min, cfg.ngram_max + 1):
            keys.extend(f"{channel}:{n}:{g}" for g in _channel_grams(example, channel, n, cfg, position))
    return keys


@dataclass
class FittedVectorizer:
    config: VectorizerConfig
    vocabulary: dict[str, int]
    idf: np.ndarray | None  # aligned to column index; present iff weighting == tfidf

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "cfx/vectorizer/v1",
                "config": self.config.to_dict(),
                "vocabulary": self.vocabulary,
                "idf": None if self.idf is None else self.idf.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FittedVectorizer":
        doc = json.loads(text)
        if doc.get("schema") != "cfx/vectorizer/v1":
            raise DataFormatError(f"unsupported vectorizer schema {doc.get('schema')!r}")
        idf = doc["idf"]
        return cls(
            config=VectorizerConfig.from_dict(doc["config"]),
            vocabulary=doc["vocabulary"],
            idf=None if idf is None else np.array(idf),
        )


def fit_vectorizer(corpus: Iterable[Example], cfg: VectorizerConfig) -> FittedVectorizer:
    """Select the vocabulary from a corpus and compute idf terms if needed.

    Ranking is by document frequency within each (channel, n) pair; ties
    break lexicographically so the fitted vocabulary does not depend on
    corpus order.
    """
    corpus = list(corpus)
    df: dict[tuple[str, int], Counter] = {}
    n_docs = 0
    for position, example in enumerate(corpus):
        n_docs += 1
        for channel in cfg.channels:
            for n in range(cfg.ngram_min, cfg.ngram_max + 1):
                grams = set(_channel_grams(example, channel, n, cfg, position))
                df.setdefault((channel, n), Counter()).update(grams)
    selected: dict[str, int] = {}  # key -> document frequency
    for (channel, n), counts in df.items():
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        for gram, count in ranked[: cfg.top_k]:
            selected[f"{channel}:{n}:{gram}"] = count
    vocabulary = {key: i for i, key in enumerate(sorted(selected))}
    idf = None
    if cfg.weighting == "tfidf":
        idf = np.zeros(len(vocabulary))
        for key, col in vocabulary.items():
            idf[col] = math.log((1 + n_docs) / (1 + selected[key])) + 1.0
    return FittedVectorizer(cfg, vocabulary, idf)


def vectorize(example: Example, fitted: FittedVectorizer, position: int = 0) -> SparseFeatureVector:
    """Transform one example under a fitted vocabulary; unseen n-grams are
    ignored. tfidf output is L2-normalized."""
    cfg = fitted.config
    counts: Counter = Counter()
    for key in _example_keys(example, cfg, position):
        col = fitted.vocabulary.get(key)
        if col is not None:
            counts[col] += 1
    if not counts:
        return SparseFeatureVector(np.empty(0, dtype=np.int64), np.empty(0))
    cols = np.array(sorted(counts), dtype=np.int64)
    vals = np.array([counts[c] for c in cols], dtype=np.float64)
    if cfg.weighting == "binary":
        vals = np.ones_like(vals)
    elif cfg.weighting == "tfidf":
        assert fitted.idf is not None
        vals = vals * fitted.idf[cols]
        norm = float(np.linalg.norm(vals))
        if norm > 0:
            vals = vals / norm
    return SparseFeatureVector(cols, vals)


def vectorize_corpus(corpus: Iterable[Example], fitted: FittedVectorizer) -> list[SparseFeatureVector]:
    return [vectorize(ex, fitted, position=i) for i, ex in enumerate(corpus)]
