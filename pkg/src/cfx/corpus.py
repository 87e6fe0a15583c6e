"""Corpus ingestion: task CSVs, CoNLL-U parses, embedding tables, splits.

All loaders are pure functions of their input files and return immutable
records; nothing here mutates state after construction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import AlignmentError, CfxError, DataFormatError

TASK1_HEADER = ["sentence_id", "gold_label", "sentence"]
TASK2_HEADER = [
    "sentence_id",
    "sentence",
    "antecedent_startid",
    "antecedent_endid",
    "consequent_startid",
    "consequent_endid",
]

MAX_TEXT_CHARS = 10000


@dataclass(frozen=True)
class LabeledSentence:
    id: str
    text: str
    label: int  # 1 = counterfactual, 0 = not

    def __post_init__(self) -> None:
        if not self.text or len(self.text) > MAX_TEXT_CHARS:
            raise CfxError(f"sentence {self.id}: text length must be 1..{MAX_TEXT_CHARS}")
        if self.label not in (0, 1):
            raise CfxError(f"sentence {self.id}: label must be 0 or 1")


@dataclass(frozen=True)
class SpanAnnotation:
    """Gold character spans for one sentence; ranges are inclusive [start, end]."""

    id: str
    text: str
    antecedent: tuple[int, int]
    consequent: tuple[int, int] | None

    def __post_init__(self) -> None:
        _check_range(self.antecedent, len(self.text), self.id, "antecedent")
        if self.consequent is not None:
            _check_range(self.consequent, len(self.text), self.id, "consequent")


def _check_range(rng: tuple[int, int], text_len: int, sid: str, what: str) -> None:
    start, end = rng
    if start > end:
        raise DataFormatError(f"sentence {sid}: {what} start {start} > end {end}")
    if start < 0 or end >= text_len:
        raise DataFormatError(f"sentence {sid}: {what} range [{start}, {end}] outside text of length {text_len}")


@dataclass(frozen=True)
class ParseToken:
    surface: str
    char_start: int
    char_end: int  # inclusive
    upos: str
    head: int | None  # 0-based token index; None marks the root
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    id: str
    tokens: tuple[ParseToken, ...]

    def children(self) -> list[list[int]]:
        """Adjacency list keyed by head token index."""
        kids: list[list[int]] = [[] for _ in self.tokens]
        for i, tok in enumerate(self.tokens):
            if tok.head is not None:
                kids[tok.head].append(i)
        return kids


@dataclass
class EmbeddingTable:
    """Static word-vector table. Lookups try the exact surface, then its
    lowercase form; out-of-vocabulary words map to the zero vector."""

    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def lookup(self, word: str) -> np.ndarray:
        vec = self.entries.get(word)
        if vec is None:
            vec = self.entries.get(word.lower())
        if vec is None:
            return np.zeros(self.dim)
        return vec

    def __contains__(self, word: str) -> bool:
        return word in self.entries or word.lower() in self.entries


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.75
    seed: int = 0
    stratified: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise CfxError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def load_task1_csv(path: str) -> list[LabeledSentence]:
    """Read a `sentence_id,gold_label,sentence` CSV (RFC-4180 quoting)."""
    out: list[LabeledSentence] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TASK1_HEADER:
            raise DataFormatError(f"{path}: expected header {','.join(TASK1_HEADER)}, got {header}")
        for row in reader:
            line = reader.line_num
            if len(row) != 3:
                raise DataFormatError(f"{path}: malformed row at line {line}: expected 3 fields, got {len(row)}")
            sid, label_str, text = row
            if label_str not in ("0", "1"):
                raise DataFormatError(f"{path}: invalid label at line {line}: {label_str!r}")
            if sid in seen:
                raise DataFormatError(f"{path}: duplicate id {sid!r} at line {line}")
            seen.add(sid)
            try:
                out.append(LabeledSentence(sid, text, int(label_str)))
            except CfxError as exc:
                raise DataFormatError(f"{path}: line {line}: {exc}") from exc
    return out


def write_task1_csv(path: str, data: Iterable[LabeledSentence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TASK1_HEADER)
        for ex in data:
            writer.writerow([ex.id, ex.label, ex.text])


def load_task2_csv(path: str) -> list[SpanAnnotation]:
    """Read span annotations; the -1/-1 sentinel marks an absent consequent."""
    out: list[SpanAnnotation] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TASK2_HEADER:
            raise DataFormatError(f"{path}: expected header {','.join(TASK2_HEADER)}, got {header}")
        for row in reader:
            line = reader.line_num
            if len(row) != 6:
                raise DataFormatError(f"{path}: malformed row at line {line}: expected 6 fields, got {len(row)}")
            sid, text, a_start, a_end, c_start, c_end = row
            if sid in seen:
                raise DataFormatError(f"{path}: duplicate id {sid!r} at line {line}")
            seen.add(sid)
            try:
                ant = (int(a_start), int(a_end))
                con: tuple[int, int] | None = (int(c_start), int(c_end))
            except ValueError as exc:
                raise DataFormatError(f"{path}: non-integer offset at line {line}") from exc
            if con == (-1, -1):
                con = None
            try:
                out.append(SpanAnnotation(sid, text, ant, con))
            except CfxError as exc:
                raise DataFormatError(f"{path}: line {line}: {exc}") from exc
    return out


def write_task2_csv(path: str, data: Iterable[SpanAnnotation]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TASK2_HEADER)
        for ex in data:
            con = ex.consequent if ex.consequent is not None else (-1, -1)
            writer.writerow([ex.id, ex.text, ex.antecedent[0], ex.antecedent[1], con[0], con[1]])


def _align_tokens(sid: str, raw: str, rows: list[tuple[str, str, int, str]]) -> tuple[ParseToken, ...]:
    """Greedy left-to-right alignment of parse surfaces to the raw text;
    only whitespace may be skipped between consecutive tokens."""
    tokens: list[ParseToken] = []
    cursor = 0
    for surface, upos, head, deprel in rows:
        while cursor < len(raw) and raw[cursor].isspace():
            cursor += 1
        if not raw.startswith(surface, cursor):
            raise AlignmentError(f"sentence {sid}: token {surface!r} not found at offset {cursor}")
        start = cursor
        cursor += len(surface)
        tokens.append(ParseToken(surface, start, cursor - 1, upos, None if head == 0 else head - 1, deprel))
    return tuple(tokens)


def _check_tree(sid: str, tokens: tuple[ParseToken, ...]) -> None:
    roots = [i for i, t in enumerate(tokens) if t.head is None]
    if len(roots) != 1:
        raise DataFormatError(f"sentence {sid}: expected exactly one root, found {len(roots)}")
    for i, tok in enumerate(tokens):
        if tok.head is not None and not 0 <= tok.head < len(tokens):
            raise DataFormatError(f"sentence {sid}: head index {tok.head} out of range")
        # walk to the root; more than len(tokens) hops means a cycle
        hops = 0
        cur = tok.head
        while cur is not None:
            cur = tokens[cur].head
            hops += 1
            if hops > len(tokens):
                raise DataFormatError(f"sentence {sid}: dependency heads contain a cycle at token {i}")


def load_conllu(path: str, raw_texts: Mapping[str, str]) -> dict[str, ParsedSentence]:
    """Read CoNLL-U parses and align each block to its raw sentence text.

    Each block must carry a `# sent_id = <id>` comment whose id appears in
    `raw_texts`. Multiword-token ranges and empty nodes are skipped in
    favor of their word lines. Columns used: FORM, UPOS, HEAD, DEPREL.
    """
    out: dict[str, ParsedSentence] = {}
    sent_id: str | None = None
    rows: list[tuple[str, str, int, str]] = []

    def flush() -> None:
        nonlocal sent_id, rows
        if sent_id is None and not rows:
            return
        if sent_id is None:
            raise DataFormatError(f"{path}: sentence block without a '# sent_id =' comment")
        if sent_id not in raw_texts:
            raise DataFormatError(f"{path}: unknown sent_id {sent_id!r}")
        parsed = ParsedSentence(sent_id, _align_tokens(sent_id, raw_texts[sent_id], rows))
        _check_tree(sent_id, parsed.tokens)
        out[sent_id] = parsed
        sent_id, rows = None, []

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                flush()
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("sent_id"):
                    _, _, value = body.partition("=")
                    sent_id = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise DataFormatError(f"{path}: line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
            tid = cols[0]
            if "-" in tid or "." in tid:  # multiword-token range or empty node
                continue
            try:
                head = int(cols[6])
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {lineno}: non-integer HEAD {cols[6]!r}") from exc
            rows.append((cols[1], cols[3], head, cols[7]))
    flush()
    return out


def load_embeddings(path: str) -> EmbeddingTable:
    """Read a `word v1 ... vd` text table; the first line fixes the dimension."""
    entries: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            word, comps = parts[0], parts[1:]
            if dim is None:
                dim = len(comps)
                if dim == 0:
                    raise DataFormatError(f"{path}: line {lineno}: no vector components")
            elif len(comps) != dim:
                raise DataFormatError(f"{path}: dimension mismatch at line {lineno}: expected {dim}, got {len(comps)}")
            try:
                entries[word] = np.array([float(c) for c in comps])
            except ValueError as exc:
                raise DataFormatError(f"{path}: non-numeric component at line {lineno}") from exc
    if dim is None:
        raise DataFormatError(f"{path}: empty embedding file")
    return EmbeddingTable(dim, entries)


def stratified_split(
    data: list[LabeledSentence], cfg: SplitConfig
) -> tuple[list[LabeledSentence], list[LabeledSentence]]:
    """Deterministic train/validation split, stratified by label by default.

    Both halves preserve the input ordering of their members, so repeated
    runs with the same seed serialize byte-identically.
    """
    if not data:
        raise CfxError("cannot split an empty corpus")
    rng = np.random.default_rng(cfg.seed)
    train_idx: set[int] = set()
    if cfg.stratified:
        by_label: dict[int, list[int]] = {}
        for i, ex in enumerate(data):
            by_label.setdefault(ex.label, []).append(i)
        if len(by_label) < 2:
            raise CfxError("stratified split needs at least one example per class")
        for label in sorted(by_label):
            members = by_label[label]
            n_train = round(cfg.train_fraction * len(members))
            perm = rng.permutation(len(members))
            train_idx.update(members[j] for j in perm[:n_train])
    else:
        n_train = round(cfg.train_fraction * len(data))
        perm = rng.permutation(len(data))
        train_idx.update(int(j) for j in perm[:n_train])
    train = [ex for i, ex in enumerate(data) if i in train_idx]
    val = [ex for i, ex in enumerate(data) if i not in train_idx]
    return train, val
