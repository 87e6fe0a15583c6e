"""Offset-preserving tokenization and BIO <-> character-span conversion.

Character ranges are inclusive ``[start, end]`` pairs over Unicode scalar
values, matching the gold annotation convention used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CfxError

BIO_TAGS = ("B", "I", "O")

# ASCII punctuation plus the quote/dash/ellipsis characters common in news text.
_PUNCT = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~") | set("‘’“”–—…")


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int  # inclusive

    def __post_init__(self) -> None:
        if not self.surface:
            raise CfxError("token surface must be non-empty")
        if self.char_start > self.char_end:
            raise CfxError("token char_start must not exceed char_end")


@dataclass(frozen=True)
class TagSequence:
    """Per-token BIO tags for one extraction role."""

    tags: tuple[str, ...]
    role: str  # "antecedent" or "consequent"

    def __post_init__(self) -> None:
        for t in self.tags:
            if t not in BIO_TAGS:
                raise CfxError(f"unknown BIO tag {t!r}")
        if self.role not in ("antecedent", "consequent"):
            raise CfxError(f"unknown role {self.role!r}")

    def __len__(self) -> int:
        return len(self.tags)

    def repaired(self) -> "TagSequence":
        """Rewrite any I that does not continue a B/I run into a B."""
        out = []
        prev = "O"
        for t in self.tags:
            if t == "I" and prev == "O":
                t = "B"
            out.append(t)
            prev = t
        return TagSequence(tuple(out), self.role)


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, peeling leading/trailing punctuation into
    separate single-character tokens. Internal apostrophes stay inside
    their word, so "wouldn't" is one token.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        # chunk is text[i:j]; peel punctuation from both edges
        left, right = i, j - 1
        lead: list[int] = []
        while left <= right and text[left] in _PUNCT:
            lead.append(left)
            left += 1
        trail: list[int] = []
        while right >= left and text[right] in _PUNCT:
            trail.append(right)
            right -= 1
        for p in lead:
            tokens.append(Token(text[p], p, p))
        if left <= right:
            tokens.append(Token(text[left : right + 1], left, right))
        for p in reversed(trail):
            tokens.append(Token(text[p], p, p))
        i = j
    return tokens


def spans_to_bio(tokens: list[Token], span: tuple[int, int] | None, role: str = "antecedent") -> TagSequence:
    """BIO-encode an inclusive character span over a token list.

    A token is inside the span iff its character range overlaps it. The
    first token of each contiguous inside run gets B, the rest I.
    """
    if span is None:
        return TagSequence(tuple("O" for _ in tokens), role)
    start, end = span
    tags = []
    prev_inside = False
    for tok in tokens:
        inside = tok.char_start <= end and tok.char_end >= start
        if inside:
            tags.append("I" if prev_inside else "B")
        else:
            tags.append("O")
        prev_inside = inside
    return TagSequence(tuple(tags), role)


def bio_to_spans(tokens: list[Token], tags: TagSequence) -> tuple[int, int] | None:
    """Invert BIO tags into a single inclusive character span.

    Maximal contiguous B/I runs are the candidates; the longest run wins
    (ties go to the earliest). All-O input yields None. A leading I is
    treated as a run start via the repair rule.
    """
    if len(tags) != len(tokens):
        raise CfxError(f"{len(tags)} tags for {len(tokens)} tokens")
    repaired = tags.repaired().tags
    runs: list[tuple[int, int]] = []  # [first_idx, last_idx] token indices
    run_start = None
    for idx, t in enumerate(repaired):
        if t == "O":
            if run_start is not None:
                runs.append((run_start, idx - 1))
                run_start = None
        elif run_start is None:
            run_start = idx
    if run_start is not None:
        runs.append((run_start, len(repaired) - 1))
    if not runs:
        return None
    best = max(runs, key=lambda r: r[1] - r[0])  # max keeps the earliest on ties
    return (tokens[best[0]].char_start, tokens[best[1]].char_end)
