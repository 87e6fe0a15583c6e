"""Grammatical-form partitioning for per-form training and analysis.

Every sentence falls into exactly one of four buckets, decided by the
ordering of "if" and modal-verb tokens: IfThenModal, ModalThenIf, Wish,
or Other, with that precedence.
"""

from __future__ import annotations

from enum import Enum

from .corpus import LabeledSentence
from .errors import CfxError
from .text import Token, tokenize

DEFAULT_MODALS = frozenset(
    {
        "would",
        "could",
        "should",
        "might",
        "must",
        "ought",
        "'d",
        "wouldn't",
        "couldn't",
        "shouldn't",
        "mightn't",
        "mustn't",
    }
)

WISH_FORMS = frozenset({"wish", "wishes", "wished"})


class FormLabel(Enum):
    IF_THEN_MODAL = "IfThenModal"
    MODAL_THEN_IF = "ModalThenIf"
    WISH = "Wish"
    OTHER = "Other"


def load_modal_lexicon(path: str) -> frozenset[str]:
    """One modal form per line; blank lines and '#' comments are skipped."""
    modals: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                modals.add(word.lower())
    if not modals:
        raise CfxError(f"{path}: modal lexicon is empty")
    return frozenset(modals)


def classify_form(tokens: list[Token], lexicon: frozenset[str] = DEFAULT_MODALS) -> FormLabel:
    """Assign the single form label for a token sequence.

    Matching is case-insensitive and token-exact (no substring hits, so
    "iffy" and "wishbone" never fire).
    """
    if_positions = []
    modal_positions = []
    has_wish = False
    for i, tok in enumerate(tokens):
        low = tok.surface.lower()
        if low == "if":
            if_positions.append(i)
        if low in lexicon:
            modal_positions.append(i)
        if low in WISH_FORMS:
            has_wish = True
    if if_positions and modal_positions:
        if if_positions[0] < modal_positions[-1]:
            return FormLabel.IF_THEN_MODAL
        if modal_positions[0] < if_positions[-1]:
            return FormLabel.MODAL_THEN_IF
    if has_wish:
        return FormLabel.WISH
    return FormLabel.OTHER


def partition_by_form(
    data: list[LabeledSentence], lexicon: frozenset[str] = DEFAULT_MODALS
) -> dict[FormLabel, list[LabeledSentence]]:
    """Bucket a corpus by form; within-bucket order follows the input."""
    buckets: dict[FormLabel, list[LabeledSentence]] = {label: [] for label in FormLabel}
    for ex in data:
        buckets[classify_form(tokenize(ex.text), lexicon)].append(ex)
    return buckets
