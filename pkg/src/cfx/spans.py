"""Antecedent/consequent span extraction.

Two CRF BIO taggers (one per role) provide the learned path; when a
dependency parse is available and contains a subordinating "if", the
antecedent is instead read directly off the parse: it runs from the "if"
token to the rightmost token of the subtree rooted at the "if" token's
head. The two roles are predicted independently and may overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import ParsedSentence
from .crf import CrfModel, sentence_features, viterbi
from .errors import CfxError, DataFormatError
from .text import Token, bio_to_spans, tokenize


@dataclass(frozen=True)
class SpanPrediction:
    """Predicted inclusive character ranges; None when a role is absent."""

    antecedent: tuple[int, int] | None
    consequent: tuple[int, int] | None


def _subtree_max_index(parse: ParsedSentence, root: int) -> int:
    """Maximum token index in the subtree rooted at `root` (inclusive)."""
    children: dict[int, list[int]] = {}
    for i, tok in enumerate(parse.tokens):
        if tok.head is not None:
            children.setdefault(tok.head, []).append(i)
    best = root
    seen = {root}
    stack = [root]
    while stack:
        node = stack.pop()
        for child in children.get(node, ()):
            if child in seen:
                raise DataFormatError("cycle in dependency tree")
            seen.add(child)
            best = max(best, child)
            stack.append(child)
    return best


def extract_if_antecedent(parse: ParsedSentence) -> tuple[int, int] | None:
    """Dependency heuristic for the antecedent of an if-counterfactual.

    Qualifying trigger: the first token whose lowercase surface is "if"
    with UPOS SCONJ and deprel `mark`. The span runs from that token to
    the rightmost token in the subtree of its head; None when no token
    qualifies or the subtree ends left of the trigger.
    """
    for i, tok in enumerate(parse.tokens):
        if tok.surface.lower() == "if" and tok.upos == "SCONJ" and tok.deprel == "mark":
            head = tok.head if tok.head is not None else i
            rightmost = _subtree_max_index(parse, head)
            if rightmost < i:
                return None
            return (tok.char_start, parse.tokens[rightmost].char_end)
    return None


def predict_spans(
    text: str,
    parse: ParsedSentence | None,
    ant_model: CrfModel,
    con_model: CrfModel,
) -> SpanPrediction:
    """Predict both roles for one sentence.

    Tokens and UPOS come from the parse when one is supplied, otherwise
    from tokenize(). The parse heuristic, when it fires, overrides the
    antecedent CRF entirely.
    """
    if ant_model.role != "antecedent" or con_model.role != "consequent":
        raise CfxError("predict_spans needs an antecedent model and a consequent model, in that order")
    if parse is not None:
        tokens = [Token(t.surface, t.char_start, t.char_end) for t in parse.tokens]
        upos: list[str] | None = [t.upos for t in parse.tokens]
    else:
        tokens = tokenize(text)
        upos = None
    if not tokens:
        return SpanPrediction(None, None)
    feats = sentence_features([t.surface for t in tokens], upos)

    antecedent = extract_if_antecedent(parse) if parse is not None else None
    if antecedent is None:
        antecedent = bio_to_spans(tokens, viterbi(ant_model, feats))
    consequent = bio_to_spans(tokens, viterbi(con_model, feats))
    return SpanPrediction(antecedent, consequent)
