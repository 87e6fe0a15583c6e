"""Shared synthetic-data builders for the test suite.

The generated corpora are deliberately easy: the positive class is marked
by counterfactual scaffolding ("if ... would", "wish") so that learned
models can reach perfect scores on held-out splits, making end-to-end
assertions sharp instead of flaky.
"""

from __future__ import annotations

import csv

import numpy as np

from cfx.corpus import LabeledSentence, ParseToken, ParsedSentence

POS_TEMPLATES = [
    "If I had seen the {a} earlier , I would have fixed the {b} .",
    "I wish the {a} had worked with the {b} .",
    "She would have bought the {a} if the {b} were cheaper .",
    "If they had tested the {a} , the {b} would never have failed .",
]
NEG_TEMPLATES = [
    "The {a} worked well with the {b} yesterday .",
    "We bought a {a} and a {b} at the market .",
    "The {a} is larger than the {b} .",
    "Everyone liked the {a} more than the {b} .",
]
NOUNS = ["engine", "report", "garden", "window", "printer", "ladder", "basket", "camera", "bridge", "kettle"]


def labeled_corpus(n: int, seed: int = 0, positive_every: int = 3) -> list[LabeledSentence]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        a, b = (NOUNS[int(j)] for j in rng.choice(len(NOUNS), size=2, replace=False))
        if i % positive_every == 0:
            text = POS_TEMPLATES[int(rng.integers(len(POS_TEMPLATES)))].format(a=a, b=b)
            label = 1
        else:
            text = NEG_TEMPLATES[int(rng.integers(len(NEG_TEMPLATES)))].format(a=a, b=b)
            label = 0
        out.append(LabeledSentence(str(100000 + i), text, label))
    return out


def write_task1(path, rows: list[LabeledSentence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sentence_id", "gold_label", "sentence"])
        for ex in rows:
            writer.writerow([ex.id, ex.label, ex.text])


def span_rows(n: int, seed: int = 0) -> list[tuple[str, str, int, int, int, int]]:
    """Task-2 rows 'If we had V the N , they would have W the M .' with exact
    antecedent/consequent offsets."""
    rng = np.random.default_rng(seed)
    verbs = ["fixed", "tested", "cleaned", "moved", "sold", "painted"]
    rows = []
    for i in range(n):
        a, b = (NOUNS[int(j)] for j in rng.choice(len(NOUNS), size=2, replace=False))
        v, w = (verbs[int(j)] for j in rng.choice(len(verbs), size=2, replace=False))
        ant = f"If we had {v} the {a}"
        con = f"they would have {w} the {b}"
        text = f"{ant} , {con} ."
        c0 = len(ant) + 3
        rows.append((str(i + 1), text, 0, len(ant) - 1, c0, c0 + len(con) - 1))
    return rows


def write_task2(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["sentence_id", "sentence", "antecedent_startid", "antecedent_endid", "consequent_startid", "consequent_endid"]
        )
        writer.writerows(rows)


def write_embeddings(path, words, dim: int = 12, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for w in sorted(set(words)):
            vec = rng.normal(size=dim)
            fh.write(w + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")


def vocab_of(rows: list[LabeledSentence]) -> set[str]:
    out: set[str] = set()
    for ex in rows:
        out.update(w.lower() for w in ex.text.split())
    return out


def fig1_parse() -> ParsedSentence:
    """Dependency parse of 'If I were at DreamWorks Animation': 'if' marks
    'were' (the root), whose subtree spans the whole phrase."""
    tokens = (
        ParseToken("If", 0, 1, "SCONJ", 2, "mark"),
        ParseToken("I", 3, 3, "PRON", 2, "nsubj"),
        ParseToken("were", 5, 8, "AUX", None, "root"),
        ParseToken("at", 10, 11, "ADP", 2, "prep"),
        ParseToken("DreamWorks", 13, 22, "PROPN", 5, "compound"),
        ParseToken("Animation", 24, 32, "PROPN", 3, "pobj"),
    )
    return ParsedSentence(id="fig1", tokens=tokens)


def random_crf_model(rng: np.random.default_rng, n_feats: int = 4):
    """Random small CRF over a toy feature space, for enumeration oracles."""
    from cfx.crf import CrfModel

    index = {f"f{j}": j for j in range(n_feats)}
    return CrfModel(
        role="antecedent",
        feature_index=index,
        unary=rng.normal(size=(n_feats, 3)),
        trans=rng.normal(size=(3, 3)),
        start=rng.normal(size=3),
        stop=rng.normal(size=3),
    )


def random_feats(rng, T: int, n_feats: int = 4) -> list[list[str]]:
    """Per-position random feature keys (1..3 active features)."""
    out = []
    for _ in range(T):
        k = int(rng.integers(1, 4))
        picks = rng.choice(n_feats, size=min(k, n_feats), replace=False)
        out.append([f"f{int(j)}" for j in picks])
    return out
