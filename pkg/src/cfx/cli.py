"""Command-line interface: the full pipeline as reproducible subcommands.

Every subcommand accepts `--config FILE` holding `key = value` lines
(keys are flag names without the leading dashes); explicit flags win
over config values, and unknown keys are usage errors. All randomness
flows from `--seed`. JSON artifacts embed the resolved run config; CSV
artifacts get a `<path>.meta.json` sidecar with the same information,
so re-running a subcommand on identical inputs is byte-identical.

Exit codes: 0 success, 1 data/contract errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import balance, corpus, evaluation
from .cnn import CnnConfig, OptimizerConfig, embed, forward, load_cnn, save_cnn, train_cnn
from .crf import CrfModel, CrfTrainConfig, train_crf
from .ensemble import EnsembleConfig, vote_many
from .errors import CfxError
from .features import (
    Example,
    FittedVectorizer,
    VectorizerConfig,
    fit_vectorizer,
    vectorize,
    vectorize_corpus,
)
from .forms import DEFAULT_MODALS, FormLabel, classify_form, load_modal_lexicon
from .linear import LinearModel, LinearTrainConfig, predict_linear, train_linear
from .spans import SpanPrediction, predict_spans
from .text import Token, spans_to_bio, tokenize

PRED_HEADER = ["sentence_id", "pred_label"]

_UNSET = object()


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    raise ValueError(f"expected true or false, got {text!r}")


def _str_list(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    if not parts:
        raise ValueError("expected a comma-separated list")
    return parts


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in _str_list(text))


@dataclass(frozen=True)
class Opt:
    flag: str  # e.g. "--ngram-max"
    convert: Callable[[str], object]
    default: object
    help: str
    choices: tuple | None = None
    required: bool = False

    @property
    def key(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


def _path(flag: str, help_text: str, required: bool = False) -> Opt:
    return Opt(flag, str, None, help_text, required=required)


_SEED = Opt("--seed", int, 0, "random seed governing all randomness in this run")

_VECTORIZER_OPTS = [
    Opt("--channels", _str_list, ("word",), "feature channels, comma-separated subset of word,pos"),
    Opt("--ngram-min", int, 1, "smallest n-gram order"),
    Opt("--ngram-max", int, 1, "largest n-gram order"),
    Opt("--top-k", int, 1000, "kept features per (channel, n) pair, ranked by document frequency"),
    Opt("--weighting", str, "count", "feature weighting", choices=("binary", "count", "tfidf")),
    Opt("--remove-stopwords", _bool, False, "drop stop words before forming word n-grams (true/false)"),
    Opt("--lowercase", _bool, True, "lowercase word tokens (true/false)"),
]

_BALANCE_OPT = Opt(
    "--balance",
    str,
    "weights",
    "class-imbalance strategy",
    choices=("none", "weights", "oversample", "undersample", "smote"),
)

SUBCOMMANDS: dict[str, tuple[str, list[Opt]]] = {
    "split": (
        "split a labeled CSV into train/validation parts",
        [
            _path("--in", "input sentence_id,gold_label,sentence CSV", required=True),
            _path("--out-train", "output CSV for the training part", required=True),
            _path("--out-test", "output CSV for the held-out part", required=True),
            Opt("--ratio", float, 0.75, "fraction of examples assigned to the training part"),
            Opt("--stratify", _bool, True, "per-class splitting (true/false)"),
            _SEED,
        ],
    ),
    "forms": (
        "report grammatical-form bucket counts",
        [
            _path("--in", "input sentence_id,gold_label,sentence CSV", required=True),
            _path("--out", "optional JSON report path"),
            _path("--modal-lexicon", "modal word list, one per line (defaults to the built-in set)"),
        ],
    ),
    "featurize": (
        "fit an n-gram vectorizer and save it",
        [
            _path("--in", "input sentence_id,gold_label,sentence CSV", required=True),
            _path("--out", "output vectorizer JSON", required=True),
            _path("--conllu", "CoNLL-U parses (required by the pos channel)"),
            *_VECTORIZER_OPTS,
        ],
    ),
    "train-linear": (
        "train a linear classifier (optionally one per grammatical form)",
        [
            _path("--train", "training sentence_id,gold_label,sentence CSV", required=True),
            _path("--out", "output model artifact JSON", required=True),
            _path("--conllu", "CoNLL-U parses (required by the pos channel)"),
            _path("--modal-lexicon", "modal word list for per-form bucketing"),
            Opt("--per-form", _bool, False, "train one model per grammatical-form bucket (true/false)"),
            Opt("--C", float, 1.0, "inverse regularization strength"),
            Opt("--epochs", int, 20, "training epochs"),
            Opt("--loss", str, "hinge", "training loss", choices=("hinge", "logistic")),
            _BALANCE_OPT,
            Opt("--smote-k", int, 5, "neighbor count for --balance smote"),
            *_VECTORIZER_OPTS,
            _SEED,
        ],
    ),
    "train-cnn": (
        "train the text CNN over static embeddings",
        [
            _path("--train", "training sentence_id,gold_label,sentence CSV", required=True),
            _path("--val", "validation CSV for checkpoint selection", required=True),
            _path("--embeddings", "word-vector text file", required=True),
            _path("--out", "output checkpoint (.npz)", required=True),
            Opt("--kernel-sizes", _int_list, (3, 4, 5), "convolution widths, comma-separated"),
            Opt("--filters", int, 100, "filters per kernel size"),
            Opt("--dropout", float, 0.5, "dropout rate before the output layer"),
            Opt("--max-len", int, 400, "token truncation length"),
            Opt("--lr", float, 1e-3, "learning rate"),
            Opt("--weight-decay", float, 0.01, "decoupled weight decay on weight matrices"),
            Opt("--epochs", int, 20, "training epochs"),
            Opt("--batch-size", int, 32, "mini-batch size"),
            Opt("--balance", str, "weights", "class weighting", choices=("none", "weights")),
            _SEED,
        ],
    ),
    "train-crf": (
        "train a BIO span tagger for one role",
        [
            _path("--train", "training span CSV (task-2 layout)", required=True),
            Opt("--role", str, None, "which span the tagger labels", choices=("antecedent", "consequent"), required=True),
            _path("--out", "output model artifact JSON", required=True),
            _path("--conllu", "CoNLL-U parses supplying tokens and UPOS"),
            Opt("--epochs", int, 25, "training epochs"),
            Opt("--lr", float, 0.1, "initial learning rate"),
            Opt("--lr-decay", float, 0.05, "per-epoch decay: lr/(1 + decay*epoch)"),
            Opt("--l2", float, 1e-4, "L2 penalty"),
            Opt("--batch-size", int, 8, "mini-batch size"),
            _SEED,
        ],
    ),
    "predict": (
        "predict labels with a saved linear, per-form, or CNN model",
        [
            _path("--model", "model artifact (JSON or .npz)", required=True),
            _path("--in", "input sentence_id,gold_label,sentence CSV", required=True),
            _path("--out", "output sentence_id,pred_label CSV", required=True),
            _path("--embeddings", "word-vector file (required for CNN checkpoints)"),
            _path("--conllu", "CoNLL-U parses (required by pos-channel vectorizers)"),
        ],
    ),
    "ensemble": (
        "hard-vote several prediction CSVs into one",
        [
            Opt("--predictions", _str_list, None, "comma-separated prediction CSV paths", required=True),
            _path("--out", "output sentence_id,pred_label CSV", required=True),
            Opt("--threshold", float, 1.0 / 3.0, "fraction of positive votes required"),
        ],
    ),
    "extract-spans": (
        "predict antecedent/consequent character spans",
        [
            _path("--ant-model", "antecedent CRF artifact", required=True),
            _path("--con-model", "consequent CRF artifact", required=True),
            _path("--in", "input CSV (labeled-sentence or task-2 layout)", required=True),
            _path("--out", "output span CSV (task-2 layout, -1 -1 for absent roles)", required=True),
            _path("--conllu", "CoNLL-U parses enabling the dependency heuristic"),
        ],
    ),
    "eval": (
        "score predictions against gold data",
        [
            Opt("--task", str, None, "1 = labels, 2 = spans", choices=("1", "2"), required=True),
            _path("--gold", "gold CSV", required=True),
            _path("--pred", "prediction CSV", required=True),
            _path("--out", "optional JSON metrics report"),
        ],
    ),
}


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="cfx", description="counterfactual detection and span extraction")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    by_name: dict[str, argparse.ArgumentParser] = {}
    for name, (help_text, opts) in SUBCOMMANDS.items():
        sp = subparsers.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", default=None, help="key = value file merged under explicit flags")
        for o in opts:
            sp.add_argument(
                o.flag,
                dest=o.key,
                default=_UNSET,
                type=o.convert,
                choices=o.choices,
                help=o.help + (" [required]" if o.required else ""),
                metavar=o.key.upper(),
            )
        by_name[name] = sp
    return parser, by_name


def _read_config_file(path: str, sp: argparse.ArgumentParser) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                sp.error(f"{path}:{lineno}: expected `key = value`, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key in out:
                sp.error(f"{path}:{lineno}: duplicate config key {key!r}")
            out[key] = value.strip()
    return out


def _resolve(args: argparse.Namespace, sp: argparse.ArgumentParser, opts: list[Opt]) -> dict:
    """Merge config-file values under explicit flags, fill defaults, and
    return the resolved configuration as a JSON-ready dict."""
    known = {o.key: o for o in opts}
    if args.config is not None:
        for key, raw in _read_config_file(args.config, sp).items():
            norm = key.replace("-", "_")
            opt = known.get(norm)
            if opt is None:
                sp.error(f"unknown config key {key!r}")
            if getattr(args, norm) is not _UNSET:
                continue  # explicit flag wins
            try:
                value = opt.convert(raw)
            except ValueError as exc:
                sp.error(f"config key {key!r}: {exc}")
            if opt.choices is not None and value not in opt.choices:
                sp.error(f"config key {key!r}: must be one of {', '.join(map(str, opt.choices))}")
            setattr(args, norm, value)
    for o in opts:
        if getattr(args, o.key) is _UNSET:
            setattr(args, o.key, o.default)
        if o.required and getattr(args, o.key) is None:
            sp.error(f"the following argument is required: {o.flag}")
    resolved = {}
    for o in opts:
        value = getattr(args, o.key)
        resolved[o.key] = list(value) if isinstance(value, tuple) else value
    return resolved


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_sidecar(artifact_path: str, command: str, resolved: dict) -> None:
    _write_json(artifact_path + ".meta.json", {"schema": "cfx/run-meta/v1", "command": command, "config": resolved})


def _write_pred_csv(path: str, rows: Sequence[tuple[str, int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PRED_HEADER)
        writer.writerows(rows)


def _load_pred_csv(path: str) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PRED_HEADER:
            raise CfxError(f"{path}: expected header {','.join(PRED_HEADER)}, got {header}")
        for row in reader:
            if len(row) != 2:
                raise CfxError(f"{path}: malformed row at line {reader.line_num}")
            sid, label = row
            if label not in ("0", "1"):
                raise CfxError(f"{path}: invalid label at line {reader.line_num}: {label!r}")
            if sid in seen:
                raise CfxError(f"{path}: duplicate id {sid!r} at line {reader.line_num}")
            seen.add(sid)
            out.append((sid, int(label)))
    return out


def _load_parses(conllu: str | None, data: Sequence[corpus.LabeledSentence] | Sequence[corpus.SpanAnnotation]):
    if conllu is None:
        return {}
    return corpus.load_conllu(conllu, {ex.id: ex.text for ex in data})


def _example_for(ex, parses: Mapping[str, corpus.ParsedSentence], need_pos: bool) -> Example:
    parse = parses.get(ex.id)
    if parse is not None:
        return ([t.surface for t in parse.tokens], [t.upos for t in parse.tokens])
    if need_pos:
        raise CfxError(f"sentence {ex.id}: the pos channel needs a parse; none found in --conllu input")
    return ([t.surface for t in tokenize(ex.text)], None)


def _vectorizer_config(args: argparse.Namespace) -> VectorizerConfig:
    return VectorizerConfig(
        channels=tuple(args.channels),
        ngram_min=args.ngram_min,
        ngram_max=args.ngram_max,
        top_k=args.top_k,
        weighting=args.weighting,
        keep_stopwords=not args.remove_stopwords,
        lowercase=args.lowercase,
    )


# ---------------------------------------------------------------- subcommands


def _cmd_split(args, resolved) -> int:
    data = corpus.load_task1_csv(getattr(args, "in"))
    cfg = corpus.SplitConfig(train_fraction=args.ratio, seed=args.seed, stratified=args.stratify)
    train, test = corpus.stratified_split(data, cfg)
    corpus.write_task1_csv(args.out_train, train)
    corpus.write_task1_csv(args.out_test, test)
    _write_sidecar(args.out_train, "split", resolved)
    _write_sidecar(args.out_test, "split", resolved)
    print(f"split {len(data)} examples into {len(train)} train / {len(test)} test")
    return 0


def _cmd_forms(args, resolved) -> int:
    data = corpus.load_task1_csv(getattr(args, "in"))
    lexicon = load_modal_lexicon(args.modal_lexicon) if args.modal_lexicon else DEFAULT_MODALS
    counts: dict[str, dict[str, int]] = {}
    for label in FormLabel:
        counts[label.value] = {"total": 0, "positive": 0, "negative": 0}
    for ex in data:
        form = classify_form(tokenize(ex.text), lexicon)
        bucket = counts[form.value]
        bucket["total"] += 1
        bucket["positive" if ex.label == 1 else "negative"] += 1
    width = max(len(name) for name in counts)
    print(f"{'form':<{width}}  total  positive  negative")
    for name, c in counts.items():
        print(f"{name:<{width}}  {c['total']:>5}  {c['positive']:>8}  {c['negative']:>8}")
    if args.out:
        _write_json(args.out, {"schema": "cfx/forms-report/v1", "config": resolved, "counts": counts})
    return 0


def _cmd_featurize(args, resolved) -> int:
    data = corpus.load_task1_csv(getattr(args, "in"))
    vcfg = _vectorizer_config(args)
    need_pos = "pos" in vcfg.channels
    parses = _load_parses(args.conllu, data)
    examples = [_example_for(ex, parses, need_pos) for ex in data]
    fitted = fit_vectorizer(examples, vcfg)
    _write_json(
        args.out,
        {"schema": "cfx/vectorizer-artifact/v1", "config": resolved, "vectorizer": json.loads(fitted.to_json())},
    )
    print(f"fitted {fitted.n_features} features from {len(data)} examples")
    return 0


def _fit_linear_bucket(
    examples: list[Example],
    labels: list[int],
    vcfg: VectorizerConfig,
    args,
) -> tuple[FittedVectorizer, LinearModel]:
    fitted = fit_vectorizer(examples, vcfg)
    vectors = vectorize_corpus(examples, fitted)
    class_weights = None
    if args.balance == "weights":
        class_weights = balance.class_weights(labels)
    elif args.balance == "oversample":
        vectors, labels = balance.oversample(vectors, labels, args.seed)
    elif args.balance == "undersample":
        vectors, labels = balance.undersample(vectors, labels, args.seed)
    elif args.balance == "smote":
        vectors, labels = balance.smote(vectors, labels, fitted.n_features, k=args.smote_k, seed=args.seed)
    tcfg = LinearTrainConfig(
        C=args.C, epochs=args.epochs, seed=args.seed, loss=args.loss, class_weights=class_weights
    )
    return fitted, train_linear(vectors, labels, fitted.n_features, tcfg)


def _cmd_train_linear(args, resolved) -> int:
    data = corpus.load_task1_csv(args.train)
    vcfg = _vectorizer_config(args)
    need_pos = "pos" in vcfg.channels
    parses = _load_parses(args.conllu, data)
    lexicon = load_modal_lexicon(args.modal_lexicon) if args.modal_lexicon else DEFAULT_MODALS

    if not args.per_form:
        examples = [_example_for(ex, parses, need_pos) for ex in data]
        fitted, model = _fit_linear_bucket(examples, [ex.label for ex in data], vcfg, args)
        _write_json(
            args.out,
            {
                "schema": "cfx/linear-artifact/v1",
                "config": resolved,
                "vectorizer": json.loads(fitted.to_json()),
                "model": json.loads(model.to_json()),
            },
        )
        print(f"trained on {len(data)} examples ({fitted.n_features} features)")
        return 0

    majority = 1 if sum(ex.label for ex in data) * 2 >= len(data) else 0
    buckets: dict[str, dict] = {}
    for form in FormLabel:
        members = [ex for ex in data if classify_form(tokenize(ex.text), lexicon) is form]
        labels = [ex.label for ex in members]
        if not members:
            buckets[form.value] = {"constant": majority}
            continue
        if len(set(labels)) < 2:
            buckets[form.value] = {"constant": labels[0]}
            continue
        examples = [_example_for(ex, parses, need_pos) for ex in members]
        fitted, model = _fit_linear_bucket(examples, labels, vcfg, args)
        buckets[form.value] = {
            "vectorizer": json.loads(fitted.to_json()),
            "model": json.loads(model.to_json()),
        }
        print(f"{form.value}: trained on {len(members)} examples ({fitted.n_features} features)")
    _write_json(
        args.out,
        {
            "schema": "cfx/perform-artifact/v1",
            "config": resolved,
            "modals": sorted(lexicon),
            "buckets": buckets,
        },
    )
    return 0


def _cmd_train_cnn(args, resolved) -> int:
    table = corpus.load_embeddings(args.embeddings)
    train = corpus.load_task1_csv(args.train)
    val = corpus.load_task1_csv(args.val)

    def to_pairs(rows):
        return [([t.surface for t in tokenize(ex.text)], ex.label) for ex in rows]
    cnn_cfg = CnnConfig(
        kernel_sizes=tuple(args.kernel_sizes),
        filters_per_size=args.filters,
        dropout_rate=args.dropout,
        max_len=args.max_len,
        embedding_dim=table.dim,
    )
    opt_cfg = OptimizerConfig(
        lr=args.lr,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    class_wts = None if args.balance == "weights" else {0: 1.0, 1: 1.0}
    model = train_cnn(to_pairs(train), to_pairs(val), table, cnn_cfg, opt_cfg, class_wts)
    save_cnn(model, args.out)
    _write_sidecar(args.out, "train-cnn", resolved)
    print(f"trained CNN on {len(train)} examples, checkpoint selected on {len(val)}")
    return 0


def _crf_training_rows(anns, parses, role):
    rows = []
    for ann in anns:
        parse = parses.get(ann.id)
        if parse is not None:
            tokens = [Token(t.surface, t.char_start, t.char_end) for t in parse.tokens]
            upos = [t.upos for t in parse.tokens]
        else:
            tokens = tokenize(ann.text)
            upos = None
        span = ann.antecedent if role == "antecedent" else ann.consequent
        tags = spans_to_bio(tokens, span, role)
        rows.append(([t.surface for t in tokens], upos, tags))
    return rows


def _cmd_train_crf(args, resolved) -> int:
    anns = corpus.load_task2_csv(args.train)
    parses = _load_parses(args.conllu, anns)
    rows = _crf_training_rows(anns, parses, args.role)
    cfg = CrfTrainConfig(
        l2_lambda=args.l2,
        lr=args.lr,
        lr_decay=args.lr_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    model = train_crf(rows, args.role, cfg)
    _write_json(
        args.out,
        {"schema": "cfx/crf-artifact/v1", "config": resolved, "model": json.loads(model.to_json())},
    )
    print(f"trained {args.role} tagger on {len(rows)} sentences ({len(model.feature_index)} features)")
    return 0


def _predict_with_artifact(args, data: list[corpus.LabeledSentence]) -> list[int]:
    if args.model.endswith(".npz"):
        if not args.embeddings:
            raise CfxError("CNN checkpoints need --embeddings to embed the input")
        model = load_cnn(args.model)
        table = corpus.load_embeddings(args.embeddings)
        if table.dim != model.config.embedding_dim:
            raise CfxError(f"embedding dim {table.dim} != model dim {model.config.embedding_dim}")
        min_len = max(model.config.kernel_sizes)
        out = []
        for ex in data:
            matrix = embed([t.surface for t in tokenize(ex.text)], table, model.config.max_len, min_len)
            out.append(int(np.argmax(forward(model, matrix)[0])))
        return out

    with open(args.model, encoding="utf-8") as fh:
        doc = json.load(fh)
    schema = doc.get("schema")
    if schema == "cfx/linear-artifact/v1":
        fitted = FittedVectorizer.from_json(json.dumps(doc["vectorizer"]))
        model = LinearModel.from_json(json.dumps(doc["model"]))
        need_pos = "pos" in fitted.config.channels
        parses = _load_parses(args.conllu, data)
        out = []
        for ex in data:
            x = vectorize(_example_for(ex, parses, need_pos), fitted)
            out.append(predict_linear(model, x)[0])
        return out
    if schema == "cfx/perform-artifact/v1":
        lexicon = frozenset(doc["modals"])
        loaded: dict[str, tuple[FittedVectorizer, LinearModel] | int] = {}
        for name, entry in doc["buckets"].items():
            if "constant" in entry:
                loaded[name] = int(entry["constant"])
            else:
                loaded[name] = (
                    FittedVectorizer.from_json(json.dumps(entry["vectorizer"])),
                    LinearModel.from_json(json.dumps(entry["model"])),
                )
        parses = _load_parses(args.conllu, data)
        out = []
        for ex in data:
            tokens = tokenize(ex.text)
            form = classify_form(tokens, lexicon).value
            if form not in loaded:
                raise CfxError(f"model artifact has no bucket for form {form!r}")
            entry = loaded[form]
            if isinstance(entry, int):
                out.append(entry)
            else:
                fitted, model = entry
                need_pos = "pos" in fitted.config.channels
                x = vectorize(_example_for(ex, parses, need_pos), fitted)
                out.append(predict_linear(model, x)[0])
        return out
    raise CfxError(f"unsupported model artifact schema {schema!r} in {args.model}")


def _cmd_predict(args, resolved) -> int:
    data = corpus.load_task1_csv(getattr(args, "in"))
    labels = _predict_with_artifact(args, data)
    _write_pred_csv(args.out, list(zip((ex.id for ex in data), labels)))
    _write_sidecar(args.out, "predict", resolved)
    print(f"predicted {len(data)} labels ({sum(labels)} positive)")
    return 0


def _cmd_ensemble(args, resolved) -> int:
    member_rows = [_load_pred_csv(path) for path in args.predictions]
    ids = [sid for sid, _ in member_rows[0]]
    for path, rows in zip(args.predictions[1:], member_rows[1:]):
        if [sid for sid, _ in rows] != ids:
            raise CfxError(f"{path}: prediction ids do not match {args.predictions[0]}")
    columns = [[label for _, label in rows] for rows in member_rows]
    voted = vote_many(columns, EnsembleConfig(threshold=args.threshold))
    _write_pred_csv(args.out, list(zip(ids, voted)))
    _write_sidecar(args.out, "ensemble", resolved)
    print(f"voted {len(member_rows)} members over {len(ids)} examples ({sum(voted)} positive)")
    return 0


def _load_crf_artifact(path: str) -> CrfModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != "cfx/crf-artifact/v1":
        raise CfxError(f"unsupported CRF artifact schema {doc.get('schema')!r} in {path}")
    return CrfModel.from_json(json.dumps(doc["model"]))


def _load_sentences_for_spans(path: str) -> list[tuple[str, str]]:
    """(id, text) pairs from either the labeled-sentence or task-2 layout."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header == corpus.TASK1_HEADER:
        return [(ex.id, ex.text) for ex in corpus.load_task1_csv(path)]
    if header == corpus.TASK2_HEADER:
        return [(ann.id, ann.text) for ann in corpus.load_task2_csv(path)]
    raise CfxError(f"{path}: expected a labeled-sentence or task-2 header, got {header}")


def _write_span_csv(path: str, rows: Sequence[tuple[str, str, SpanPrediction]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(corpus.TASK2_HEADER)
        for sid, text, pred in rows:
            ant = pred.antecedent if pred.antecedent is not None else (-1, -1)
            con = pred.consequent if pred.consequent is not None else (-1, -1)
            writer.writerow([sid, text, ant[0], ant[1], con[0], con[1]])


def _load_span_pred_csv(path: str) -> list[evaluation.SpanPredictionRecord]:
    out = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != corpus.TASK2_HEADER:
            raise CfxError(f"{path}: expected header {','.join(corpus.TASK2_HEADER)}, got {header}")
        for row in reader:
            if len(row) != 6:
                raise CfxError(f"{path}: malformed row at line {reader.line_num}")
            sid = row[0]
            if sid in seen:
                raise CfxError(f"{path}: duplicate id {sid!r} at line {reader.line_num}")
            seen.add(sid)
            try:
                ant: tuple[int, int] | None = (int(row[2]), int(row[3]))
                con: tuple[int, int] | None = (int(row[4]), int(row[5]))
            except ValueError as exc:
                raise CfxError(f"{path}: non-integer offset at line {reader.line_num}") from exc
            out.append(
                evaluation.SpanPredictionRecord(
                    sid, None if ant == (-1, -1) else ant, None if con == (-1, -1) else con
                )
            )
    return out


def _cmd_extract_spans(args, resolved) -> int:
    ant_model = _load_crf_artifact(args.ant_model)
    con_model = _load_crf_artifact(args.con_model)
    sentences = _load_sentences_for_spans(getattr(args, "in"))
    parses = {}
    if args.conllu:
        parses = corpus.load_conllu(args.conllu, dict(sentences))
    rows = []
    for sid, text in sentences:
        pred = predict_spans(text, parses.get(sid), ant_model, con_model)
        rows.append((sid, text, pred))
    _write_span_csv(args.out, rows)
    _write_sidecar(args.out, "extract-spans", resolved)
    print(f"extracted spans for {len(rows)} sentences")
    return 0


def _cmd_eval(args, resolved) -> int:
    if args.task == "1":
        gold_rows = corpus.load_task1_csv(args.gold)
        pred_map = dict(_load_pred_csv(args.pred))
        missing = [ex.id for ex in gold_rows if ex.id not in pred_map]
        if missing or len(pred_map) != len(gold_rows):
            raise CfxError(f"{args.pred}: prediction ids do not match gold ids")
        gold = [ex.label for ex in gold_rows]
        pred = [pred_map[ex.id] for ex in gold_rows]
        m = evaluation.prf_binary(gold, pred)
        metrics = {
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "tp": m.tp,
            "fp": m.fp,
            "fn": m.fn,
            "tn": m.tn,
        }
        print(f"precision {m.precision:.4f}  recall {m.recall:.4f}  f1 {m.f1:.4f}")
        print(f"tp {m.tp}  fp {m.fp}  fn {m.fn}  tn {m.tn}")
    else:
        gold_anns = corpus.load_task2_csv(args.gold)
        pred_map = {p.id: p for p in _load_span_pred_csv(args.pred)}
        missing = [ann.id for ann in gold_anns if ann.id not in pred_map]
        if missing or len(pred_map) != len(gold_anns):
            raise CfxError(f"{args.pred}: prediction ids do not match gold ids")
        preds = [pred_map[ann.id] for ann in gold_anns]
        m = evaluation.span_metrics(gold_anns, preds)
        metrics = {
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "exact_match": m.exact_match,
        }
        print(
            f"precision {m.precision:.4f}  recall {m.recall:.4f}  "
            f"f1 {m.f1:.4f}  exact_match {m.exact_match:.4f}"
        )
    if args.out:
        _write_json(args.out, {"schema": "cfx/metrics/v1", "config": resolved, "task": args.task, "metrics": metrics})
    return 0


_HANDLERS = {
    "split": _cmd_split,
    "forms": _cmd_forms,
    "featurize": _cmd_featurize,
    "train-linear": _cmd_train_linear,
    "train-cnn": _cmd_train_cnn,
    "train-crf": _cmd_train_crf,
    "predict": _cmd_predict,
    "ensemble": _cmd_ensemble,
    "extract-spans": _cmd_extract_spans,
    "eval": _cmd_eval,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser, by_name = _build_parser()
    args = parser.parse_args(argv)
    _, opts = SUBCOMMANDS[args.command]
    resolved = _resolve(args, by_name[args.command], opts)
    try:
        return _HANDLERS[args.command](args, resolved)
    except CfxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
