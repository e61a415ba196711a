"""Command-line front end.

Every stage reads and writes plain files in one working directory::

    corpus.jsonl      ingest      documents with gold label and split
    tokens.jsonl      preprocess  stemmed tokens of every document
    vocab.json        vectorize   vocabulary, document frequencies, scaling maxima
    vectors.csv       vectorize   training-split TF-IDF vectors in [0, 1]
    vectors_test.csv  vectorize   test-split vectors, scaled with the training maxima
    model.json        train       Fuzzy ART category weights
    assignments.csv   train       training document -> category
    pv_model.json     classify    Paragraph Vector parameters
    topics.csv        classify    test document -> ranked categories
    report.json       evaluate    precision / recall / F for ClusART and kNN
    sweep.csv         sweep       category count per vigilance value

Each run also writes ``run_config.json`` with the effective parameters;
``--config`` replays it. ``CLUSART_SEED`` overrides the seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import evaluation as ev
from . import fuzzyart, textprep, vectorizer
from .exceptions import ClusartError, ParameterError
from .pvec import ParagraphVectorClassifier, load_topics, save_topics
from .pvec.classifier import TopicPrediction
from .pvec.model import validate_pv_params
from .synthetic import generate_topic_corpus

logger = logging.getLogger("clusart")

CONFIG_NAME = "run_config.json"
SEED_ENV = "CLUSART_SEED"

COMMANDS = ("ingest", "preprocess", "vectorize", "train", "classify", "evaluate", "sweep",
            "pipeline")

# parameter groups used by each command
_GROUPS = {
    "ingest": ("corpus",),
    "preprocess": ("prep",),
    "vectorize": ("vec",),
    "train": ("art",),
    "classify": ("pv",),
    "evaluate": ("eval",),
    "sweep": ("art", "grid"),
    "pipeline": ("corpus", "prep", "vec", "art", "pv", "eval", "pipeline_grid"),
}


class UsageError(Exception):
    pass


# -- argument parsing ----------------------------------------------------


def _add_group(p, group):
    if group == "corpus":
        g = p.add_argument_group("corpus")
        g.add_argument("--input", help="directory with one subdirectory per topic")
        g.add_argument("--synthetic", action="store_true",
                       help="use the bundled 4-topic synthetic corpus instead of --input")
        g.add_argument("--strip-headers", action=argparse.BooleanOptionalAction, default=False,
                       help="drop e-mail style headers (lines up to the first blank line)")
        g.add_argument("--split", choices=("random", "predefined"), default="random")
        g.add_argument("--train-ratio", type=float, default=0.8)
        g.add_argument("--seed", type=int, default=0)
    elif group == "prep":
        p.add_argument("--stoplist", help="stopword file, one word per line (default: bundled)")
    elif group == "vec":
        p.add_argument("--n-features", type=int, default=1000,
                       help="vocabulary size: the n most frequent training stems")
    elif group == "art":
        g = p.add_argument_group("Fuzzy ART")
        g.add_argument("--alpha", type=float, default=0.2, help="choice parameter (> 0)")
        g.add_argument("--beta", type=float, default=0.4, help="learning rate in [0, 1]")
        g.add_argument("--rho", type=float, default=0.8, help="vigilance in [0, 1]")
        g.add_argument("--fast-commit", action=argparse.BooleanOptionalAction, default=True)
        g.add_argument("--max-epochs", type=int, default=50)
        g.add_argument("--input-mode", choices=fuzzyart.INPUT_MODES,
                       default=fuzzyart.COMPLEMENT_CODING)
    elif group == "pv":
        g = p.add_argument_group("Paragraph Vector")
        g.add_argument("--pv-mode", choices=("pv_dm", "pv_dbow"), default="pv_dm")
        g.add_argument("--pv-combine", choices=("average", "concatenate"), default="average")
        g.add_argument("--pv-para-dim", type=int, default=50)
        g.add_argument("--pv-word-dim", type=int, default=50)
        g.add_argument("--pv-window", type=int, default=4)
        g.add_argument("--pv-epochs", type=int, default=20)
        g.add_argument("--pv-learning-rate", type=float, default=0.025)
        g.add_argument("--pv-min-learning-rate", type=float, default=1e-4)
        g.add_argument("--pv-min-count", type=int, default=2)
        g.add_argument("--pv-infer-epochs", type=int, default=20)
        if "--seed" not in p._option_string_actions:
            g.add_argument("--seed", type=int, default=0)
    elif group == "eval":
        p.add_argument("--knn-k", type=int, default=5, help="neighbours for the kNN baseline")
    elif group == "grid":
        p.add_argument("--rho-grid", default="0.1:0.9:0.1", help="start:stop:step")
    elif group == "pipeline_grid":
        p.add_argument("--rho-grid", default=None,
                       help="also write sweep.csv for this start:stop:step grid")


def build_parser():
    parser = argparse.ArgumentParser(prog="clusart", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--workdir", default=".", help="directory for input and output artifacts")
        p.add_argument("--config", help="replay the parameters of a run_config.json")
        p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                       help="sequential execution (every stage is sequential today)")
        for group in _GROUPS[name]:
            _add_group(p, group)
        subparsers[name] = p
    parser.subparsers = subparsers
    return parser


def parse_args(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                saved = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if saved.get("command") != args.command:
            parser.error(f"config was written by {saved.get('command')!r}, not {args.command!r}")
        sub = parser.subparsers[args.command]
        known = {a.dest for a in sub._actions}
        sub.set_defaults(**{k: v for k, v in saved.get("params", {}).items() if k in known})
        args = parser.parse_args(argv)
    seed = os.environ.get(SEED_ENV)
    if seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(seed)
        except ValueError:
            parser.error(f"{SEED_ENV} must be an integer, got {seed!r}")
    return args


def effective_params(args) -> dict:
    skip = {"command", "workdir", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def write_run_config(args, workdir: Path) -> None:
    payload = {"command": args.command, "params": effective_params(args)}
    with open(workdir / CONFIG_NAME, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- validation ----------------------------------------------------------


def _art_params(a):
    return dict(alpha=a.alpha, beta=a.beta, rho=a.rho, fast_commit=a.fast_commit,
                max_epochs=a.max_epochs, input_mode=a.input_mode)


def _pv_params(a):
    return dict(para_dim=a.pv_para_dim, word_dim=a.pv_word_dim, window=a.pv_window,
                mode=a.pv_mode, combine=a.pv_combine, epochs=a.pv_epochs,
                learning_rate=a.pv_learning_rate, min_learning_rate=a.pv_min_learning_rate,
                min_count=a.pv_min_count, infer_epochs=a.pv_infer_epochs, seed=a.seed)


def validate(args) -> None:
    """Raise ParameterError for any out-of-range parameter."""
    groups = _GROUPS[args.command]
    if "corpus" in groups:
        if bool(args.input) == bool(args.synthetic):
            raise ParameterError("give exactly one of --input or --synthetic")
        if not 0.0 < args.train_ratio < 1.0:
            raise ParameterError(f"--train-ratio must lie in (0, 1), got {args.train_ratio}")
        if args.input and not Path(args.input).is_dir():
            raise ParameterError(f"input directory not found: {args.input}")
    if "prep" in groups and args.stoplist and not Path(args.stoplist).is_file():
        raise ParameterError(f"stoplist not found: {args.stoplist}")
    if "vec" in groups and args.n_features < 1:
        raise ParameterError(f"--n-features must be >= 1, got {args.n_features}")
    if "art" in groups:
        fuzzyart.validate_params(args.alpha, args.beta, args.rho, args.max_epochs,
                                 args.input_mode)
    if "pv" in groups:
        validate_pv_params(_pv_params(args))
    if "eval" in groups and args.knn_k < 1:
        raise ParameterError(f"--knn-k must be >= 1, got {args.knn_k}")
    if getattr(args, "rho_grid", None):
        grid = ev.parse_grid(args.rho_grid)
        if grid[0] < 0.0 or grid[-1] > 1.0:
            raise ParameterError(f"--rho-grid values must lie in [0, 1], got {args.rho_grid}")


def _require(workdir: Path, *names):
    for name in names:
        if not (workdir / name).is_file():
            raise UsageError(f"missing input artifact {workdir / name}; run the earlier stage first")


_INPUTS = {
    "preprocess": ("corpus.jsonl",),
    "vectorize": ("corpus.jsonl", "tokens.jsonl"),
    "train": ("vectors.csv",),
    "classify": ("corpus.jsonl", "tokens.jsonl", "assignments.csv"),
    "evaluate": ("corpus.jsonl", "assignments.csv", "topics.csv", "vectors.csv",
                 "vectors_test.csv"),
    "sweep": ("vectors.csv",),
}


# -- stages --------------------------------------------------------------


def _split_ids(corpus):
    train = [d.id for d in corpus if d.split != corpus_mod.TEST]
    test = [d.id for d in corpus if d.split == corpus_mod.TEST]
    return train, test


def run_ingest(a, wd: Path) -> str:
    if a.synthetic:
        corpus = generate_topic_corpus(seed=a.seed)
    else:
        corpus = corpus_mod.load_newsgroups_dir(a.input, strip_headers=a.strip_headers)
    corpus = corpus_mod.split_corpus(corpus, a.split, a.train_ratio, a.seed)
    corpus_mod.save_manifest(corpus, wd / "corpus.jsonl")
    train, test = _split_ids(corpus)
    return (f"ingest: {len(corpus)} documents, {len(corpus.labels)} labels, "
            f"{len(train)} train / {len(test)} test, {corpus.decode_warnings} decode warnings")


def run_preprocess(a, wd: Path) -> str:
    corpus = corpus_mod.load_manifest(wd / "corpus.jsonl")
    stoplist = textprep.load_stoplist(a.stoplist)
    docs = [textprep.preprocess_document(d, stoplist) for d in corpus]
    textprep.save_tokens(docs, wd / "tokens.jsonl")
    return f"preprocess: {sum(len(d.tokens) for d in docs)} tokens"


def run_vectorize(a, wd: Path) -> str:
    corpus = corpus_mod.load_manifest(wd / "corpus.jsonl")
    tokens = {d.id: d.tokens for d in textprep.load_tokens(wd / "tokens.jsonl")}
    train, test = _split_ids(corpus)
    missing = [i for i in train + test if i not in tokens]
    if missing:
        raise ClusartError(f"tokens.jsonl lacks document {missing[0]!r}")
    vec = vectorizer.TopNTfidfVectorizer(a.n_features).fit([tokens[i] for i in train])
    vectorizer.save_vocabulary(vec.vocabulary_, vec.scaling_maxima_, wd / "vocab.json")
    vectorizer.save_vectors(train, vec.transform([tokens[i] for i in train]), wd / "vectors.csv")
    X_test = (vec.transform([tokens[i] for i in test]) if test
              else np.zeros((0, vec.n_features_out_)))
    vectorizer.save_vectors(test, X_test, wd / "vectors_test.csv")
    return f"vectorize: {vec.n_features_out_} features, {len(train)} train / {len(test)} test"


def run_train(a, wd: Path) -> str:
    ids, X = vectorizer.load_vectors(wd / "vectors.csv")
    model = fuzzyart.FuzzyART(**_art_params(a)).fit(X, doc_ids=ids)
    fuzzyart.save_model(model, wd / "model.json")
    fuzzyart.save_assignments(model.assignments_, wd / "assignments.csv")
    state = "converged" if model.converged_ else "stopped at max_epochs"
    return f"train: {model.n_categories_} categories after {model.n_epochs_} epochs ({state})"


def run_classify(a, wd: Path) -> str:
    corpus = corpus_mod.load_manifest(wd / "corpus.jsonl")
    tokens = {d.id: d.tokens for d in textprep.load_tokens(wd / "tokens.jsonl")}
    assignments = fuzzyart.load_assignments(wd / "assignments.csv")
    _, test = _split_ids(corpus)
    clf = ParagraphVectorClassifier(**_pv_params(a)).fit(
        [tokens[x.doc_id] for x in assignments], [x.category for x in assignments],
        doc_ids=[x.doc_id for x in assignments])
    clf.embedding_.model_.save(wd / "pv_model.json")
    predictions = clf.rank([tokens[i] for i in test], doc_ids=test)
    save_topics(predictions, wd / "topics.csv")
    n_fallback = sum(p.fallback for p in predictions)
    return f"classify: {len(predictions)} test documents ranked, {n_fallback} fallback(s)"


def evaluate_artifacts(corpus, assignments, topics: list[TopicPrediction], train_vectors,
                       test_vectors, k) -> dict:
    gold = {d.id: d.gold_label for d in corpus}
    unlabeled = [i for i, lab in gold.items() if lab is None]
    if unlabeled:
        raise ClusartError(f"evaluation needs gold labels; {unlabeled[0]!r} has none")
    label_map = ev.map_clusters_majority(assignments, gold)
    train_report = ev.prf([label_map[x.category] for x in assignments],
                          [gold[x.doc_id] for x in assignments])
    test_gold = [gold[p.doc_id] for p in topics]
    clusart_report = ev.prf([label_map.get(p.category, "") for p in topics], test_gold)
    (train_ids, X_train), (test_ids, X_test) = train_vectors, test_vectors
    if [p.doc_id for p in topics] != test_ids:
        raise ClusartError("topics.csv and vectors_test.csv list different documents")
    knn = ev.KNNTopicClassifier(k).fit(X_train, [gold[i] for i in train_ids])
    knn_pred = knn.predict(X_test).tolist() if len(test_ids) else []
    knn_report = ev.prf(knn_pred, test_gold)
    return {
        "clusart": clusart_report.to_dict(),
        "knn": {"k": k, **knn_report.to_dict()},
        "clusters": {"n_categories": len(label_map.mapping),
                     "labels": {str(c): lab for c, lab in label_map.mapping.items()},
                     "coverage": label_map.coverage, "train": train_report.to_dict()},
    }


def run_evaluate(a, wd: Path) -> str:
    report = evaluate_artifacts(
        corpus_mod.load_manifest(wd / "corpus.jsonl"),
        fuzzyart.load_assignments(wd / "assignments.csv"), load_topics(wd / "topics.csv"),
        vectorizer.load_vectors(wd / "vectors.csv"),
        vectorizer.load_vectors(wd / "vectors_test.csv"), a.knn_k)
    with open(wd / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    return (f"evaluate: ClusART macro-F {report['clusart']['macro']['f_measure']:.4f}, "
            f"kNN macro-F {report['knn']['macro']['f_measure']:.4f}")


def run_sweep(a, wd: Path) -> str:
    _, X = vectorizer.load_vectors(wd / "vectors.csv")
    params = _art_params(a)
    params.pop("rho")
    rows = ev.vigilance_sweep(X, ev.parse_grid(a.rho_grid), **params)
    ev.save_sweep(rows, wd / "sweep.csv")
    return "sweep: " + ", ".join(f"{r:g}->{n}" for r, n in rows)


_STAGES = {
    "ingest": run_ingest, "preprocess": run_preprocess, "vectorize": run_vectorize,
    "train": run_train, "classify": run_classify, "evaluate": run_evaluate, "sweep": run_sweep,
}


def run_pipeline(a, wd: Path) -> str:
    lines = [_STAGES[name](a, wd) for name in
             ("ingest", "preprocess", "vectorize", "train", "classify", "evaluate")]
    if a.rho_grid:
        lines.append(run_sweep(a, wd))
    return "\n".join(lines)


_STAGES["pipeline"] = run_pipeline


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="clusart: %(levelname)s: %(message)s")
    args = parse_args(argv)
    wd = Path(args.workdir)
    try:
        validate(args)
        _require(wd, *_INPUTS.get(args.command, ()))
        wd.mkdir(parents=True, exist_ok=True)
    except (ParameterError, UsageError) as exc:
        print(f"clusart {args.command}: error: {exc}", file=sys.stderr)
        return 2
    write_run_config(args, wd)
    try:
        print(_STAGES[args.command](args, wd))
    except (ClusartError, ValueError, OSError, KeyError) as exc:
        print(f"clusart {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
