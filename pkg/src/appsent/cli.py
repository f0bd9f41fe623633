"""Command line entry point: ``appsent <command> [options]``.

Commands: ingest, bench, analyze, score-lexicon, export-model. Every option
can also come from a JSON file given with --config (keys are the option names
with dashes turned into underscores); options on the command line win.
Each command writes a manifest.json next to its outputs with the resolved
configuration, the seed and SHA-256 hashes of inputs and outputs.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from appsent import __version__, analysis, corpus, evaluation, lexicon
from appsent.evaluation import FEATURIZATION_NAMES, MODEL_ROWS, GridSpec
from appsent.pipeline import TextClassifier
from appsent.seeding import DEFAULT_SEED
from appsent.textprep import PrepConfig, load_stopwords, preprocess_corpus
from appsent.vectorize import fit_transform

log = logging.getLogger("appsent")

EXIT_OK, EXIT_PARTIAL, EXIT_FATAL = 0, 1, 2


class UsageError(Exception):
    """Fatal problem with the inputs; reported with exit code 2."""


@dataclass
class RunConfig:
    train: Optional[str] = None
    test: Optional[str] = None
    apps: Optional[str] = None
    students: Optional[str] = None
    reviews: Optional[str] = None
    model: Optional[str] = None
    stopwords: Optional[str] = None
    lexicon: Optional[str] = None
    input: Optional[str] = None
    out: str = "appsent-out"
    featurizations: list = field(default_factory=lambda: list(FEATURIZATION_NAMES))
    models: list = field(default_factory=lambda: list(MODEL_ROWS))
    algorithm: str = "LR"
    featurization: str = "uni"
    n_estimators: int = 10
    vote: str = "hard"
    max_features: Optional[int] = 20000
    remove_stopwords: bool = True
    stem: bool = True
    seed: int = DEFAULT_SEED
    jobs: int = 1

    @classmethod
    def build(cls, file_values, cli_values):
        known = {f.name for f in fields(cls)}
        unknown = set(file_values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged = {**file_values, **{k: v for k, v in cli_values.items()
                                    if k in known and v is not None}}
        return cls(**merged)

    @property
    def prep(self):
        return PrepConfig(self.remove_stopwords, self.stem, self.stopwords)

    def manifest_view(self, keys):
        d = asdict(self)
        return {k: d[k] for k in sorted(keys)}


# ----------------------------------------------------------------------------
# helpers


def _require(cfg, *names):
    for name in names:
        path = getattr(cfg, name)
        if path is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
        if not os.path.isfile(path):
            raise UsageError(f"input file not found: {path}")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_atomic(path, text):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.chmod(tmp, 0o644)  # mkstemp creates 0600
    os.replace(tmp, path)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_manifest(cfg, command, keys, inputs, outputs, extra=None):
    manifest = {
        "command": command,
        "appsent_version": __version__,
        "seed": cfg.seed,
        "config": cfg.manifest_view(keys),
        "inputs": {name: {"path": getattr(cfg, name), "sha256": _sha256(getattr(cfg, name))}
                   for name in inputs if getattr(cfg, name)},
        "outputs": {os.path.relpath(p, cfg.out): _sha256(p) for p in sorted(outputs)},
    }
    if extra:
        manifest.update(extra)
    _write_atomic(os.path.join(cfg.out, "manifest.json"), _dump(manifest))


def _load_reviews(path, source=corpus.Source.GOOGLE):
    loaded = corpus.load_review_corpus(path, source)
    if not loaded.records:
        raise UsageError(f"{path}: no usable review rows")
    return loaded


def _check_labels(records, path):
    if len({r.label for r in records}) < 2:
        raise UsageError(f"{path}: training data holds a single class")


# ----------------------------------------------------------------------------
# commands


def cmd_ingest(cfg):
    if not (cfg.train or cfg.test or cfg.apps):
        raise UsageError("ingest needs at least one of --train, --test, --apps")
    for name in ("train", "test", "apps"):
        if getattr(cfg, name):
            _require(cfg, name)
    outputs, report = [], {}
    if cfg.train:
        loaded = corpus.load_review_corpus(cfg.train)
        path = os.path.join(cfg.out, "train_reviews.csv")
        corpus.write_records(loaded.records, path)
        outputs.append(path)
        report["train"] = loaded.report.to_dict()
        report["train"]["neutral_retained"] = len(loaded.neutral)
    if cfg.test:
        loaded = corpus.load_student_survey(cfg.test)
        students = os.path.join(cfg.out, "students.csv")
        reviews = os.path.join(cfg.out, "test_reviews.csv")
        corpus.write_records(loaded.records, students)
        corpus.write_records([s.to_review() for s in loaded.records], reviews)
        outputs += [students, reviews]
        report["test"] = loaded.report.to_dict()
    if cfg.apps:
        loaded = corpus.load_app_metadata(cfg.apps)
        path = os.path.join(cfg.out, "apps.csv")
        corpus.write_records(loaded.records, path)
        outputs.append(path)
        report["apps"] = loaded.report.to_dict()
        report["apps"]["distinct_apps"] = len({a.app_name for a in loaded.records})
    report_path = os.path.join(cfg.out, "load_report.json")
    _write_atomic(report_path, _dump(report))
    outputs.append(report_path)
    _write_manifest(cfg, "ingest", ["train", "test", "apps"], ["train", "test", "apps"], outputs)
    for name, r in report.items():
        print(f"{name}: {r['loaded']} loaded, {r['dropped_count']} dropped of {r['total_rows']}")
    return EXIT_OK


def cmd_bench(cfg):
    _require(cfg, "train", "test")
    train = _load_reviews(cfg.train).records
    test = _load_reviews(cfg.test, corpus.Source.STUDENT).records
    _check_labels(train, cfg.train)
    try:
        spec = GridSpec(tuple(cfg.models), tuple(cfg.featurizations), cfg.seed,
                        n_estimators=cfg.n_estimators, vote=cfg.vote,
                        max_features=cfg.max_features)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    load_stopwords(cfg.stopwords)
    train_docs = preprocess_corpus([r.raw_text for r in train], cfg.prep)
    test_docs = preprocess_corpus([r.raw_text for r in test], cfg.prep)
    reports = evaluation.run_matrix(train_docs, [r.label for r in train],
                                    test_docs, [r.label for r in test], spec, jobs=cfg.jobs)

    outputs = []
    for r in reports:
        name = f"{r.model.replace('(', '_').replace(')', '')}__{r.featurization}.json"
        path = os.path.join(cfg.out, "cells", name)
        _write_atomic(path, _dump(r.to_dict()))
        outputs.append(path)
    for name, text in (("accuracy.csv", evaluation.accuracy_table(reports)),
                       ("fscore.csv", evaluation.fscore_table(reports)),
                       ("reports.json", evaluation.reports_to_json(reports))):
        path = os.path.join(cfg.out, name)
        _write_atomic(path, text)
        outputs.append(path)
    failed = [f"{r.model}/{r.featurization}: {r.error}" for r in reports if not r.ok]
    keys = ["train", "test", "stopwords", "featurizations", "models", "n_estimators",
            "vote", "max_features", "remove_stopwords", "stem", "seed"]
    _write_manifest(cfg, "bench", keys, ["train", "test", "stopwords"], outputs,
                    {"failed_cells": failed})
    sys.stdout.write(evaluation.accuracy_table(reports))
    for f in failed:
        log.error("cell failed: %s", f)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_analyze(cfg):
    _require(cfg, "apps", "students")
    for name in ("reviews", "model", "lexicon"):
        if getattr(cfg, name):
            _require(cfg, name)
    apps = corpus.load_app_metadata(cfg.apps).records
    students = corpus.load_student_survey(cfg.students).records
    reviews = corpus.load_review_corpus(cfg.reviews).records if cfg.reviews else []
    lex = lexicon.load_lexicon(cfg.lexicon)
    model = TextClassifier.load(cfg.model) if cfg.model else None
    if model is None:
        print("no --model given: rq6 (confusion matrix) omitted", file=sys.stderr)
    sections = analysis.rq_report(apps, students, lex, reviews, model)
    outputs = []
    for key, section in sections.items():
        path = os.path.join(cfg.out, analysis.RQ_FILES[key])
        _write_atomic(path, analysis.section_csv(section))
        outputs.append(path)
    path = os.path.join(cfg.out, analysis.SUMMARY_FILE)
    _write_atomic(path, analysis.summary_json(sections))
    outputs.append(path)
    _write_manifest(cfg, "analyze", ["apps", "students", "reviews", "model", "lexicon", "seed"],
                    ["apps", "students", "reviews", "model", "lexicon"], outputs)
    print(f"wrote {len(sections)} research-question sections to {cfg.out}")
    return EXIT_OK


def cmd_score_lexicon(cfg):
    _require(cfg, "input")
    if cfg.lexicon:
        _require(cfg, "lexicon")
    lex = lexicon.load_lexicon(cfg.lexicon)
    loaded = corpus.load_review_corpus(cfg.input)
    rows = [(r.app_name, r.raw_text, r.label.value) for r in loaded.records]
    rows += [(app, text, "Neutral") for app, text in loaded.neutral]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["app_name", "raw_text", "label", "polarity", "subjectivity", "orientation"])
    for app, text, label in rows:
        s = lexicon.score_text(text, lex)
        w.writerow([app, text, label, repr(s.polarity), repr(s.subjectivity),
                    s.orientation.value])
    path = os.path.join(cfg.out, "lexicon_scores.csv")
    _write_atomic(path, buf.getvalue())
    _write_manifest(cfg, "score-lexicon", ["input", "lexicon"], ["input", "lexicon"], [path])
    print(f"scored {len(rows)} reviews -> {path}")
    return EXIT_OK


def cmd_export_model(cfg):
    _require(cfg, "train")
    if cfg.algorithm not in MODEL_ROWS:
        raise UsageError(f"--algorithm must be one of {MODEL_ROWS}")
    if cfg.featurization not in FEATURIZATION_NAMES:
        raise UsageError(f"--featurization must be one of {FEATURIZATION_NAMES}")
    train = _load_reviews(cfg.train).records
    _check_labels(train, cfg.train)
    docs = preprocess_corpus([r.raw_text for r in train], cfg.prep)
    labels = [r.label for r in train]
    dataset = fit_transform(docs, labels,
                            evaluation.vectorizer_config(cfg.featurization, cfg.max_features))
    spec = GridSpec((cfg.algorithm,), (cfg.featurization,), cfg.seed,
                    n_estimators=cfg.n_estimators, vote=cfg.vote,
                    max_features=cfg.max_features)
    fitted = evaluation.fit_cell(spec, cfg.algorithm, cfg.featurization, dataset)
    pipe = TextClassifier(cfg.prep, dataset.vocabulary, fitted)
    path = os.path.join(cfg.out, "model.json")
    _write_atomic(path, pipe.dumps())
    keys = ["train", "algorithm", "featurization", "n_estimators", "vote", "max_features",
            "remove_stopwords", "stem", "stopwords", "seed"]
    _write_manifest(cfg, "export-model", keys, ["train", "stopwords"], [path])
    print(f"wrote {cfg.algorithm} / {cfg.featurization} model to {path}")
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "bench": cmd_bench,
    "analyze": cmd_analyze,
    "score-lexicon": cmd_score_lexicon,
    "export-model": cmd_export_model,
}


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--jobs", type=int, help="parallel worker processes (default 1)")
    common.add_argument("--out", help="output directory (default ./appsent-out)")
    common.add_argument("-v", "--verbose", action="store_true")

    prep = argparse.ArgumentParser(add_help=False)
    prep.add_argument("--stopwords", help="stopword file (default: shipped list)")
    prep.add_argument("--remove-stopwords", type=_bool, metavar="BOOL")
    prep.add_argument("--stem", type=_bool, metavar="BOOL")

    parser = argparse.ArgumentParser(prog="appsent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"appsent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="clean and export the corpora")
    p.add_argument("--train", help="review corpus CSV (app, text, label/rating)")
    p.add_argument("--test", help="student survey CSV")
    p.add_argument("--apps", help="13-column app metadata CSV")

    p = sub.add_parser("bench", parents=[common, prep], help="model x featurization grid")
    p.add_argument("--train", help="training review corpus CSV")
    p.add_argument("--test", help="test review corpus CSV")
    p.add_argument("--models", type=_csv_list, help=f"comma list from {','.join(MODEL_ROWS)}")
    p.add_argument("--featurizations", type=_csv_list,
                   help=f"comma list from {','.join(FEATURIZATION_NAMES)}")
    p.add_argument("--n-estimators", type=int, help="bagging members (default 10)")
    p.add_argument("--vote", choices=["hard", "soft"])
    p.add_argument("--max-features", type=int, help="vocabulary cap (default 20000)")

    p = sub.add_parser("analyze", parents=[common], help="research-question statistics")
    p.add_argument("--apps", help="app metadata CSV")
    p.add_argument("--students", help="student survey CSV")
    p.add_argument("--reviews", help="store review corpus CSV (sentiment scatter)")
    p.add_argument("--model", help="model.json from export-model (enables rq6)")
    p.add_argument("--lexicon", help="lexicon file (default: shipped lexicon)")

    p = sub.add_parser("score-lexicon", parents=[common], help="lexicon polarity per review")
    p.add_argument("--input", help="review corpus CSV")
    p.add_argument("--lexicon", help="lexicon file (default: shipped lexicon)")

    p = sub.add_parser("export-model", parents=[common, prep], help="train and save one model")
    p.add_argument("--train", help="training review corpus CSV")
    p.add_argument("--algorithm", help=f"one of {','.join(MODEL_ROWS)} (default LR)")
    p.add_argument("--featurization", help="uni, bi or tri (default uni)")
    p.add_argument("--n-estimators", type=int)
    p.add_argument("--vote", choices=["hard", "soft"])
    p.add_argument("--max-features", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        file_values = {}
        if args.config:
            if not os.path.isfile(args.config):
                raise UsageError(f"config file not found: {args.config}")
            with open(args.config, encoding="utf-8") as fh:
                try:
                    file_values = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise UsageError(f"{args.config}: not valid JSON ({exc})") from None
            if not isinstance(file_values, dict):
                raise UsageError(f"{args.config}: expected a JSON object")
        cfg = RunConfig.build(file_values, vars(args))
        if cfg.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return COMMANDS[args.command](cfg)
    except (UsageError, corpus.CorpusError) as exc:
        print(f"appsent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
