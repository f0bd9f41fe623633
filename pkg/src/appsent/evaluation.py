"""Confusion matrices, precision / recall / F / accuracy, and the model grid.

Positive is always the positive class. Metrics with a zero denominator are
0 rather than an error so a degenerate cell never stops a grid run.
"""

import csv
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from appsent import classifiers
from appsent.classifiers import ModelConfig
from appsent.ensemble import BaggingConfig, fit_bagging
from appsent.labels import encode
from appsent.seeding import DEFAULT_SEED, derive_seed
from appsent.vectorize import (
    FEATURIZATIONS,
    VectorizedDataset,
    VectorizerConfig,
    fit_vocabulary,
    transform_corpus,
)


class LengthMismatch(ValueError):
    pass


class EmptyEvaluation(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self):
        return asdict(self)


def confusion(predictions, truths):
    p = encode(predictions) if not isinstance(predictions, np.ndarray) else predictions
    t = encode(truths) if not isinstance(truths, np.ndarray) else truths
    p, t = np.asarray(p).astype(bool), np.asarray(t).astype(bool)
    if p.shape != t.shape:
        raise LengthMismatch(f"{p.size} predictions for {t.size} truths")
    if p.size == 0:
        raise EmptyEvaluation("nothing to evaluate")
    return ConfusionMatrix(tp=int(np.sum(p & t)), fp=int(np.sum(p & ~t)),
                           fn=int(np.sum(~p & t)), tn=int(np.sum(~p & ~t)))


def precision(c):
    d = c.tp + c.fp
    return c.tp / d if d else 0.0


def recall(c):
    d = c.tp + c.fn
    return c.tp / d if d else 0.0


def f_measure(c):
    p, r = precision(c), recall(c)
    return 2 * p * r / (p + r) if p + r else 0.0


def accuracy(c):
    return (c.tp + c.tn) / c.total if c.total else 0.0


@dataclass
class EvaluationReport:
    model: str
    featurization: str
    confusion: Optional[ConfusionMatrix]
    precision: float = 0.0
    recall: float = 0.0
    f_measure: float = 0.0
    accuracy: float = 0.0
    error: Optional[str] = None
    warnings: list = field(default_factory=list)

    @classmethod
    def from_confusion(cls, model, featurization, c, notes=()):
        return cls(model, featurization, c, precision(c), recall(c), f_measure(c),
                   accuracy(c), None, list(notes))

    @classmethod
    def failed(cls, model, featurization, error):
        return cls(model, featurization, None, error=error)

    @property
    def ok(self):
        return self.error is None

    def to_dict(self):
        d = asdict(self)
        d["confusion"] = None if self.confusion is None else self.confusion.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("confusion") is not None:
            d["confusion"] = ConfusionMatrix(**d["confusion"])
        return cls(**d)


# ----------------------------------------------------------------------------
# Model grid

# Row order of the published comparison tables.
MODEL_ROWS = ("SVM", "KNN", "LR", "RF", "NB", "LR(Bagging)", "NB(Bagging)")
FEATURIZATION_NAMES = tuple(FEATURIZATIONS)


@dataclass(frozen=True)
class GridSpec:
    models: tuple = MODEL_ROWS
    featurizations: tuple = FEATURIZATION_NAMES
    seed: int = DEFAULT_SEED
    hyperparameters: dict = field(default_factory=dict)  # algorithm -> overrides
    n_estimators: int = 10
    vote: str = "hard"
    max_features: Optional[int] = 20000

    def __post_init__(self):
        bad = [m for m in self.models if m not in MODEL_ROWS]
        if bad:
            raise ValueError(f"unknown model rows {bad}; choose from {MODEL_ROWS}")
        bad = [f for f in self.featurizations if f not in FEATURIZATIONS]
        if bad:
            raise ValueError(f"unknown featurizations {bad}; choose from {FEATURIZATION_NAMES}")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")


def _cell_seed(spec, model, featurization):
    # Keyed by canonical positions so a cell's seed does not depend on which
    # other cells were requested.
    return derive_seed(spec.seed, MODEL_ROWS.index(model),
                       FEATURIZATION_NAMES.index(featurization))


def fit_cell(spec, model, featurization, train):
    seed = _cell_seed(spec, model, featurization)
    algo = model.split("(")[0]
    base = ModelConfig(algo, dict(spec.hyperparameters.get(algo, {})), seed)
    if model.endswith("(Bagging)"):
        return fit_bagging(train, BaggingConfig(base, spec.n_estimators, seed, spec.vote))
    return classifiers.fit(train, base)


def _run_cell(args):
    spec, model, featurization, train, test = args
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fitted = fit_cell(spec, model, featurization, train)
            pred = classifiers.predict_batch(fitted, test.matrix)
        notes = sorted({str(w.message) for w in caught})
        return EvaluationReport.from_confusion(model, featurization,
                                               confusion(pred, test.y), notes)
    except Exception as exc:  # recorded per cell, the grid carries on
        return EvaluationReport.failed(model, featurization, f"{type(exc).__name__}: {exc}")


def vectorizer_config(featurization, max_features=20000):
    config = FEATURIZATIONS[featurization]
    if max_features != config.max_features:
        config = VectorizerConfig.from_dict({**config.to_dict(), "max_features": max_features})
    return config


def featurize(train_docs, train_labels, test_docs, test_labels, featurization,
              max_features=20000):
    config = vectorizer_config(featurization, max_features)
    vocab = fit_vocabulary(train_docs, config)
    train = VectorizedDataset(transform_corpus(train_docs, vocab), encode(train_labels), vocab)
    test = VectorizedDataset(transform_corpus(test_docs, vocab), encode(test_labels), vocab)
    return train, test


def run_matrix(train_docs, train_labels, test_docs, test_labels, spec=GridSpec(), jobs=1):
    """Train and evaluate every (model row, featurization) cell.

    ``*_docs`` are token sequences (TokenizedDocument or lists of tokens).
    Reports come back in grid order: featurizations outer, model rows inner
    in the canonical row order, whatever order the cells finish in.
    """
    tasks = []
    for feat in spec.featurizations:
        train, test = featurize(train_docs, train_labels, test_docs, test_labels, feat,
                                spec.max_features)
        for model in MODEL_ROWS:
            if model in spec.models:
                tasks.append((spec, model, feat, train, test))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell, tasks))
    return [_run_cell(t) for t in tasks]


# ----------------------------------------------------------------------------
# Export


def _table(reports, metric, fmt):
    feats = [f for f in FEATURIZATION_NAMES if any(r.featurization == f for r in reports)]
    models = [m for m in MODEL_ROWS if any(r.model == m for r in reports)]
    cell = {(r.model, r.featurization): r for r in reports}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model"] + feats)
    for m in models:
        row = [m]
        for f in feats:
            r = cell.get((m, f))
            row.append("" if r is None or not r.ok else fmt(getattr(r, metric)))
        w.writerow(row)
    return buf.getvalue()


def accuracy_table(reports):
    """CSV of accuracy in percent, rows = models, columns = featurizations."""
    return _table(reports, "accuracy", lambda v: f"{100 * v:.2f}")


def fscore_table(reports):
    return _table(reports, "f_measure", lambda v: f"{v:.4f}")


def reports_to_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def reports_from_json(text):
    return [EvaluationReport.from_dict(d) for d in json.loads(text)]
