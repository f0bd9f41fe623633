"""The five classifiers behind one fit / predict contract.

>>> model = fit(dataset, ModelConfig("LR"))
>>> predict(model, dataset.vector(0))
"""

import json

import numpy as np

from appsent.classifiers.base import (
    ALGORITHMS,
    HYPERPARAMETERS,
    MODEL_FORMAT,
    ConvergenceWarning,
    InvalidHyperparameter,
    Model,
    ModelConfig,
    SingleClassDataset,
    as_matrix,
)
from appsent.classifiers.forest import RandomForest
from appsent.classifiers.knn import KNearestNeighbors
from appsent.classifiers.linear import LinearSVM, LogisticRegression, lr_gradient, lr_loss
from appsent.classifiers.naive_bayes import NaiveBayes
from appsent.labels import Label
from appsent.vectorize import DimensionMismatch

MODEL_TYPES = {
    "NB": NaiveBayes,
    "LR": LogisticRegression,
    "SVM": LinearSVM,
    "KNN": KNearestNeighbors,
    "RF": RandomForest,
}


def fit(dataset, config):
    if isinstance(config, str):
        config = ModelConfig(config)
    config.resolved()
    return MODEL_TYPES[config.algorithm].fit(dataset, config)


def predict_batch(model, X):
    """0/1 predictions (1 = Positive) for every row of ``X``."""
    return model.predict_many(as_matrix(X, model.dimension))


def score_batch(model, X):
    return np.asarray(model.scores(as_matrix(X, model.dimension)), dtype=np.float64)


def predict(model, vector):
    return Label.POSITIVE if predict_batch(model, vector)[0] else Label.NEGATIVE


def predict_score(model, vector):
    return float(score_batch(model, vector)[0])


def model_from_dict(d):
    if d.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {d.get('format')!r}")
    config = ModelConfig.from_dict(d["config"])
    return MODEL_TYPES[d["algorithm"]].from_params(d["dimension"], config, d["params"])


def model_from_json(text):
    return model_from_dict(json.loads(text))


__all__ = [
    "ALGORITHMS", "HYPERPARAMETERS", "MODEL_TYPES", "ConvergenceWarning",
    "DimensionMismatch", "InvalidHyperparameter", "KNearestNeighbors", "LinearSVM",
    "LogisticRegression", "Model", "ModelConfig", "NaiveBayes", "RandomForest",
    "SingleClassDataset", "fit", "lr_gradient", "lr_loss", "model_from_dict",
    "model_from_json", "predict", "predict_batch", "predict_score", "score_batch",
]
