"""Bootstrap aggregation over any of the base classifiers."""

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from appsent import classifiers
from appsent.classifiers import ModelConfig, SingleClassDataset, as_matrix
from appsent.labels import Label
from appsent.seeding import DEFAULT_SEED, derive_seed, rng_for

BAGGING_FORMAT = "appsent.bagging/1"
MAX_RETRIES = 10


class EmptyDataset(ValueError):
    pass


@dataclass(frozen=True)
class BaggingConfig:
    base: ModelConfig
    n_estimators: int = 10
    seed: int = DEFAULT_SEED
    vote: str = "hard"  # "hard" or "soft"
    # False trains every member on the full training set (tests only).
    bootstrap: bool = True

    def __post_init__(self):
        if not isinstance(self.n_estimators, int) or self.n_estimators < 1:
            raise classifiers.InvalidHyperparameter("n_estimators must be >= 1")
        if self.vote not in ("hard", "soft"):
            raise classifiers.InvalidHyperparameter(f"unknown vote mode {self.vote!r}")

    def to_dict(self):
        return {"base": self.base.to_dict(), "n_estimators": self.n_estimators,
                "seed": int(self.seed), "vote": self.vote, "bootstrap": self.bootstrap}

    @classmethod
    def from_dict(cls, d):
        return cls(ModelConfig.from_dict(d["base"]), d["n_estimators"], d["seed"],
                   d["vote"], d.get("bootstrap", True))


def bootstrap_sample(dataset, seed):
    n = len(dataset)
    if n == 0:
        raise EmptyDataset("cannot resample an empty dataset")
    rows = rng_for(seed).integers(0, n, size=n)
    return dataset.subset(rows)


class BaggedModel:
    algorithm = "Bagging"

    def __init__(self, members, vote="hard", config=None):
        if not members:
            raise ValueError("a bagged model needs at least one member")
        algos = {m.algorithm for m in members}
        dims = {m.dimension for m in members}
        if len(algos) != 1 or len(dims) != 1:
            raise ValueError("members must share algorithm and dimension")
        self.members = list(members)
        self.vote = vote
        self.config = config
        self.dimension = dims.pop()
        self.margin_scores = False

    def member_scores(self, X):
        """(n_members, n_rows) confidences for Positive, squashed into [0, 1]."""
        out = []
        for m in self.members:
            s = m.scores(X)
            out.append(expit(s) if m.margin_scores else s)
        return np.vstack(out)

    def scores(self, X):
        return self.member_scores(X).mean(axis=0)

    def predict_many(self, X):
        soft = self.scores(X)
        by_score = (soft >= 0.5).astype(np.int8)
        if self.vote == "soft":
            return by_score
        votes = np.vstack([m.predict_many(X) for m in self.members]).sum(axis=0, dtype=np.int64)
        n = len(self.members)
        # An exact split vote falls back to the averaged confidence.
        return np.where(2 * votes > n, 1, np.where(2 * votes < n, 0, by_score)).astype(np.int8)

    def to_dict(self):
        return {"format": BAGGING_FORMAT, "vote": self.vote,
                "config": None if self.config is None else self.config.to_dict(),
                "members": [m.to_dict() for m in self.members]}

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != BAGGING_FORMAT:
            raise ValueError(f"unsupported bagging format {d.get('format')!r}")
        config = None if d.get("config") is None else BaggingConfig.from_dict(d["config"])
        return cls([classifiers.model_from_dict(m) for m in d["members"]], d["vote"], config)


def fit_bagging(dataset, config):
    """Train ``n_estimators`` members, member i on its own bootstrap sample.

    A bootstrap that holds a single class is redrawn with the next derived
    seed, up to MAX_RETRIES times.
    """
    if len(dataset) == 0:
        raise EmptyDataset("cannot bag an empty dataset")
    classifiers.base.check_trainable(dataset)
    members = []
    for i in range(config.n_estimators):
        base = replace(config.base, seed=derive_seed(config.seed, i, 1))
        for attempt in range(MAX_RETRIES + 1):
            sample = (bootstrap_sample(dataset, derive_seed(config.seed, i, 0, attempt))
                      if config.bootstrap else dataset)
            if np.unique(sample.y).size == 2:
                break
        else:
            raise SingleClassDataset(
                f"member {i}: every bootstrap after {MAX_RETRIES} retries held one class")
        members.append(classifiers.fit(sample, base))
    return BaggedModel(members, config.vote, config)


def predict_bagged(model, vector):
    X = as_matrix(vector, model.dimension)
    return Label.POSITIVE if model.predict_many(X)[0] else Label.NEGATIVE


def predict_bagged_batch(model, X):
    return model.predict_many(as_matrix(X, model.dimension))


def score_bagged(model, vector):
    return float(model.scores(as_matrix(vector, model.dimension))[0])
