import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from appsent.seeding import DEFAULT_SEED
from appsent.vectorize import DimensionMismatch, SparseVector

MODEL_FORMAT = "appsent.model/1"

ALGORITHMS = ("NB", "LR", "SVM", "KNN", "RF")


class SingleClassDataset(ValueError):
    pass


class InvalidHyperparameter(ValueError):
    pass


class ConvergenceWarning(UserWarning):
    pass


def _positive_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and v >= 1


def _positive_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 and math.isfinite(v)


def _nonneg_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0 and math.isfinite(v)


def _max_features(v):
    return v in ("sqrt", "all") or _positive_int(v)


# name -> (default, validator)
HYPERPARAMETERS = {
    "NB": {"alpha": (1.0, _positive_real)},
    "LR": {
        "l2": (1e-4, _nonneg_real),
        "step": (0.5, _positive_real),
        "tol": (1e-6, _positive_real),
        "max_epochs": (1000, _positive_int),
    },
    "SVM": {
        "l2": (1e-4, _positive_real),
        "epochs": (20, _positive_int),
        "project": (True, lambda v: isinstance(v, bool)),
    },
    "KNN": {"k": (5, _positive_int)},
    "RF": {
        "n_trees": (100, _positive_int),
        "max_features": ("sqrt", _max_features),
        "bootstrap": (True, lambda v: isinstance(v, bool)),
    },
}


@dataclass(frozen=True)
class ModelConfig:
    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.algorithm not in HYPERPARAMETERS:
            raise InvalidHyperparameter(f"unknown algorithm {self.algorithm!r}")

    def resolved(self):
        """Hyperparameters with defaults filled in, validated."""
        spec = HYPERPARAMETERS[self.algorithm]
        unknown = set(self.hyperparameters) - set(spec)
        if unknown:
            raise InvalidHyperparameter(
                f"{self.algorithm}: unknown hyperparameters {sorted(unknown)}")
        out = {}
        for name, (default, valid) in spec.items():
            value = self.hyperparameters.get(name, default)
            if not valid(value):
                raise InvalidHyperparameter(f"{self.algorithm}: bad {name}={value!r}")
            out[name] = value
        return out

    def to_dict(self):
        return {"algorithm": self.algorithm, "hyperparameters": self.resolved(),
                "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["algorithm"], dict(d.get("hyperparameters", {})),
                   int(d.get("seed", DEFAULT_SEED)))


def as_matrix(x, dimension):
    """SparseVector / csr row(s) / dense array -> csr matrix, width-checked."""
    if isinstance(x, SparseVector):
        m = x.to_csr()
    elif sp.issparse(x):
        m = sp.csr_matrix(x, dtype=np.float64)
    else:
        m = sp.csr_matrix(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if m.shape[1] != dimension:
        raise DimensionMismatch(f"expected dimension {dimension}, got {m.shape[1]}")
    return m


def check_trainable(dataset):
    if len(dataset) == 0:
        raise SingleClassDataset("empty training set")
    classes = np.unique(dataset.y)
    if classes.size < 2:
        raise SingleClassDataset(f"training labels contain only class {int(classes[0])}")


class Model:
    """Shared predict surface. Subclasses provide ``scores`` and ``predict_many``."""

    algorithm = None
    # True when ``scores`` is a margin rather than a value in [0, 1].
    margin_scores = False

    def __init__(self, dimension, config):
        self.dimension = int(dimension)
        self.config = config

    def scores(self, X):
        raise NotImplementedError

    def predict_many(self, X):
        raise NotImplementedError

    def _params(self):
        raise NotImplementedError

    def to_dict(self):
        return {
            "format": MODEL_FORMAT,
            "algorithm": self.algorithm,
            "dimension": self.dimension,
            "config": self.config.to_dict(),
            "params": self._params(),
        }

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def floats(a):
    return [float(v) for v in np.asarray(a, dtype=np.float64).ravel()]


def csr_to_dict(m):
    m = sp.csr_matrix(m)
    return {"shape": list(m.shape), "data": floats(m.data),
            "indices": [int(i) for i in m.indices], "indptr": [int(i) for i in m.indptr]}


def csr_from_dict(d):
    return sp.csr_matrix((np.asarray(d["data"], dtype=np.float64),
                          np.asarray(d["indices"], dtype=np.int64),
                          np.asarray(d["indptr"], dtype=np.int64)), shape=tuple(d["shape"]))
