"""Linear models: L2-regularised logistic regression and a Pegasos linear SVM.

Both store a weight vector and a bias and predict Positive when
``w.x + b >= 0``.
"""

import math
import warnings

import numpy as np
from scipy.special import expit

from appsent.classifiers.base import ConvergenceWarning, Model, check_trainable, floats
from appsent.seeding import rng_for


class LinearModel(Model):
    def __init__(self, dimension, config, weights, bias):
        super().__init__(dimension, config)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        if self.weights.shape != (self.dimension,):
            raise ValueError("weight vector does not match the model dimension")

    def decision_function(self, X):
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict_many(self, X):
        return (self.decision_function(X) >= 0).astype(np.int8)

    def _params(self):
        return {"weights": floats(self.weights), "bias": self.bias}

    @classmethod
    def from_params(cls, dimension, config, p):
        return cls(dimension, config, p["weights"], p["bias"])


# ----------------------------------------------------------------------------
# Logistic regression


def lr_loss(w, b, X, y, l2):
    """Mean log loss plus (l2 / 2) * ||w||^2; the bias is not penalised."""
    z = np.asarray(X @ w).ravel() + b
    # log(1 + e^z) - y z, computed stably
    per_sample = np.logaddexp(0.0, z) - y * z
    return per_sample.mean() + 0.5 * l2 * np.dot(w, w)


def lr_gradient(w, b, X, y, l2):
    z = np.asarray(X @ w).ravel() + b
    r = expit(z) - y
    n = X.shape[0]
    gw = np.asarray(X.T @ r).ravel() / n + l2 * w
    gb = r.sum() / n
    return gw, gb


class LogisticRegression(LinearModel):
    algorithm = "LR"

    @classmethod
    def fit(cls, dataset, config):
        check_trainable(dataset)
        hp = config.resolved()
        X, y = dataset.matrix, dataset.y.astype(np.float64)
        w = np.zeros(dataset.dimension)
        b = 0.0
        converged = False
        for _ in range(hp["max_epochs"]):
            gw, gb = lr_gradient(w, b, X, y, hp["l2"])
            if max(np.abs(gw).max(initial=0.0), abs(gb)) < hp["tol"]:
                converged = True
                break
            w -= hp["step"] * gw
            b -= hp["step"] * gb
        if not converged:
            warnings.warn(f"logistic regression stopped after {hp['max_epochs']} epochs "
                          "without reaching the gradient tolerance", ConvergenceWarning,
                          stacklevel=2)
        return cls(dataset.dimension, config, w, b)

    def scores(self, X):
        return expit(self.decision_function(X))


# ----------------------------------------------------------------------------
# Pegasos SVM


class LinearSVM(LinearModel):
    """Primal hinge-loss SVM trained with Pegasos subgradient steps.

    The bias is handled as the weight of a constant feature, so it shares the
    regularisation and the step size 1 / (l2 * t). Each epoch visits the
    training rows in a fresh seeded permutation.
    """

    algorithm = "SVM"
    margin_scores = True

    @classmethod
    def fit(cls, dataset, config):
        check_trainable(dataset)
        hp = config.resolved()
        lam = hp["l2"]
        X = dataset.matrix
        y = np.where(dataset.y == 1, 1.0, -1.0)
        indptr, indices, data = X.indptr, X.indices, X.data
        radius_sq = 1.0 / lam

        # w = scale * v keeps the shrink step O(1).
        v = np.zeros(dataset.dimension)
        scale = 1.0
        b = 0.0
        sq_norm = 0.0  # ||w||^2 + b^2
        t = 0
        for epoch in range(hp["epochs"]):
            order = rng_for(config.seed, epoch).permutation(X.shape[0])
            for i in order:
                t += 1
                lo, hi = indptr[i], indptr[i + 1]
                idx, val = indices[lo:hi], data[lo:hi]
                margin = y[i] * (scale * np.dot(v[idx], val) + b)
                shrink = 1.0 - 1.0 / t
                if shrink == 0.0:
                    v[:] = 0.0
                    scale, b, sq_norm = 1.0, 0.0, 0.0
                else:
                    scale *= shrink
                    b *= shrink
                    sq_norm *= shrink * shrink
                if margin < 1.0:
                    eta = 1.0 / (lam * t)
                    step = eta * y[i]
                    cross = scale * np.dot(v[idx], val)
                    v[idx] += (step / scale) * val
                    sq_norm += 2.0 * step * cross + step * step * np.dot(val, val)
                    sq_norm += 2.0 * step * b + step * step
                    b += step
                if hp["project"] and sq_norm > radius_sq:
                    shrink = math.sqrt(radius_sq / sq_norm)
                    scale *= shrink
                    b *= shrink
                    sq_norm = radius_sq
                if scale < 1e-100:
                    v *= scale
                    scale = 1.0
            # re-anchor the running norm against drift
            w = scale * v
            sq_norm = float(np.dot(w, w) + b * b)
        return cls(dataset.dimension, config, scale * v, b)

    def scores(self, X):
        return self.decision_function(X)
