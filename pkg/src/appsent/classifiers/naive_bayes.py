"""Multinomial naive Bayes over nonnegative (possibly fractional) feature weights."""

import numpy as np
from scipy.special import logsumexp

from appsent.classifiers.base import Model, check_trainable, floats


class NaiveBayes(Model):
    algorithm = "NB"

    def __init__(self, dimension, config, class_log_prior, feature_log_prob, alpha):
        super().__init__(dimension, config)
        # row 0 = Negative, row 1 = Positive
        self.class_log_prior = np.asarray(class_log_prior, dtype=np.float64)
        self.feature_log_prob = np.asarray(feature_log_prob, dtype=np.float64).reshape(2, -1)
        self.alpha = float(alpha)

    @classmethod
    def fit(cls, dataset, config):
        check_trainable(dataset)
        hp = config.resolved()
        X, y = dataset.matrix, dataset.y
        if X.nnz and X.data.min() < 0:
            raise ValueError("naive Bayes needs nonnegative features")
        alpha = hp["alpha"]
        counts = np.vstack([np.asarray(X[y == c].sum(axis=0)).ravel() for c in (0, 1)])
        smoothed = counts + alpha
        feature_log_prob = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        class_counts = np.array([np.sum(y == 0), np.sum(y == 1)], dtype=np.float64)
        class_log_prior = np.log(class_counts) - np.log(class_counts.sum())
        return cls(dataset.dimension, config, class_log_prior, feature_log_prob, alpha)

    def joint_log_likelihood(self, X):
        return np.asarray(X @ self.feature_log_prob.T) + self.class_log_prior

    def scores(self, X):
        jll = self.joint_log_likelihood(X)
        return np.exp(jll[:, 1] - logsumexp(jll, axis=1))

    def predict_many(self, X):
        jll = self.joint_log_likelihood(X)
        return (jll[:, 1] >= jll[:, 0]).astype(np.int8)

    def _params(self):
        return {"class_log_prior": floats(self.class_log_prior),
                "feature_log_prob": [floats(r) for r in self.feature_log_prob],
                "alpha": self.alpha}

    @classmethod
    def from_params(cls, dimension, config, p):
        return cls(dimension, config, p["class_log_prior"], p["feature_log_prob"], p["alpha"])
