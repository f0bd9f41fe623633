import numpy as np

from appsent.classifiers.base import Model, check_trainable, csr_from_dict, csr_to_dict


def cosine_similarities(Q, X, q_norms=None, x_norms=None):
    """Dense (n_queries, n_train) cosine matrix; zero vectors score 0."""
    if q_norms is None:
        q_norms = row_norms(Q)
    if x_norms is None:
        x_norms = row_norms(X)
    dots = np.asarray((Q @ X.T).todense())
    denom = q_norms[:, None] * x_norms[None, :]
    out = np.zeros_like(dots)
    np.divide(dots, denom, out=out, where=denom > 0)
    return out


def row_norms(X):
    return np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())


class KNearestNeighbors(Model):
    """Cosine k-NN with a plurality vote.

    Neighbours are ranked by similarity, equal similarities by lower training
    index. A split vote goes to the single nearest neighbour.
    """

    algorithm = "KNN"

    def __init__(self, dimension, config, X, y, k):
        super().__init__(dimension, config)
        self.X = X.tocsr()
        self.y = np.asarray(y, dtype=np.int8)
        self.k = int(k)
        self._norms = row_norms(self.X)

    @classmethod
    def fit(cls, dataset, config):
        check_trainable(dataset)
        return cls(dataset.dimension, config, dataset.matrix.copy(), dataset.y.copy(),
                   config.resolved()["k"])

    def neighbours(self, Q, chunk=512):
        k = min(self.k, self.X.shape[0])
        out = np.empty((Q.shape[0], k), dtype=np.int64)
        for start in range(0, Q.shape[0], chunk):
            sims = cosine_similarities(Q[start:start + chunk], self.X, x_norms=self._norms)
            # stable sort on -sim keeps the lower index first among equals
            out[start:start + chunk] = np.argsort(-sims, axis=1, kind="stable")[:, :k]
        return out

    def _votes(self, Q):
        nb = self.neighbours(Q)
        return nb, self.y[nb].sum(axis=1), nb.shape[1]

    def scores(self, Q):
        _, pos, k = self._votes(Q)
        return pos / k

    def predict_many(self, Q):
        nb, pos, k = self._votes(Q)
        out = np.where(2 * pos > k, 1, 0).astype(np.int8)
        tie = 2 * pos == k
        out[tie] = self.y[nb[tie, 0]]
        return out

    def _params(self):
        return {"k": self.k, "X": csr_to_dict(self.X), "y": [int(v) for v in self.y]}

    @classmethod
    def from_params(cls, dimension, config, p):
        return cls(dimension, config, csr_from_dict(p["X"]), p["y"], p["k"])
