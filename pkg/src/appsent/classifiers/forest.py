"""Random forest of fully grown Gini trees over sparse features.

Each tree sees a bootstrap sample (kept as integer row weights) and, at every
node, a random subset of the features that are not constant within that node.
Drawing among non-constant features only is the same as scanning a random
permutation of all features until enough splittable ones are found, and it
keeps the search cheap on sparse text where most columns are zero in a node.
"""

import math

import numpy as np

from appsent.classifiers.base import Model, check_trainable, floats
from appsent.seeding import rng_for


class Tree:
    """Flat node arrays; ``feature == -1`` marks a leaf. ``x[f] <= t`` goes left."""

    def __init__(self, feature, threshold, left, right, counts):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.float64).reshape(-1, 2)

    def __len__(self):
        return self.feature.shape[0]

    @property
    def leaf_labels(self):
        return (self.counts[:, 1] >= self.counts[:, 0]).astype(np.int8)

    def apply_dense(self, D, column_of):
        """Leaf index per row of dense ``D``; ``column_of`` maps feature -> column."""
        node = np.zeros(D.shape[0], dtype=np.int64)
        rows = np.arange(D.shape[0])
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            r, n = rows[active], node[active]
            go_left = D[r, column_of[f[active]]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])

    def to_dict(self):
        return {"feature": [int(v) for v in self.feature], "threshold": floats(self.threshold),
                "left": [int(v) for v in self.left], "right": [int(v) for v in self.right],
                "counts": floats(self.counts)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["counts"])


def n_split_features(max_features, dimension):
    if max_features == "sqrt":
        return max(1, math.ceil(math.sqrt(dimension)))
    if max_features == "all":
        return dimension
    return min(int(max_features), dimension)


def _splittable(Xn):
    """Sorted feature ids that take more than one value among the node rows."""
    Xc = Xn.tocsc()
    nnz = np.diff(Xc.indptr)
    present = np.flatnonzero(nnz)
    if present.size == 0:
        return present
    # Segments of non-empty columns are contiguous in csc data.
    starts = Xc.indptr[present]
    lo = np.minimum.reduceat(Xc.data, starts)
    hi = np.maximum.reduceat(Xc.data, starts)
    varies = (nnz[present] < Xn.shape[0]) | (lo < hi)
    return present[varies]


def best_split(D, y, w):
    """Best Gini split over the columns of dense block ``D``.

    Returns (column, threshold) or None when no column separates the rows.
    Ties go to the lower column, then the lower threshold.
    """
    n = D.shape[0]
    order = np.argsort(D, axis=0, kind="stable")
    Ds = np.take_along_axis(D, order, axis=0)
    ws = w[order]
    wpos = ws * y[order]
    left_w = np.cumsum(ws, axis=0)[:-1]
    left_pos = np.cumsum(wpos, axis=0)[:-1]
    total_w, total_pos = w.sum(), (w * y).sum()
    right_w = total_w - left_w
    right_pos = total_pos - left_pos
    left_neg = left_w - left_pos
    right_neg = right_w - right_pos
    valid = Ds[:-1] < Ds[1:]
    if not valid.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        # Minimising weighted Gini == maximising this purity sum.
        purity = ((left_pos ** 2 + left_neg ** 2) / left_w
                  + (right_pos ** 2 + right_neg ** 2) / right_w)
    purity = np.where(valid, purity, -np.inf)
    flat = np.argmax(purity.T.ravel())
    col, pos = divmod(flat, n - 1)
    a, b = Ds[pos, col], Ds[pos + 1, col]
    threshold = a + (b - a) / 2.0
    if threshold >= b:
        threshold = a
    return int(col), float(threshold)


def grow_tree(X, y, weights, rng, m):
    """Grow one tree to purity on rows with nonzero ``weights``."""
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append((0.0, 0.0))
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.flatnonzero(weights))]
    y = y.astype(np.float64)
    while stack:
        node, rows = stack.pop()
        w, yr = weights[rows].astype(np.float64), y[rows]
        pos = float((w * yr).sum())
        counts[node] = (float(w.sum()) - pos, pos)
        if pos == 0 or pos == w.sum() or w.sum() < 2:
            continue
        Xn = X[rows]
        candidates = _splittable(Xn)
        if candidates.size == 0:
            continue
        if candidates.size > m:
            candidates = np.sort(rng.choice(candidates, size=m, replace=False))
        D = Xn[:, candidates].toarray()
        split = best_split(D, yr, w)
        if split is None:
            continue
        col, thr = split
        go_left = D[:, col] <= thr
        feature[node] = int(candidates[col])
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], rows[~go_left]))
        stack.append((left[node], rows[go_left]))
    return Tree(feature, threshold, left, right, counts)


class RandomForest(Model):
    algorithm = "RF"

    def __init__(self, dimension, config, trees):
        super().__init__(dimension, config)
        self.trees = list(trees)
        used = sorted({int(f) for t in self.trees for f in t.feature if f >= 0})
        self._used = np.asarray(used, dtype=np.int64)
        self._column_of = np.full(max(dimension, 1), -1, dtype=np.int64)
        self._column_of[self._used] = np.arange(self._used.size)

    @classmethod
    def fit(cls, dataset, config):
        check_trainable(dataset)
        hp = config.resolved()
        X, y = dataset.matrix.tocsr(copy=True), dataset.y
        X.eliminate_zeros()
        n = X.shape[0]
        m = n_split_features(hp["max_features"], dataset.dimension)
        trees = []
        for t in range(hp["n_trees"]):
            rng = rng_for(config.seed, t)
            if hp["bootstrap"]:
                weights = np.bincount(rng.integers(0, n, size=n), minlength=n)
            else:
                weights = np.ones(n, dtype=np.int64)
            trees.append(grow_tree(X, y, weights, rng, m))
        return cls(dataset.dimension, config, trees)

    def tree_votes(self, X, chunk=1024):
        """(n_trees, n_rows) array of per-tree 0/1 predictions."""
        X = X.tocsr()
        out = np.empty((len(self.trees), X.shape[0]), dtype=np.int8)
        for start in range(0, X.shape[0], chunk):
            D = X[start:start + chunk][:, self._used].toarray()
            for i, tree in enumerate(self.trees):
                leaves = tree.apply_dense(D, self._column_of)
                out[i, start:start + chunk] = tree.leaf_labels[leaves]
        return out

    def scores(self, X):
        return self.tree_votes(X).mean(axis=0)

    def predict_many(self, X):
        votes = self.tree_votes(X)
        return (2 * votes.sum(axis=0, dtype=np.int64) >= len(self.trees)).astype(np.int8)

    def _params(self):
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_params(cls, dimension, config, p):
        return cls(dimension, config, [Tree.from_dict(d) for d in p["trees"]])
