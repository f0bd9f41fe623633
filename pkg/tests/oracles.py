"""Independent brute-force reference implementations for the test suite.

Each oracle is written directly from the textbook definition with plain
Python loops (and exact rationals where the inputs allow), sharing no code
with the package under test.
"""

import math
from collections import Counter
from fractions import Fraction

import numpy as np

POS, NEG = 1, 0


# ----------------------------------------------------------------------------
# Metrics


def tally(preds, truths):
    tp = fp = fn = tn = 0
    for p, t in zip(preds, truths):
        if p == POS and t == POS:
            tp += 1
        elif p == POS:
            fp += 1
        elif t == POS:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def rational_metrics(tp, fp, fn, tn):
    p = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    r = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f = 2 * p * r / (p + r) if p + r else Fraction(0)
    a = Fraction(tp + tn, tp + fp + fn + tn)
    return p, r, f, a


# ----------------------------------------------------------------------------
# TF-IDF


def grams(tokens, lo, hi):
    out = []
    for n in range(lo, hi + 1):
        for start in range(0, len(tokens)):
            if start + n <= len(tokens):
                out.append(" ".join(tokens[start:start + n]))
    return out


def dense_tfidf(docs, lo=1, hi=1):
    """Unnormalized tf * ln(C / df) as {term: column} plus a dense matrix."""
    C = len(docs)
    per_doc = [grams(list(d), lo, hi) for d in docs]
    df = Counter()
    for g in per_doc:
        for term in set(g):
            df[term] += 1
    terms = sorted(df)
    col = {t: j for j, t in enumerate(terms)}
    M = np.zeros((C, len(terms)))
    for i, g in enumerate(per_doc):
        for term in g:
            M[i, col[term]] += 1.0
    for term, j in col.items():
        M[:, j] *= math.log(C / df[term])
    return col, M


# ----------------------------------------------------------------------------
# Naive Bayes


def bayes_posterior(counts, labels, query, alpha=1):
    """Exact P(Positive | query) for multinomial NB with integer counts.

    ``counts`` is a list of per-document count lists, ``labels`` 0/1.
    """
    V = len(counts[0])
    alpha = Fraction(alpha)
    joint = {}
    for c in (NEG, POS):
        rows = [r for r, y in zip(counts, labels) if y == c]
        prior = Fraction(len(rows), len(counts))
        totals = [sum(r[j] for r in rows) for j in range(V)]
        denom = sum(totals) + alpha * V
        likelihood = Fraction(1)
        for j in range(V):
            likelihood *= ((totals[j] + alpha) / denom) ** query[j]
        joint[c] = prior * likelihood
    return joint[POS] / (joint[POS] + joint[NEG])


# ----------------------------------------------------------------------------
# Logistic loss


def logistic_loss(w, b, X, y, l2):
    """Mean log loss + (l2/2)||w||^2 over dense rows, one sample at a time."""
    total = 0.0
    for row, label in zip(X, y):
        z = sum(wi * xi for wi, xi in zip(w, row)) + b
        p = 1.0 / (1.0 + math.exp(-z))
        total -= label * math.log(p) + (1 - label) * math.log(1 - p)
    return total / len(X) + 0.5 * l2 * sum(wi * wi for wi in w)


def central_difference(f, theta, h=1e-5):
    theta = np.array(theta, dtype=np.float64)
    g = np.zeros_like(theta)
    for j in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[j] += h
        down[j] -= h
        g[j] = (f(up) - f(down)) / (2 * h)
    return g


# ----------------------------------------------------------------------------
# Nearest neighbours


def knn_predict(X, y, q, k):
    """Exhaustive cosine k-NN over dense rows.

    Rank by similarity descending, equal similarity by lower index; a split
    vote goes to the nearest neighbour.
    """
    qn = math.sqrt(sum(v * v for v in q))
    sims = []
    for i, row in enumerate(X):
        xn = math.sqrt(sum(v * v for v in row))
        dot = sum(a * b for a, b in zip(q, row))
        sims.append((dot / (qn * xn) if qn * xn > 0 else 0.0, i))
    ranked = sorted(sims, key=lambda s: (-s[0], s[1]))[:min(k, len(X))]
    pos = sum(y[i] for _, i in ranked)
    neg = len(ranked) - pos
    if pos != neg:
        return POS if pos > neg else NEG
    return y[ranked[0][1]]


# ----------------------------------------------------------------------------
# Synthetic data


def separable(rng, n=200, d=5, margin=0.5):
    """Points in [-1, 1]^d at distance >= margin from a random hyperplane."""
    w = rng.normal(size=d)
    w /= np.linalg.norm(w)
    b = rng.uniform(-0.2, 0.2)
    rows = []
    while len(rows) < n:
        x = rng.uniform(-1, 1, size=d)
        if abs(x @ w + b) >= margin:
            rows.append(x)
    X = np.array(rows)
    y = (X @ w + b > 0).astype(np.int8)
    return X, y


def noisy_separable(rng, n=1000, d=5, noise=0.15):
    X, y = separable(rng, n, d, margin=0.0)
    flip = rng.random(n) < noise
    return X, np.where(flip, 1 - y, y).astype(np.int8)
