"""N-gram vocabularies and TF-IDF weighting.

A term's weight in a document is ``tf * ln(C / df)``: raw in-document count
times the natural log of corpus size over document frequency. Rows are L2
normalized afterwards unless ``normalize=False``.
"""

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from appsent.labels import decode, encode

VOCAB_FORMAT = "appsent.vocabulary/1"


class EmptyCorpus(ValueError):
    pass


class EmptyVocabulary(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class VectorizerConfig:
    ngram_range: tuple = (1, 1)
    # Only n == high instead of the cumulative range low..high.
    exact_n: bool = False
    min_df: int = 1
    max_features: Optional[int] = 20000
    normalize: bool = True
    smooth_idf: bool = False
    sublinear_tf: bool = False
    # False leaves raw term counts (idf = 1), e.g. for count-based NB checks.
    use_idf: bool = True
    allow_empty: bool = False

    def __post_init__(self):
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid ngram_range {self.ngram_range}")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        object.__setattr__(self, "ngram_range", (int(lo), int(hi)))

    @property
    def orders(self):
        lo, hi = self.ngram_range
        return (hi,) if self.exact_n else tuple(range(lo, hi + 1))

    def to_dict(self):
        d = asdict(self)
        d["ngram_range"] = list(self.ngram_range)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["ngram_range"] = tuple(d["ngram_range"])
        d.setdefault("use_idf", True)
        return cls(**d)


FEATURIZATIONS = {
    "uni": VectorizerConfig(ngram_range=(1, 1)),
    "bi": VectorizerConfig(ngram_range=(1, 2)),
    "tri": VectorizerConfig(ngram_range=(1, 3)),
}


@dataclass(frozen=True)
class SparseVector:
    dimension: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.dimension):
            raise ValueError("indices must be strictly increasing and < dimension")
        if np.any(val == 0):
            raise ValueError("explicit zero weight")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def entries(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def to_dense(self):
        out = np.zeros(self.dimension)
        out[self.indices] = self.values
        return out

    def to_csr(self):
        return sp.csr_matrix((self.values, self.indices, [0, len(self.indices)]),
                             shape=(1, self.dimension))

    @classmethod
    def from_csr_row(cls, row):
        row = row.tocsr()
        row.sum_duplicates()
        row.sort_indices()
        keep = row.data != 0
        return cls(row.shape[1], row.indices[keep], row.data[keep])

    @classmethod
    def from_dense(cls, x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.flatnonzero(x)
        return cls(x.size, idx, x[idx])


@dataclass
class Vocabulary:
    term_to_index: dict
    doc_frequency: dict
    corpus_size: int
    config: VectorizerConfig = field(default_factory=VectorizerConfig)

    def __len__(self):
        return len(self.term_to_index)

    @property
    def ngram_range(self):
        return self.config.ngram_range

    @property
    def max_features(self):
        return self.config.max_features

    def terms(self):
        out = [None] * len(self.term_to_index)
        for t, i in self.term_to_index.items():
            out[i] = t
        return out

    def idf_vector(self):
        C = self.corpus_size
        idf = np.empty(len(self))
        if not self.config.use_idf:
            idf.fill(1.0)
            return idf
        for t, i in self.term_to_index.items():
            df = self.doc_frequency[t]
            if self.config.smooth_idf:
                idf[i] = math.log((1 + C) / (1 + df)) + 1.0
            else:
                idf[i] = math.log(C / df)
        return idf

    def check(self):
        n = len(self.term_to_index)
        if sorted(self.term_to_index.values()) != list(range(n)):
            raise DimensionMismatch("vocabulary indices are not dense")
        if set(self.doc_frequency) != set(self.term_to_index):
            raise DimensionMismatch("df table does not match the term table")
        if any(not 1 <= df <= self.corpus_size for df in self.doc_frequency.values()):
            raise DimensionMismatch("document frequency outside [1, C]")

    def to_dict(self):
        terms = self.terms()
        return {
            "format": VOCAB_FORMAT,
            "corpus_size": self.corpus_size,
            "config": self.config.to_dict(),
            "terms": [[t, i, self.doc_frequency[t]] for i, t in enumerate(terms)],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != VOCAB_FORMAT:
            raise ValueError(f"unsupported vocabulary format {d.get('format')!r}")
        vocab = cls(
            term_to_index={t: i for t, i, _ in d["terms"]},
            doc_frequency={t: df for t, _, df in d["terms"]},
            corpus_size=d["corpus_size"],
            config=VectorizerConfig.from_dict(d["config"]),
        )
        vocab.check()
        return vocab

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class VectorizedDataset:
    """Rows of ``matrix`` are documents; ``y`` holds 1 for Positive."""

    matrix: sp.csr_matrix
    y: np.ndarray
    vocabulary: Optional[Vocabulary] = None

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int8)
        if self.matrix.shape[0] != self.y.shape[0]:
            raise DimensionMismatch("matrix rows and labels differ in number")
        if self.vocabulary is not None and self.matrix.shape[1] != len(self.vocabulary):
            raise DimensionMismatch("matrix width differs from vocabulary size")

    def __len__(self):
        return self.matrix.shape[0]

    @property
    def dimension(self):
        return self.matrix.shape[1]

    @property
    def labels(self):
        return decode(self.y)

    def vector(self, i):
        return SparseVector.from_csr_row(self.matrix[i])

    def vectors(self):
        return [self.vector(i) for i in range(len(self))]

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return VectorizedDataset(self.matrix[rows], self.y[rows], self.vocabulary)

    @classmethod
    def from_dense(cls, X, y, vocabulary=None):
        return cls(sp.csr_matrix(np.asarray(X, dtype=np.float64)), y, vocabulary)


def _tokens(doc):
    return doc.tokens if hasattr(doc, "tokens") else doc


def extract_ngrams(tokens, ngram_range=(1, 1), exact_n=False):
    tokens = list(tokens)
    lo, hi = ngram_range
    orders = (hi,) if exact_n else range(lo, hi + 1)
    out = []
    for n in orders:
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i:i + n]))
    return out


def fit_vocabulary(corpus, config=VectorizerConfig()):
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cannot fit a vocabulary on an empty corpus")
    df = Counter()
    cf = Counter()
    for doc in corpus:
        grams = extract_ngrams(_tokens(doc), config.ngram_range, config.exact_n)
        cf.update(grams)
        df.update(set(grams))
    terms = [t for t, n in df.items() if n >= config.min_df]
    if config.max_features is not None and len(terms) > config.max_features:
        terms.sort(key=lambda t: (-cf[t], t))
        terms = terms[:config.max_features]
    if not terms and not config.allow_empty:
        raise EmptyVocabulary("no n-grams survive vocabulary fitting")
    terms.sort()
    return Vocabulary(
        term_to_index={t: i for i, t in enumerate(terms)},
        doc_frequency={t: df[t] for t in terms},
        corpus_size=len(corpus),
        config=config,
    )


def _weights(doc, vocab, idf):
    counts = Counter(g for g in extract_ngrams(_tokens(doc), vocab.config.ngram_range,
                                               vocab.config.exact_n)
                     if g in vocab.term_to_index)
    idx = np.fromiter((vocab.term_to_index[g] for g in counts), dtype=np.int64,
                      count=len(counts))
    tf = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    if vocab.config.sublinear_tf:
        tf = 1.0 + np.log(tf)
    val = tf * idf[idx]
    order = np.argsort(idx)
    idx, val = idx[order], val[order]
    keep = val != 0
    idx, val = idx[keep], val[keep]
    if vocab.config.normalize and val.size:
        val = val / np.sqrt(np.dot(val, val))
    return idx, val


def transform(doc, vocab, config=None, idf=None):
    """One document -> SparseVector over ``vocab``.

    ``config`` overrides the weighting flags stored with the vocabulary
    (ngram settings always come from the vocabulary).
    """
    vocab = _with_flags(vocab, config)
    if idf is None:
        idf = vocab.idf_vector()
    if idf.shape[0] != len(vocab):
        raise DimensionMismatch("idf vector does not match the vocabulary")
    idx, val = _weights(doc, vocab, idf)
    return SparseVector(len(vocab), idx, val)


def transform_corpus(corpus, vocab, config=None):
    vocab = _with_flags(vocab, config)
    idf = vocab.idf_vector()
    indptr, indices, data = [0], [], []
    for doc in corpus:
        idx, val = _weights(doc, vocab, idf)
        indices.append(idx)
        data.append(val)
        indptr.append(indptr[-1] + idx.size)
    if indices:
        indices, data = np.concatenate(indices), np.concatenate(data)
    else:
        indices, data = np.empty(0, np.int64), np.empty(0)
    return sp.csr_matrix((data, indices, np.asarray(indptr)),
                         shape=(len(indptr) - 1, len(vocab)))


def fit_transform(corpus, labels, config=VectorizerConfig()):
    corpus = list(corpus)
    vocab = fit_vocabulary(corpus, config)
    return VectorizedDataset(transform_corpus(corpus, vocab), encode(labels), vocab)


def _with_flags(vocab, config):
    if config is None or config == vocab.config:
        return vocab
    flags = {k: getattr(config, k) for k in ("normalize", "smooth_idf", "sublinear_tf", "use_idf")}
    merged = VectorizerConfig.from_dict({**vocab.config.to_dict(), **flags})
    return Vocabulary(vocab.term_to_index, vocab.doc_frequency, vocab.corpus_size, merged)
