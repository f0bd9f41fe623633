"""Review text -> token list.

normalize -> tokenize -> remove_stopwords -> stem, each stage switchable
through :class:`PrepConfig`.
"""

import re
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from appsent import porter

_URL = re.compile(r"(?:[a-z][a-z0-9+.\-]*://|www\.)\S*", re.IGNORECASE)
_TAG = re.compile(r"<[^<>]*>")
_NON_LETTER = re.compile(r"[^a-z\s]+")
_SPACE = re.compile(r"\s+")
TOKEN = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: int
    tokens: tuple
    original_length: int


@dataclass(frozen=True)
class PrepConfig:
    remove_stopwords: bool = True
    stem: bool = True
    # None selects the shipped list.
    stopwords_path: Optional[str] = None

    def to_dict(self):
        return asdict(self)


def normalize(raw_text):
    text = _URL.sub(" ", raw_text)
    text = _TAG.sub(" ", text)
    text = text.lower()
    # Letters outside a-z (accents, emoji) go with the punctuation.
    text = _NON_LETTER.sub("", text)
    return _SPACE.sub(" ", text).strip()


def tokenize(normalized):
    return [t for t in normalized.split(" ") if t]


def parse_stopwords(text):
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


@lru_cache(maxsize=8)
def load_stopwords(path=None):
    if path is None:
        text = resources.files("appsent.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_stopwords(text)


def remove_stopwords(tokens, stopwords):
    return [t for t in tokens if t not in stopwords]


@lru_cache(maxsize=65536)
def stem(token):
    return porter.stem(token)


def preprocess(raw_text, config=PrepConfig(), doc_id=0):
    tokens = tokenize(normalize(raw_text))
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, load_stopwords(config.stopwords_path))
    if config.stem:
        tokens = [stem(t) for t in tokens]
    return TokenizedDocument(doc_id, tuple(tokens), len(raw_text))


def preprocess_corpus(texts, config=PrepConfig()):
    return [preprocess(t, config, doc_id=i) for i, t in enumerate(texts)]


def surface_tokens(raw_text):
    """Tokens with no stopword removal and no stemming (lexicon input)."""
    return tokenize(normalize(raw_text))
