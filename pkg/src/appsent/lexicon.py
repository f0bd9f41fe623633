"""Dictionary polarity / subjectivity scoring.

Rules, applied left to right over surface tokens:

* each sentiment-bearing term contributes its polarity, multiplied by the
  factor of an intensifier directly before it;
* a negator among the two tokens before the term (or before its intensifier)
  multiplies that contribution by -0.5;
* document polarity and subjectivity are the means over matched terms,
  clamped to [-1, 1] and [0, 1]; no matches gives (0, 0, Neutral).
"""

import csv
import io
import logging
import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from appsent.corpus import MissingFile
from appsent.textprep import surface_tokens

log = logging.getLogger(__name__)

NEGATION_FACTOR = -0.5
NEGATION_WINDOW = 2


class RangeViolation(ValueError):
    pass


class Orientation(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class LexiconEntry:
    term: str
    polarity: float = 0.0
    subjectivity: float = 0.0
    is_negator: bool = False
    is_intensifier: bool = False
    factor: float = 1.0

    def __post_init__(self):
        if not -1.0 <= self.polarity <= 1.0:
            raise RangeViolation(f"{self.term}: polarity {self.polarity} outside [-1, 1]")
        if not 0.0 <= self.subjectivity <= 1.0:
            raise RangeViolation(f"{self.term}: subjectivity {self.subjectivity} outside [0, 1]")
        if self.is_negator and self.is_intensifier:
            raise RangeViolation(f"{self.term}: both negator and intensifier")
        if not self.factor > 0:
            raise RangeViolation(f"{self.term}: intensifier factor must be > 0")

    @property
    def bears_sentiment(self):
        return not (self.is_negator or self.is_intensifier)


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    subjectivity: float

    @property
    def orientation(self):
        return orientation_of(self.polarity)


def orientation_of(polarity):
    if polarity > 0:
        return Orientation.POSITIVE
    if polarity < 0:
        return Orientation.NEGATIVE
    return Orientation.NEUTRAL


class Lexicon(dict):
    """term -> LexiconEntry, plus the rows rejected while loading."""

    def __init__(self, entries=(), rejects=()):
        super().__init__((e.term, e) for e in entries)
        self.rejects = list(rejects)


def _parse_entry(fields):
    if len(fields) not in (3, 4):
        raise RangeViolation(f"expected 3 or 4 fields, got {len(fields)}")
    term = fields[0].strip().lower()
    if not term:
        raise RangeViolation("empty term")
    try:
        pol, subj = float(fields[1]), float(fields[2])
    except ValueError as exc:
        raise RangeViolation(str(exc)) from None
    kw = {}
    if len(fields) == 4:
        flag = fields[3].strip().lower()
        if flag == "negator":
            kw["is_negator"] = True
        elif flag.startswith("intensifier:"):
            try:
                kw.update(is_intensifier=True, factor=float(flag.split(":", 1)[1]))
            except ValueError:
                raise RangeViolation(f"bad intensifier factor {flag!r}") from None
        elif flag:
            raise RangeViolation(f"unknown flag {flag!r}")
    return LexiconEntry(term, pol, subj, **kw)


def parse_lexicon(text):
    entries, rejects = {}, []
    for lineno, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not fields or not "".join(fields).strip() or fields[0].lstrip().startswith("#"):
            continue
        try:
            entry = _parse_entry(fields)
        except RangeViolation as exc:
            rejects.append((lineno, str(exc)))
            continue
        if entry.term in entries:
            log.warning("lexicon line %d: duplicate term %r, keeping the later entry",
                        lineno, entry.term)
            del entries[entry.term]
        entries[entry.term] = entry
    return Lexicon(entries.values(), rejects)


def load_lexicon(path=None):
    if path is None:
        text = resources.files("appsent.data").joinpath("lexicon.csv").read_text("utf-8")
    else:
        if not os.path.isfile(path):
            raise MissingFile(f"no such file: {path}")
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_lexicon(text)


def score(tokens, lexicon):
    tokens = list(tokens)
    pols, subjs = [], []
    for i, tok in enumerate(tokens):
        entry = lexicon.get(tok)
        if entry is None or not entry.bears_sentiment:
            continue
        pol = entry.polarity
        anchor = i
        prev = lexicon.get(tokens[i - 1]) if i > 0 else None
        if prev is not None and prev.is_intensifier:
            pol *= prev.factor
            anchor = i - 1
        window = tokens[max(0, anchor - NEGATION_WINDOW):anchor]
        if any((e := lexicon.get(t)) is not None and e.is_negator for t in window):
            pol *= NEGATION_FACTOR
        pols.append(pol)
        subjs.append(entry.subjectivity)
    if not pols:
        return SentimentScore(0.0, 0.0)
    polarity = min(1.0, max(-1.0, sum(pols) / len(pols)))
    subjectivity = min(1.0, max(0.0, sum(subjs) / len(subjs)))
    return SentimentScore(polarity, subjectivity)


def score_text(raw_text, lexicon):
    return score(surface_tokens(raw_text), lexicon)


def _text_of(record):
    for attr in ("raw_text", "review_text"):
        if hasattr(record, attr):
            return getattr(record, attr)
    return str(record)


def score_corpus(records, lexicon):
    return [(r, score_text(_text_of(r), lexicon)) for r in records]
