"""Loading and cleaning of the two review corpora.

Three file shapes are understood:

* the 13-column app metadata export (App, Category, Rating, Reviews, Size,
  Installs, Type, Price, Content Rating, Genres, Last Updated, Current Ver,
  Android Ver);
* a review corpus: an app column, a text column and a label and/or rating
  column;
* the student survey: department, app, review, rating, type (plus at most one
  ignored extra column).

Bad rows never abort a load. They are collected in a :class:`LoadReport`
together with their 1-based data row number and the reason.
"""

import csv
import io
import os
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Optional

from appsent.labels import Label
from appsent.textprep import normalize


class CorpusError(Exception):
    pass


class MissingFile(CorpusError, FileNotFoundError):
    pass


class MalformedHeader(CorpusError):
    pass


class NoUsableColumns(CorpusError):
    pass


class Unparseable(CorpusError, ValueError):
    pass


class OutOfRange(CorpusError, ValueError):
    pass


class Source(str, Enum):
    GOOGLE = "Google"
    STUDENT = "Student"


class AppType(str, Enum):
    FREE = "Free"
    PAID = "Paid"


@dataclass(frozen=True)
class AppRecord:
    app_name: str
    category: str
    rating: Optional[float]
    reviews_count: int
    size_bytes: Optional[int]
    installs: int
    app_type: AppType
    price: float
    content_rating: str
    genres: str
    last_updated: Optional[date]
    current_version: str
    android_version: str


@dataclass(frozen=True)
class ReviewRecord:
    source: Source
    app_name: str
    raw_text: str
    rating: Optional[float]
    label: Label


@dataclass(frozen=True)
class StudentRecord:
    department: str
    app_name: str
    review_text: str
    rating: float
    app_type: AppType

    def to_review(self):
        return ReviewRecord(Source.STUDENT, self.app_name, self.review_text,
                            self.rating, derive_label(self.rating))


@dataclass
class LoadReport:
    path: str
    total_rows: int = 0
    loaded: int = 0
    dropped: Counter = field(default_factory=Counter)
    rejects: list = field(default_factory=list)
    decode_errors: int = 0
    ignored_columns: list = field(default_factory=list)

    @property
    def dropped_count(self):
        return sum(self.dropped.values())

    def drop(self, row, reason, detail=None):
        self.dropped[reason] += 1
        self.rejects.append((row, reason if detail is None else f"{reason}: {detail}"))

    def to_dict(self):
        d = asdict(self)
        d["path"] = os.path.basename(self.path)
        d["dropped"] = dict(sorted(self.dropped.items()))
        d["dropped_count"] = self.dropped_count
        d["rejects"] = [{"row": r, "reason": why} for r, why in self.rejects]
        return d


@dataclass
class Loaded:
    """Records plus the report describing what was kept and what was not."""

    records: list
    report: LoadReport
    # Review rows labelled Neutral: unusable for the binary task, kept for
    # lexicon scoring and EDA. Tuples of (app_name, raw_text).
    neutral: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


# ----------------------------------------------------------------------------
# Cell parsers

_MISSING = {"", "nan", "none", "null", "na", "n/a", "varies with device"}


def _is_missing(text):
    return text is None or str(text).strip().lower() in _MISSING


def parse_installs(text):
    """'1,000,000+' -> 1000000."""
    s = str(text).strip().replace(",", "").rstrip("+")
    if not s.isdigit():
        raise Unparseable(f"installs {text!r}")
    return int(s)


def parse_price(text):
    """'$4.99' -> 4.99, '0' -> 0.0."""
    s = str(text).strip()
    if s[:1] in "$€£₹":
        s = s[1:]
    try:
        value = float(s)
    except ValueError:
        raise Unparseable(f"price {text!r}") from None
    if not value >= 0 or value == float("inf"):
        raise Unparseable(f"price {text!r}")
    return value


_SIZE_UNITS = {"k": 2 ** 10, "m": 2 ** 20, "g": 2 ** 30}


def parse_size(text):
    """'19M' -> 19 * 2**20 bytes, '512k' -> 512 * 2**10; unknown -> None."""
    if _is_missing(text):
        return None
    s = str(text).strip().replace(",", "")
    unit = _SIZE_UNITS.get(s[-1:].lower())
    number = s[:-1] if unit else s
    try:
        value = float(number)
    except ValueError:
        raise Unparseable(f"size {text!r}") from None
    if value < 0:
        raise Unparseable(f"size {text!r}")
    return int(round(value * (unit or 1)))


def parse_rating(text):
    if _is_missing(text):
        return None
    try:
        value = float(str(text).strip())
    except ValueError:
        raise Unparseable(f"rating {text!r}") from None
    if not 1.0 <= value <= 5.0:
        raise OutOfRange(f"rating {value} outside [1, 5]")
    return value


def parse_count(text):
    s = str(text).strip().replace(",", "")
    if not s.isdigit():
        raise Unparseable(f"count {text!r}")
    return int(s)


def parse_app_type(text):
    s = str(text).strip().lower()
    for t in AppType:
        if s == t.value.lower():
            return t
    raise Unparseable(f"type {text!r}")


def parse_date(text):
    if _is_missing(text):
        return None
    s = str(text).strip()
    for fmt in ("%B %d, %Y", "%Y-%m-%d", "%b %d, %Y", "%d/%m/%Y"):
        try:
            return datetime.strptime(s, fmt).date()
        except ValueError:
            pass
    raise Unparseable(f"date {text!r}")


def derive_label(rating):
    """Ratings of 3 and above are Positive, below 3 Negative."""
    rating = float(rating)
    if not 1.0 <= rating <= 5.0:
        raise OutOfRange(f"rating {rating} outside [1, 5]")
    return Label.POSITIVE if rating >= 3.0 else Label.NEGATIVE


# ----------------------------------------------------------------------------
# File access


def _read_rows(path, report):
    if not os.path.isfile(path):
        raise MissingFile(f"no such file: {path}")
    with open(path, "rb") as fh:
        data = fh.read()
    text = data.decode("utf-8-sig", errors="replace")
    report.decode_errors = text.count("�") - data.count("�".encode())
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise MalformedHeader(f"{path}: empty file, expected a header row")
    return rows[0], rows[1:]


def _canon(name):
    return re.sub(r"[\s_\-]+", "_", name.strip().lower())


def _find(header, candidates):
    canon = [_canon(h) for h in header]
    for cand in candidates:
        if cand in canon:
            return canon.index(cand)
    return None


APP_COLUMNS = ["App", "Category", "Rating", "Reviews", "Size", "Installs", "Type",
               "Price", "Content Rating", "Genres", "Last Updated", "Current Ver",
               "Android Ver"]


def load_app_metadata(path):
    report = LoadReport(path)
    header, rows = _read_rows(path, report)
    if len(header) != len(APP_COLUMNS):
        raise MalformedHeader(
            f"{path}: expected {len(APP_COLUMNS)} columns, found {len(header)}")
    records = []
    for i, row in enumerate(rows, start=1):
        report.total_rows += 1
        if len(row) != len(APP_COLUMNS):
            report.drop(i, "wrong_field_count", f"{len(row)} fields")
            continue
        try:
            rec = _app_record(row)
        except CorpusError as exc:
            report.drop(i, "unparseable", str(exc))
            continue
        records.append(rec)
    report.loaded = len(records)
    return Loaded(records, report)


def _app_record(row):
    (name, category, rating, reviews, size, installs, app_type, price,
     content_rating, genres, updated, current, android) = [c.strip() for c in row]
    if not name:
        raise Unparseable("empty app name")
    price_v = parse_price(price)
    type_v = parse_app_type(app_type)
    if (type_v is AppType.FREE) != (price_v == 0):
        raise Unparseable(f"type {type_v.value} inconsistent with price {price_v}")
    return AppRecord(
        app_name=name,
        category=category,
        rating=parse_rating(rating),
        reviews_count=parse_count(reviews),
        size_bytes=parse_size(size),
        installs=parse_installs(installs),
        app_type=type_v,
        price=price_v,
        content_rating=content_rating,
        genres=genres,
        last_updated=parse_date(updated),
        current_version=current,
        android_version=android,
    )


_APP_NAMES = ["app", "app_name", "application", "name"]
_TEXT_NAMES = ["raw_text", "text", "review", "translated_review", "review_text",
               "reviews", "content", "comment"]
_LABEL_NAMES = ["label", "sentiment", "orientation"]
_RATING_NAMES = ["rating", "ratings", "score", "stars"]


def load_review_corpus(path, source=Source.GOOGLE):
    """Load labelled review text.

    The label comes from the rating when a rating column is present and the
    cell parses, otherwise from the label column. Rows labelled Neutral are
    dropped (reason ``neutral``) and kept aside in ``Loaded.neutral``.
    Exact (app, text) duplicates are dropped after the first occurrence.
    """
    report = LoadReport(path)
    header, rows = _read_rows(path, report)
    i_app = _find(header, _APP_NAMES)
    i_text = _find(header, _TEXT_NAMES)
    i_label = _find(header, _LABEL_NAMES)
    i_rating = _find(header, _RATING_NAMES)
    if i_text is None or (i_label is None and i_rating is None):
        raise NoUsableColumns(
            f"{path}: need a text column and a label or rating column, got {header}")

    source = Source(source)
    seen = set()
    records, neutral = [], []
    for i, row in enumerate(rows, start=1):
        report.total_rows += 1
        cell = lambda j: row[j].strip() if j is not None and j < len(row) else ""
        text, app = cell(i_text), cell(i_app)
        if _is_missing(text):
            report.drop(i, "empty_text")
            continue
        if not normalize(text):
            report.drop(i, "empty_after_cleaning")
            continue
        rating = None
        try:
            rating = parse_rating(cell(i_rating)) if i_rating is not None else None
        except CorpusError as exc:
            report.drop(i, "bad_rating", str(exc))
            continue
        if rating is not None:
            label = derive_label(rating)
        else:
            raw_label = cell(i_label).lower()
            if raw_label == "neutral":
                report.drop(i, "neutral")
                neutral.append((app, text))
                continue
            try:
                label = Label.parse(raw_label)
            except ValueError:
                report.drop(i, "missing_label")
                continue
        key = (app, text)
        if key in seen:
            report.drop(i, "duplicate")
            continue
        seen.add(key)
        records.append(ReviewRecord(source, app, text, rating, label))
    report.loaded = len(records)
    return Loaded(records, report, neutral)


_DEPT_NAMES = ["department", "dept"]
_TYPE_NAMES = ["type", "app_type"]


def load_student_survey(path):
    report = LoadReport(path)
    header, rows = _read_rows(path, report)
    cols = {
        "department": _find(header, _DEPT_NAMES),
        "app": _find(header, _APP_NAMES),
        "review": _find(header, _TEXT_NAMES),
        "rating": _find(header, _RATING_NAMES),
        "type": _find(header, _TYPE_NAMES),
    }
    missing = [k for k, v in cols.items() if v is None]
    if missing:
        raise NoUsableColumns(f"{path}: missing survey columns {missing}")
    extra = [h for j, h in enumerate(header) if j not in cols.values()]
    if len(extra) > 1:
        raise MalformedHeader(f"{path}: unexpected columns {extra}")
    report.ignored_columns = extra

    records = []
    for i, row in enumerate(rows, start=1):
        report.total_rows += 1
        get = {k: (row[j].strip() if j < len(row) else "") for k, j in cols.items()}
        if _is_missing(get["review"]):
            report.drop(i, "empty_text")
            continue
        if not normalize(get["review"]):
            report.drop(i, "empty_after_cleaning")
            continue
        if not get["department"] or not get["app"]:
            report.drop(i, "missing_field")
            continue
        try:
            rating = parse_rating(get["rating"])
            if rating is None:
                raise Unparseable("missing rating")
            app_type = parse_app_type(get["type"])
        except CorpusError as exc:
            report.drop(i, "unparseable", str(exc))
            continue
        records.append(StudentRecord(get["department"], get["app"], get["review"],
                                     rating, app_type))
    report.loaded = len(records)
    return Loaded(records, report)


# ----------------------------------------------------------------------------
# Canonical export


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records(records, path):
    """Write dataclass records as CSV with a header of field names."""
    records = list(records)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not records:
            return
        names = list(asdict(records[0]))
        w.writerow(names)
        for rec in records:
            w.writerow([_fmt(getattr(rec, n)) for n in names])


def review_texts(records):
    return [r.raw_text for r in records]
