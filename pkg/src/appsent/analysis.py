"""Exploratory statistics comparing the store corpus with the student survey.

Everything here produces plain data (tables of numbers) for plotting
elsewhere. Student rows are matched to store metadata by case-insensitive
app name when a statistic needs installs, size, price or review counts.
"""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from appsent import evaluation
from appsent.lexicon import score_text

CORRELATION_FIELDS = ("rating", "reviews_count", "size_bytes", "installs", "price")

RQ_FILES = {
    "rq1": "rq1_distributions.csv",
    "rq2": "rq2_size_rating.csv",
    "rq3": "rq3_correlations.csv",
    "rq4": "rq4_sentiment.csv",
    "rq5": "rq5_price_installs.csv",
    "rq6": "rq6_confusion.csv",
}
SUMMARY_FILE = "rq_summary.json"


class UnknownField(KeyError):
    pass


class TooFewPairs(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GroupStats:
    key: str
    count: int
    mean_rating: Optional[float]
    mean_price: Optional[float]


@dataclass
class DistributionTable:
    group_by: str
    rows: list = field(default_factory=list)
    excluded: int = 0

    def counts(self):
        return {r.key: r.count for r in self.rows}


@dataclass
class CorrelationMatrix:
    variables: tuple
    coefficients: list  # square, None where undefined
    n_pairs: list

    def get(self, a, b):
        return self.coefficients[self.variables.index(a)][self.variables.index(b)]


def _value(record, name):
    if isinstance(record, dict):
        if name not in record:
            raise UnknownField(name)
        v = record[name]
    else:
        if not hasattr(record, name):
            raise UnknownField(name)
        v = getattr(record, name)
    return v.value if isinstance(v, Enum) else v


def _missing(v):
    return v is None or (isinstance(v, float) and math.isnan(v)) or v == ""


def _mean(values):
    values = [v for v in values if not _missing(v)]
    return sum(values) / len(values) if values else None


def distribution(records, group_by):
    groups, excluded = {}, 0
    for rec in records:
        key = _value(rec, group_by)
        if _missing(key):
            excluded += 1
            continue
        groups.setdefault(str(key), []).append(rec)

    def field_mean(recs, name):
        try:
            return _mean(_value(r, name) for r in recs)
        except UnknownField:
            return None

    rows = [GroupStats(k, len(v), field_mean(v, "rating"), field_mean(v, "price"))
            for k, v in groups.items()]
    rows.sort(key=lambda g: (-g.count, g.key))
    return DistributionTable(group_by, rows, excluded)


def pearson(xs, ys):
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} x values, {len(ys)} y values")
    pairs = [(float(x), float(y)) for x, y in zip(xs, ys)
             if not _missing(x) and not _missing(y)]
    if len(pairs) < 2:
        raise TooFewPairs(f"need at least 2 complete pairs, have {len(pairs)}")
    n = len(pairs)
    mx = math.fsum(p[0] for p in pairs) / n
    my = math.fsum(p[1] for p in pairs) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in pairs)
    sxx = math.fsum((x - mx) ** 2 for x, _ in pairs)
    syy = math.fsum((y - my) ** 2 for _, y in pairs)
    if sxx == 0 or syy == 0:
        warnings.warn("pearson: zero variance, returning 0", RuntimeWarning, stacklevel=2)
        return 0.0
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_matrix(records, variables=CORRELATION_FIELDS):
    records = list(records)
    cols = {v: [_value(r, v) for r in records] for v in variables}
    k = len(variables)
    coef = [[None] * k for _ in range(k)]
    npairs = [[0] * k for _ in range(k)]
    for i, a in enumerate(variables):
        for j, b in enumerate(variables):
            n = sum(1 for x, y in zip(cols[a], cols[b]) if not _missing(x) and not _missing(y))
            npairs[i][j] = n
            if i == j:
                coef[i][j] = 1.0
            elif j < i:
                coef[i][j] = coef[j][i]
            elif n >= 2:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    coef[i][j] = pearson(cols[a], cols[b])
    return CorrelationMatrix(tuple(variables), coef, npairs)


def joint_data(records, x_field, y_field):
    out = []
    for rec in records:
        x, y = _value(rec, x_field), _value(rec, y_field)
        if not _missing(x) and not _missing(y):
            out.append((x, y))
    return out


def sentiment_pairs(scored):
    """(polarity, subjectivity) per scored record."""
    return [(s.polarity, s.subjectivity) for _, s in scored]


# ----------------------------------------------------------------------------
# Research-question report


def _app_key(name):
    return " ".join(name.lower().split())


def join_students(students, apps):
    """Student rows with store metadata attached (rating stays the student's)."""
    meta = {}
    for a in apps:
        meta.setdefault(_app_key(a.app_name), a)
    rows = []
    for s in students:
        a = meta.get(_app_key(s.app_name))
        rows.append({
            "app_name": s.app_name,
            "department": s.department,
            "app_type": s.app_type.value,
            "rating": s.rating,
            "reviews_count": a.reviews_count if a else None,
            "size_bytes": a.size_bytes if a else None,
            "installs": a.installs if a else None,
            "price": a.price if a else (0.0 if s.app_type.value == "Free" else None),
            "category": a.category if a else None,
        })
    return rows


def _dist_rows(corpus, table):
    return [[corpus, table.group_by, g.key, g.count, g.mean_rating, g.mean_price]
            for g in table.rows]


def _corr_rows(corpus, m):
    rows = []
    for i, a in enumerate(m.variables):
        for j, b in enumerate(m.variables):
            rows.append([corpus, a, b, m.coefficients[i][j], m.n_pairs[i][j]])
    return rows


def rq_report(apps, students, lexicon, reviews=(), model=None):
    """Bundle the six research-question sections.

    ``apps``: AppRecords; ``students``: StudentRecords; ``reviews``: store
    ReviewRecords for the store side of the sentiment scatter; ``model``: a
    fitted TextClassifier evaluated on the students' reviews (section rq6 is
    omitted without one).
    """
    apps, students, reviews = list(apps), list(students), list(reviews)
    joined = join_students(students, apps)
    sections = {}

    dists = [
        ("google", distribution(apps, "category")),
        ("google", distribution(apps, "rating")),
        ("google", distribution(apps, "price")),
        ("google", distribution(apps, "app_type")),
        ("student", distribution(students, "department")),
        ("student", distribution(students, "app_name")),
        ("student", distribution(joined, "category")),
        ("student", distribution(students, "rating")),
    ]
    sections["rq1"] = {
        "header": ["corpus", "dimension", "group", "count", "mean_rating", "mean_price"],
        "rows": [row for corpus, t in dists for row in _dist_rows(corpus, t)],
        "summary": {
            "google_mean_rating": _mean(a.rating for a in apps),
            "student_mean_rating": _mean(s.rating for s in students),
            "google_top_categories": [g.key for g in dists[0][1].rows[:5]],
            "student_departments": dists[4][1].counts(),
        },
    }

    sections["rq2"] = {
        "header": ["corpus", "app_name", "size_bytes", "rating"],
        "rows": ([["google", a.app_name, a.size_bytes, a.rating] for a in apps
                  if a.size_bytes is not None and a.rating is not None]
                 + [["student", r["app_name"], r["size_bytes"], r["rating"]] for r in joined
                    if r["size_bytes"] is not None]),
        "summary": {"google_pairs": len(joint_data(apps, "size_bytes", "rating")),
                    "student_pairs": len(joint_data(joined, "size_bytes", "rating"))},
    }

    corr_g = correlation_matrix(apps)
    corr_s = correlation_matrix(joined)
    sections["rq3"] = {
        "header": ["corpus", "var_x", "var_y", "pearson", "n_pairs"],
        "rows": _corr_rows("google", corr_g) + _corr_rows("student", corr_s),
        "summary": {
            "google_installs_reviews": corr_g.get("installs", "reviews_count"),
            "google_installs_price": corr_g.get("installs", "price"),
            "student_installs_reviews": corr_s.get("installs", "reviews_count"),
            "student_installs_price": corr_s.get("installs", "price"),
        },
    }

    rq4_rows = []
    for corpus, items in (("google", [(r.app_name, r.raw_text) for r in reviews]),
                          ("student", [(s.app_name, s.review_text) for s in students])):
        for app, text in items:
            s = score_text(text, lexicon)
            rq4_rows.append([corpus, app, s.polarity, s.subjectivity, s.orientation.value])
    orient = {}
    for row in rq4_rows:
        orient.setdefault(row[0], {}).setdefault(row[4], 0)
        orient[row[0]][row[4]] += 1
    sections["rq4"] = {
        "header": ["corpus", "app_name", "polarity", "subjectivity", "orientation"],
        "rows": rq4_rows,
        "summary": {"orientation_counts": {k: dict(sorted(v.items()))
                                           for k, v in sorted(orient.items())}},
    }

    sections["rq5"] = {
        "header": ["corpus", "app_name", "price", "installs"],
        "rows": ([["google", a.app_name, a.price, a.installs] for a in apps]
                 + [["student", r["app_name"], r["price"], r["installs"]] for r in joined
                    if r["price"] is not None and r["installs"] is not None]),
        "summary": {"google_free_share": (sum(a.price == 0 for a in apps) / len(apps)
                                          if apps else None),
                    "student_free_share": (sum(s.app_type.value == "Free" for s in students)
                                           / len(students) if students else None)},
    }

    if model is not None and students:
        texts = [s.review_text for s in students]
        truths = [s.to_review().label for s in students]
        c = evaluation.confusion(model.predict(texts), truths)
        metrics = {"precision": evaluation.precision(c), "recall": evaluation.recall(c),
                   "f_measure": evaluation.f_measure(c), "accuracy": evaluation.accuracy(c)}
        sections["rq6"] = {
            "header": ["tp", "fp", "fn", "tn", "precision", "recall", "f_measure", "accuracy"],
            "rows": [[c.tp, c.fp, c.fn, c.tn, metrics["precision"], metrics["recall"],
                      metrics["f_measure"], metrics["accuracy"]]],
            "summary": {**c.to_dict(), **metrics},
        }
    return sections


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def section_csv(section):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(section["header"])
    for row in section["rows"]:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def summary_json(sections):
    return json.dumps({k: v["summary"] for k, v in sections.items()},
                      indent=2, sort_keys=True) + "\n"
