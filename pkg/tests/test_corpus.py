import csv
import datetime

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from appsent import corpus
from appsent.corpus import (
    AppType,
    MalformedHeader,
    MissingFile,
    NoUsableColumns,
    OutOfRange,
    Source,
    Unparseable,
    derive_label,
    load_app_metadata,
    load_review_corpus,
    load_student_survey,
    parse_installs,
    parse_price,
    parse_size,
    write_records,
)
from appsent.labels import Label


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


class TestParsers:
    @pytest.mark.parametrize("text, expected", [
        ("1,000+", 1000), ("1,000,000+", 1000000), ("0", 0), ("10+", 10),
        ("1,000,000,000+", 10 ** 9),
    ])
    def test_installs(self, text, expected):
        assert parse_installs(text) == expected

    @pytest.mark.parametrize("text", ["Free", "", "1.5+", "-3"])
    def test_installs_rejects(self, text):
        with pytest.raises(Unparseable):
            parse_installs(text)

    @given(st.integers(min_value=0, max_value=10 ** 9))
    @settings(max_examples=300)
    def test_installs_roundtrip(self, n):
        # the store's display format: thousands separators and a trailing '+'
        assert parse_installs(f"{n:,}+") == n
        assert parse_installs(str(n)) == n

    @pytest.mark.parametrize("text, expected", [("$4.99", 4.99), ("0", 0.0), ("$0.99", 0.99)])
    def test_price(self, text, expected):
        assert parse_price(text) == expected

    def test_price_rejects(self):
        for bad in ("Everyone", "$-1", "nan"):
            with pytest.raises(Unparseable):
                parse_price(bad)

    @pytest.mark.parametrize("text, expected", [
        ("19M", 19922944), ("512k", 524288), ("8.4M", round(8.4 * 2 ** 20)),
        ("1G", 2 ** 30), ("Varies with device", None), ("", None), ("NaN", None),
    ])
    def test_size(self, text, expected):
        assert parse_size(text) == expected

    def test_size_rejects(self):
        with pytest.raises(Unparseable):
            parse_size("big")

    def test_date_formats(self):
        assert corpus.parse_date("January 7, 2018") == datetime.date(2018, 1, 7)
        assert corpus.parse_date("2018-01-07") == datetime.date(2018, 1, 7)
        with pytest.raises(Unparseable):
            corpus.parse_date("yesterday")


class TestDeriveLabel:
    @pytest.mark.parametrize("rating, label", [
        (1, Label.NEGATIVE), (2, Label.NEGATIVE), (2.9, Label.NEGATIVE),
        (2.999999, Label.NEGATIVE), (3, Label.POSITIVE), (3.0, Label.POSITIVE),
        (3.1, Label.POSITIVE), (5, Label.POSITIVE),
    ])
    def test_boundary(self, rating, label):
        assert derive_label(rating) is label

    @pytest.mark.parametrize("rating", [0, 0.99, 5.01, 7, float("nan")])
    def test_out_of_range(self, rating):
        with pytest.raises(OutOfRange):
            derive_label(rating)


class TestAppMetadata:
    def test_fixture(self, fixtures):
        loaded = load_app_metadata(fixtures("apps.csv"))
        assert len(loaded) == 25
        assert loaded.report.dropped_count == 3
        assert len(loaded) + loaded.report.dropped_count == loaded.report.total_rows
        by_name = {a.app_name: a for a in loaded}
        fb = by_name["Facebook"]
        assert fb.installs == 1_000_000_000
        assert fb.size_bytes is None
        assert fb.app_type is AppType.FREE and fb.price == 0
        mc = by_name["Minecraft"]
        assert mc.app_type is AppType.PAID and mc.price == 6.99
        assert by_name["Tiny Pdf Tool"].rating is None
        assert by_name["Tiny Pdf Tool"].size_bytes == 512 * 1024
        assert by_name["Subway Surfers"].size_bytes == 76 * 2 ** 20

    def test_free_price_invariant(self, fixtures):
        for a in load_app_metadata(fixtures("apps.csv")):
            assert (a.app_type is AppType.FREE) == (a.price == 0)
            assert a.rating is None or 1 <= a.rating <= 5
            assert a.installs >= 0 and a.reviews_count >= 0

    def test_rejects_are_reported(self, fixtures):
        report = load_app_metadata(fixtures("apps.csv")).report
        reasons = dict(report.rejects)
        assert reasons[26].startswith("wrong_field_count")
        assert "inconsistent" in reasons[27]
        assert "installs" in reasons[28]

    def test_header_must_have_13_columns(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", ["App", "Category"], [["x", "y"]])
        with pytest.raises(MalformedHeader):
            load_app_metadata(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile, match="nope.csv"):
            load_app_metadata(str(tmp_path / "nope.csv"))


class TestReviewCorpus:
    def test_empty_text_rows_dropped(self, tmp_path):
        rows = [["A", f"review number {i}", "Positive"] for i in range(8)]
        rows += [["A", "", "Negative"], ["B", "   ", "Negative"]]
        loaded = load_review_corpus(write_csv(tmp_path / "r.csv", ["App", "Text", "Label"], rows))
        assert len(loaded) == 8
        assert loaded.report.dropped_count == 2

    def test_duplicates_collapse(self, tmp_path):
        rows = [["A", "same text", "Positive"]] * 3 + [["B", "same text", "Positive"]]
        loaded = load_review_corpus(write_csv(tmp_path / "r.csv", ["App", "Text", "Label"], rows))
        assert [(r.app_name, r.raw_text) for r in loaded] == [("A", "same text"),
                                                             ("B", "same text")]
        assert loaded.report.dropped["duplicate"] == 2

    def test_rating_column_drives_label(self, tmp_path):
        rows = [["A", "meh", "2.5"], ["A", "ok", "3"], ["A", "great", "5"]]
        loaded = load_review_corpus(write_csv(tmp_path / "r.csv", ["app", "review", "rating"],
                                              rows))
        assert [r.label for r in loaded] == [Label.NEGATIVE, Label.POSITIVE, Label.POSITIVE]

    def test_neutral_kept_aside(self, fixtures):
        loaded = load_review_corpus(fixtures("reviews.csv"))
        assert loaded.report.dropped["neutral"] == 2
        assert ("Instagram", "It is an app.") in loaded.neutral

    def test_fixture_accounting(self, fixtures):
        loaded = load_review_corpus(fixtures("reviews.csv"))
        report = loaded.report
        assert len(loaded) + report.dropped_count == report.total_rows
        for r in loaded:
            assert r.source is Source.GOOGLE
            assert r.label in (Label.POSITIVE, Label.NEGATIVE)
            if r.rating is not None:
                assert r.label is derive_label(r.rating)
        keys = [(r.app_name, r.raw_text) for r in loaded]
        assert len(keys) == len(set(keys))

    def test_deterministic(self, fixtures):
        a = load_review_corpus(fixtures("reviews.csv"))
        b = load_review_corpus(fixtures("reviews.csv"))
        assert a.records == b.records
        assert a.report.to_dict() == b.report.to_dict()

    def test_no_usable_columns(self, tmp_path):
        path = write_csv(tmp_path / "r.csv", ["foo", "bar"], [["1", "2"]])
        with pytest.raises(NoUsableColumns):
            load_review_corpus(path)

    def test_undecodable_bytes_are_counted(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_bytes(b"App,Text,Label\nA,caf\xe9 good,Positive\nB,fine,Negative\n")
        loaded = load_review_corpus(str(path))
        assert len(loaded) == 2
        assert loaded.report.decode_errors == 1


class TestStudentSurvey:
    def test_table_rows(self, fixtures):
        loaded = load_student_survey(fixtures("students.csv"))
        first = {s.review_text: s for s in loaded}
        wps = first["Very well designed. Many updates present."]
        assert (wps.department, wps.app_name, wps.rating, wps.app_type) == (
            "Mathematics", "WPS Office", 5.0, AppType.FREE)
        assert wps.to_review().label is Label.POSITIVE
        assert first["Horrible. Keeps crashing my phone."].to_review().label is Label.NEGATIVE

    def test_extra_column_ignored_and_bad_rows_rejected(self, fixtures):
        loaded = load_student_survey(fixtures("students.csv"))
        assert loaded.report.ignored_columns == ["Timestamp"]
        assert loaded.report.dropped == {"empty_text": 1, "unparseable": 1}
        assert len(loaded) == 40

    def test_two_extra_columns_is_malformed(self, tmp_path):
        header = ["department", "app", "review", "rating", "type", "x", "y"]
        path = write_csv(tmp_path / "s.csv", header, [["D", "A", "ok", "4", "Free", "", ""]])
        with pytest.raises(MalformedHeader):
            load_student_survey(path)


class TestWriteRecords:
    @pytest.mark.parametrize("loader, name", [
        (load_app_metadata, "apps.csv"),
        (load_review_corpus, "reviews.csv"),
        (load_student_survey, "students.csv"),
    ])
    def test_roundtrip(self, loader, name, fixtures, tmp_path):
        original = loader(fixtures(name)).records
        out = str(tmp_path / "sub" / name)
        write_records(original, out)
        again = loader(out)
        assert again.records == original
        assert again.report.dropped_count == 0
