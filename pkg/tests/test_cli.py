import csv
import hashlib
import json
import os

import pytest

from appsent import analysis, cli, evaluation
from appsent.pipeline import TextClassifier
from appsent.seeding import DEFAULT_SEED

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
APPS = os.path.join(FIXTURES, "apps.csv")
REVIEWS = os.path.join(FIXTURES, "reviews.csv")
STUDENTS = os.path.join(FIXTURES, "students.csv")


def run(*argv):
    return cli.main([str(a) for a in argv])


def digest_tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            path = os.path.join(dirpath, f)
            with open(path, "rb") as fh:
                out[os.path.relpath(path, root)] = hashlib.sha256(fh.read()).hexdigest()
    return out


def manifest(out):
    with open(os.path.join(out, "manifest.json")) as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def ingested(tmp_path_factory):
    out = tmp_path_factory.mktemp("ingest")
    assert run("ingest", "--train", REVIEWS, "--test", STUDENTS, "--apps", APPS,
               "--out", out) == 0
    return out


class TestIngest:
    def test_outputs(self, ingested):
        for name in ("train_reviews.csv", "test_reviews.csv", "students.csv", "apps.csv",
                     "load_report.json", "manifest.json"):
            assert os.path.isfile(os.path.join(ingested, name))
        with open(os.path.join(ingested, "load_report.json")) as fh:
            report = json.load(fh)
        assert report["apps"]["loaded"] == 25 and report["apps"]["dropped_count"] == 3
        assert report["test"]["loaded"] == 40
        t = report["train"]
        assert t["loaded"] + t["dropped_count"] == t["total_rows"]
        assert t["neutral_retained"] == 2

    def test_rerun_is_byte_identical(self, ingested, tmp_path):
        assert run("ingest", "--train", REVIEWS, "--test", STUDENTS, "--apps", APPS,
                   "--out", tmp_path) == 0
        assert digest_tree(tmp_path) == digest_tree(ingested)

    def test_manifest_hashes_inputs(self, ingested):
        m = manifest(ingested)
        with open(APPS, "rb") as fh:
            assert m["inputs"]["apps"]["sha256"] == hashlib.sha256(fh.read()).hexdigest()
        assert m["seed"] == DEFAULT_SEED
        assert "load_report.json" in m["outputs"]

    def test_missing_input(self, tmp_path, capsys):
        missing = tmp_path / "absent.csv"
        assert run("ingest", "--train", missing, "--out", tmp_path / "o") == 2
        assert str(missing) in capsys.readouterr().err


class TestBench:
    def test_two_cell_grid(self, ingested, tmp_path):
        out = tmp_path / "b"
        code = run("bench", "--train", ingested / "train_reviews.csv",
                   "--test", ingested / "test_reviews.csv", "--models", "SVM,NB",
                   "--featurizations", "uni", "--out", out)
        assert code == 0
        with open(out / "accuracy.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["model", "uni"] and [r[0] for r in rows[1:]] == ["SVM", "NB"]
        assert sorted(os.listdir(out / "cells")) == ["NB__uni.json", "SVM__uni.json"]
        with open(out / "cells" / "SVM__uni.json") as fh:
            cell = json.load(fh)
        c = cell["confusion"]
        assert c["tp"] + c["fp"] + c["fn"] + c["tn"] > 0
        m = manifest(out)
        assert m["config"]["models"] == ["SVM", "NB"] and m["failed_cells"] == []
        assert m["config"]["seed"] == DEFAULT_SEED

    def test_config_file_and_override(self, ingested, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({
            "train": str(ingested / "train_reviews.csv"),
            "test": str(ingested / "test_reviews.csv"),
            "models": ["NB"], "featurizations": ["bi"], "seed": 5,
        }))
        out = tmp_path / "b"
        assert run("bench", "--config", config, "--seed", 6, "--out", out) == 0
        m = manifest(out)
        assert m["seed"] == 6 and m["config"]["featurizations"] == ["bi"]

    def test_bad_config(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"colour": "red"}))
        assert run("bench", "--config", config) == 2
        config.write_text("{not json")
        assert run("bench", "--config", config) == 2

    def test_failed_cell_exit_code(self, ingested, tmp_path, monkeypatch):
        real = evaluation.fit_cell

        def flaky(spec, model, featurization, train):
            if model == "NB":
                raise RuntimeError("boom")
            return real(spec, model, featurization, train)

        monkeypatch.setattr(evaluation, "fit_cell", flaky)
        out = tmp_path / "b"
        code = run("bench", "--train", ingested / "train_reviews.csv",
                   "--test", ingested / "test_reviews.csv", "--models", "SVM,NB",
                   "--featurizations", "uni", "--out", out)
        assert code == 1
        assert len(manifest(out)["failed_cells"]) == 1
        assert os.path.isfile(out / "cells" / "SVM__uni.json")

    def test_bad_max_features(self, ingested, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"max_features": 0}))
        assert run("bench", "--config", config, "--train", ingested / "train_reviews.csv",
                   "--test", ingested / "test_reviews.csv", "--out", tmp_path / "b") == 2

    def test_unknown_model(self, ingested, tmp_path):
        assert run("bench", "--train", ingested / "train_reviews.csv",
                   "--test", ingested / "test_reviews.csv", "--models", "GBM",
                   "--out", tmp_path) == 2


@pytest.mark.filterwarnings("ignore::appsent.classifiers.ConvergenceWarning")
class TestModelAndAnalyze:
    @pytest.fixture(scope="class")
    @staticmethod
    def model_dir(ingested, tmp_path_factory):
        out = tmp_path_factory.mktemp("model")
        assert run("export-model", "--train", ingested / "train_reviews.csv",
                   "--algorithm", "LR", "--featurization", "bi", "--out", out) == 0
        return out

    def test_model_reloads(self, model_dir):
        pipe = TextClassifier.load(os.path.join(model_dir, "model.json"))
        labels = pipe.predict(["Great app, love it", "Keeps crashing, worst app"])
        assert [str(l) for l in labels] == ["Positive", "Negative"]

    def test_bagged_export(self, ingested, tmp_path):
        assert run("export-model", "--train", ingested / "train_reviews.csv",
                   "--algorithm", "NB(Bagging)", "--n-estimators", 3, "--out", tmp_path) == 0
        pipe = TextClassifier.load(os.path.join(tmp_path, "model.json"))
        assert len(pipe.model.members) == 3

    def test_analyze_without_model(self, tmp_path, capsys):
        assert run("analyze", "--apps", APPS, "--students", STUDENTS, "--out", tmp_path) == 0
        assert "rq6" in capsys.readouterr().err
        files = set(os.listdir(tmp_path))
        assert files == {analysis.RQ_FILES[k] for k in ("rq1", "rq2", "rq3", "rq4", "rq5")} | {
            analysis.SUMMARY_FILE, "manifest.json"}
        assert manifest(tmp_path)["seed"] == DEFAULT_SEED

    def test_analyze_with_model(self, model_dir, tmp_path):
        assert run("analyze", "--apps", APPS, "--students", STUDENTS, "--reviews", REVIEWS,
                   "--model", os.path.join(model_dir, "model.json"), "--out", tmp_path) == 0
        assert set(analysis.RQ_FILES.values()) <= set(os.listdir(tmp_path))
        with open(tmp_path / analysis.SUMMARY_FILE) as fh:
            summary = json.load(fh)
        assert summary["rq6"]["tp"] + summary["rq6"]["fn"] > 0
        assert summary["rq3"]["google_installs_reviews"] > 0

    def test_analyze_missing_input(self, tmp_path):
        assert run("analyze", "--apps", APPS, "--students", tmp_path / "x.csv",
                   "--out", tmp_path) == 2


def test_score_lexicon(tmp_path):
    assert run("score-lexicon", "--input", REVIEWS, "--out", tmp_path) == 0
    with open(tmp_path / "lexicon_scores.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {r["orientation"] for r in rows} <= {"Positive", "Negative", "Neutral"}
    assert any(r["label"] == "Neutral" for r in rows)
    for r in rows:
        assert -1 <= float(r["polarity"]) <= 1


def test_outputs_are_world_readable(tmp_path):
    run("score-lexicon", "--input", REVIEWS, "--out", tmp_path)
    assert os.stat(tmp_path / "lexicon_scores.csv").st_mode & 0o044 == 0o044
