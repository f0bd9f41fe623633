"""A fitted text -> label pipeline: preprocessing settings, vocabulary, model."""

import json

from appsent import classifiers
from appsent.ensemble import BaggedModel
from appsent.labels import decode
from appsent.textprep import PrepConfig, preprocess_corpus
from appsent.vectorize import Vocabulary, transform_corpus

PIPELINE_FORMAT = "appsent.pipeline/1"


class TextClassifier:
    def __init__(self, prep, vocabulary, model):
        self.prep = prep
        self.vocabulary = vocabulary
        self.model = model

    def transform(self, texts):
        return transform_corpus(preprocess_corpus(texts, self.prep), self.vocabulary)

    def predict_codes(self, texts):
        return classifiers.predict_batch(self.model, self.transform(texts))

    def predict(self, texts):
        return decode(self.predict_codes(texts))

    def to_dict(self):
        return {
            "format": PIPELINE_FORMAT,
            "prep": self.prep.to_dict(),
            "vocabulary": self.vocabulary.to_dict(),
            "kind": "bagging" if isinstance(self.model, BaggedModel) else "single",
            "model": self.model.to_dict(),
        }

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != PIPELINE_FORMAT:
            raise ValueError(f"unsupported pipeline format {d.get('format')!r}")
        if d["kind"] == "bagging":
            model = BaggedModel.from_dict(d["model"])
        else:
            model = classifiers.model_from_dict(d["model"])
        return cls(PrepConfig(**d["prep"]), Vocabulary.from_dict(d["vocabulary"]), model)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
