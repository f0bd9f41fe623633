"""Sentiment classification of app-store reviews.

Ingestion, text preprocessing, n-gram TF-IDF features, five from-scratch
classifiers with a bagging wrapper, lexicon polarity scoring and the
exploratory statistics used to compare store reviews with a student survey.
"""

from appsent.labels import Label

__version__ = "0.1.0"

__all__ = ["Label", "__version__"]
