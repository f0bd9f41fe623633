from enum import Enum

import numpy as np


class Label(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    @classmethod
    def parse(cls, value):
        """Accept 'positive'/'negative' in any case, or 1/0."""
        if isinstance(value, Label):
            return value
        text = str(value).strip().lower()
        if text in ("positive", "pos", "1"):
            return cls.POSITIVE
        if text in ("negative", "neg", "0"):
            return cls.NEGATIVE
        raise ValueError(f"not a binary sentiment label: {value!r}")

    def __int__(self):
        return 1 if self is Label.POSITIVE else 0

    def __str__(self):
        return self.value


def encode(labels):
    """Labels -> int8 array with Positive = 1."""
    return np.fromiter((int(Label.parse(l)) for l in labels), dtype=np.int8)


def decode(y):
    return [Label.POSITIVE if v else Label.NEGATIVE for v in np.asarray(y)]
