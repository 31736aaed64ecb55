"""Sentiment-driven score boosting and small prediction utilities.

The boost takes the top-k emotion confidence scores and, for each whose
mapped sentiment is itself confident (score >= threshold), replaces the
emotion score E with sigmoid(E + S).  Scores outside the top-k set are
never touched.  Note a very confident emotion can come out *lower*
(sigmoid(E + S) < E is possible for large E); that is inherent to the
replacement rule.
"""

import json

import numpy as np

from . import schema
from .errors import ArgumentError, SchemaError
from .numerics import sigmoid


class SentimentMap:
    """Total mapping from each emotion category to one sentiment."""

    def __init__(self, mapping: dict, emotions=None, sentiments=None):
        emotions = schema.EMOTIONS if emotions is None else list(emotions)
        self.sentiments = (
            schema.SENTIMENTS if sentiments is None else list(sentiments)
        )
        unknown = sorted(set(mapping) - set(emotions))
        if unknown:
            raise SchemaError(f"sentiment map names unknown emotions: {unknown}")
        missing = sorted(set(emotions) - set(mapping))
        if missing:
            raise SchemaError(f"sentiment map misses emotions: {missing}")
        bad = sorted({v for v in mapping.values()} - set(self.sentiments))
        if bad:
            raise SchemaError(f"sentiment map uses unknown sentiments: {bad}")
        self.emotions = list(emotions)
        self.mapping = dict(mapping)
        self._index = np.array(
            [self.sentiments.index(mapping[e]) for e in self.emotions], dtype=np.int64
        )

    def sentiment_of(self, emotion: str) -> int:
        """Sentiment index of one emotion name."""
        try:
            return int(self._index[self.emotions.index(emotion)])
        except ValueError:
            raise SchemaError(f"unknown emotion {emotion!r}") from None

    @property
    def indices(self) -> np.ndarray:
        """Per-emotion sentiment index, in schema order."""
        return self._index

    @classmethod
    def default(cls, emotions=None, sentiments=None):
        return cls(schema.DEFAULT_SENTIMENT_MAP, emotions, sentiments)

    @classmethod
    def from_json(cls, path, emotions=None, sentiments=None):
        with open(path, "r", encoding="utf-8") as fh:
            mapping = json.load(fh)
        if not isinstance(mapping, dict):
            raise SchemaError(f"{path}: sentiment map must be a JSON object")
        return cls(mapping, emotions, sentiments)


def topk(scores, k) -> list:
    """Indices of the k largest scores, descending, ties by ascending index."""
    scores = np.asarray(scores)
    n = scores.shape[0]
    if not 1 <= k <= n:
        raise ArgumentError(f"k={k} out of range [1, {n}]")
    order = np.lexsort((np.arange(n), -scores))
    return [int(i) for i in order[:k]]


def boost(
    emotion_scores,
    sentiment_scores,
    smap: SentimentMap,
    k: int = 5,
    sentiment_threshold: float = 0.5,
) -> np.ndarray:
    """Apply the sentiment boost to the top-k emotion scores."""
    e = np.asarray(emotion_scores, dtype=np.float64)
    s = np.asarray(sentiment_scores, dtype=np.float64)
    if e.shape[0] != len(smap.emotions) or s.shape[0] != len(smap.sentiments):
        raise ArgumentError(
            f"score lengths {e.shape[0]}/{s.shape[0]} do not match the "
            f"{len(smap.emotions)}-emotion/{len(smap.sentiments)}-sentiment schema"
        )
    out = e.copy()
    for i in topk(e, k):
        sj = s[smap.indices[i]]
        if sj >= sentiment_threshold:
            out[i] = sigmoid(e[i] + sj)
    return out


def threshold_predict(scores, tau: float = 0.5) -> np.ndarray:
    """Multi-hot vector: 1 where score >= tau."""
    if not 0.0 <= tau <= 1.0:
        raise ArgumentError(f"tau={tau} outside [0, 1]")
    return (np.asarray(scores) >= tau).astype(np.int64)
