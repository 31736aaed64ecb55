"""Average Precision evaluation: per-emotion AP, mean AP, per-sentiment
AP, and the evaluation report with size accounting.

The AP variant is non-interpolated (precision summed at the ranks of
positive items, divided by the positive count); ties in the score
ranking break by ascending sample index so reports are reproducible.
Classes with zero positives in a split have undefined AP; they are
excluded from the mean and listed by name in the report.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import postprocess
from .errors import SelinetError, UndefinedMetricError
from .model import HeadParams, forward_batch
from .numerics import sigmoid
from .postprocess import SentimentMap
from .quantize import QuantizedModel, size_report

AP_VARIANT = "non-interpolated"


def average_precision(scores, labels) -> float:
    """Non-interpolated AP of one class over m samples."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    m = scores.shape[0]
    if labels.shape[0] != m or m < 1:
        raise UndefinedMetricError(
            f"scores/labels length mismatch or empty: {scores.shape} vs {labels.shape}"
        )
    npos = int(np.sum(labels == 1))
    if npos == 0:
        raise UndefinedMetricError("AP undefined: no positive labels")
    order = np.lexsort((np.arange(m), -scores))
    hits = (labels[order] == 1).astype(np.float64)
    cum = np.cumsum(hits)
    ranks = np.arange(1, m + 1, dtype=np.float64)
    return float(np.sum((cum / ranks) * hits) / npos)


@dataclass
class EvalReport:
    per_emotion_ap: dict  # name -> AP, or None where undefined
    mean_ap: Optional[float]
    excluded_emotions: list
    per_sentiment_ap: Optional[dict]
    excluded_sentiments: list
    boost: bool
    flags: dict
    sample_count: int
    sizes: dict  # size_report of the evaluated model
    quantized_sizes: Optional[dict] = None
    ap_variant: str = AP_VARIANT
    errors: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ap_variant": self.ap_variant,
            "mean_ap": self.mean_ap,
            "per_emotion_ap": self.per_emotion_ap,
            "excluded_emotions": self.excluded_emotions,
            "per_sentiment_ap": self.per_sentiment_ap,
            "excluded_sentiments": self.excluded_sentiments,
            "boost": self.boost,
            "flags": self.flags,
            "sample_count": self.sample_count,
            "sizes": self.sizes,
            "quantized_sizes": self.quantized_sizes,
        }

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_text(self) -> str:
        lines = []
        width = max(len(n) for n in self.per_emotion_ap)
        lines.append(f"{'class'.ljust(width)}  AP")
        for name, ap in self.per_emotion_ap.items():
            val = "   --" if ap is None else f"{ap:.4f}"
            lines.append(f"{name.ljust(width)}  {val}")
        mean = "--" if self.mean_ap is None else f"{self.mean_ap:.4f}"
        lines.append(f"{'mean AP'.ljust(width)}  {mean}")
        if self.per_sentiment_ap is not None:
            for name, ap in self.per_sentiment_ap.items():
                val = "   --" if ap is None else f"{ap:.4f}"
                lines.append(f"{('sentiment ' + name).ljust(width)}  {val}")
        lines.append(
            f"samples {self.sample_count}  boost {'on' if self.boost else 'off'}  "
            f"params {self.sizes['param_count']}  file {self.sizes['file_bytes']} B"
        )
        return "\n".join(lines)


def _ap_table(score_matrix, label_matrix, names):
    per = {}
    excluded = []
    vals = []
    for j, name in enumerate(names):
        try:
            ap = average_precision(score_matrix[:, j], label_matrix[:, j])
        except UndefinedMetricError:
            per[name] = None
            excluded.append(name)
            continue
        per[name] = ap
        vals.append(ap)
    mean = float(np.mean(vals)) if vals else None
    return per, mean, excluded


def evaluate(
    m,
    dataset,
    split: str,
    boost: bool = False,
    smap: SentimentMap = None,
    top_k: int = 5,
    sentiment_threshold: float = 0.5,
) -> EvalReport:
    """Score every record of a split and aggregate the AP tables.

    `m` is a HeadParams or a QuantizedModel (evaluated through its
    dequantized weights).  Boosting applies only to the emotion scores;
    sentiment AP is always computed on raw sentiment scores.
    """
    qm = None
    if isinstance(m, QuantizedModel):
        qm = m
        p = m.dequantized_params()
    else:
        p = m
    t = p.topology
    if boost and not t.use_sentiment:
        raise SelinetError("cannot boost: this topology has no sentiment head")
    if smap is None:
        smap = SentimentMap.default(p.emotions, p.sentiments)

    records = dataset.split(split)
    if not records:
        raise SelinetError(f"split {split!r} is empty")

    emo_scores, sen_scores, emo_labels, sen_labels = [], [], [], []
    for rec in records:
        try:
            body, aes = dataset.features(rec)
            le, ls, _ = forward_batch(
                body[None], aes[None] if t.use_aesthetics else None, p
            )
        except SelinetError as exc:
            raise type(exc)(f"record {rec.id!r}: {exc}") from exc
        e = sigmoid(le[0].astype(np.float64))
        s = sigmoid(ls[0].astype(np.float64)) if ls is not None else None
        if boost:
            e = postprocess.boost(e, s, smap, k=top_k, sentiment_threshold=sentiment_threshold)
        emo_scores.append(e)
        if s is not None:
            sen_scores.append(s)
        ye, ys = dataset.labels(rec)
        emo_labels.append(ye)
        sen_labels.append(ys)

    per_emo, mean_ap, excluded = _ap_table(
        np.stack(emo_scores), np.stack(emo_labels), p.emotions
    )
    if sen_scores:
        per_sen, _, excluded_sen = _ap_table(
            np.stack(sen_scores), np.stack(sen_labels), p.sentiments
        )
    else:
        per_sen, excluded_sen = None, []

    return EvalReport(
        per_emotion_ap=per_emo,
        mean_ap=mean_ap,
        excluded_emotions=excluded,
        per_sentiment_ap=per_sen,
        excluded_sentiments=excluded_sen,
        boost=boost,
        flags={
            "use_aesthetics": t.use_aesthetics,
            "use_attention": t.use_attention,
            "use_sentiment": t.use_sentiment,
        },
        sample_count=len(records),
        sizes=size_report(p),
        quantized_sizes=size_report(qm) if qm is not None else None,
    )
