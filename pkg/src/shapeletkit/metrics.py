"""Classification metrics and probability-band summaries."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def precision_recall(tp: int, fp: int, fn: int) -> tuple:
    """(precision, recall); None where the denominator is zero."""
    return _ratio(tp, tp + fp), _ratio(tp, tp + fn)


def evaluate(y_true: Sequence, y_pred: Sequence, labels: Optional[Sequence] = None) -> dict:
    """Accuracy, per-class precision/recall and the confusion matrix.

    ``confusion[i][j]`` counts rows of true class ``labels[i]`` predicted as
    ``labels[j]``. Precision of a class that was never predicted is None.
    """
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise ValueError(f"{len(y_true)} true labels but {len(y_pred)} predictions")
    if labels is None:
        labels = sorted(set(y_true) | set(y_pred), key=str)
    labels = list(labels)
    index = {c: i for i, c in enumerate(labels)}
    cm = np.zeros((len(labels), len(labels)), dtype=int)
    for t, p in zip(y_true, y_pred):
        cm[index[t], index[p]] += 1
    total = int(cm.sum())
    per_class = {}
    for i, c in enumerate(labels):
        tp = int(cm[i, i])
        precision, recall = precision_recall(tp, int(cm[:, i].sum()) - tp, int(cm[i, :].sum()) - tp)
        per_class[c] = {"precision": precision, "recall": recall, "support": int(cm[i, :].sum())}
    return {"accuracy": _ratio(int(np.trace(cm)), total), "n": total, "labels": labels,
            "per_class": per_class, "confusion": cm.tolist()}


DEFAULT_BANDS = (0.0, 0.5, 0.6, 0.7, 0.8, 0.9, 0.96, 1.0)


def probability_bands(probabilities: Sequence[float], edges: Sequence[float] = DEFAULT_BANDS) -> list:
    """Counts of probabilities per half-open band ``[lo, hi)``; the last band includes 1."""
    p = np.asarray(probabilities, dtype=float)
    out = []
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        last = i == len(edges) - 2
        mask = (p >= lo) & ((p <= hi) if last else (p < hi))
        out.append({"low": float(lo), "high": float(hi), "count": int(mask.sum())})
    return out
