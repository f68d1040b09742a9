"""Orderlines, entropy, information gain and the best split of an orderline."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import InvalidInput

# IG values closer than this are treated as tied when ranking.
IG_DECIMALS = 12


def ig_key(ig: float) -> float:
    return round(float(ig), IG_DECIMALS)


@dataclass(frozen=True)
class Orderline:
    """(distance, label) pairs sorted by distance, then label, then input index."""

    distances: np.ndarray
    labels: tuple

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.distances.tolist(), self.labels))


def build_orderline(distances: Sequence[float], labels: Sequence[str]) -> Orderline:
    d = np.asarray(distances, dtype=float)
    labels = [str(lab) for lab in labels]
    if d.ndim != 1 or d.shape[0] != len(labels):
        raise InvalidInput("distances and labels must have the same length")
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise InvalidInput("orderline distances must be finite and nonnegative")
    order = sorted(range(len(labels)), key=lambda i: (d[i], labels[i], i))
    out = d[order]
    out.setflags(write=False)
    return Orderline(out, tuple(labels[i] for i in order))


@dataclass(frozen=True)
class SplitAssessment:
    information_gain: float
    split_threshold: float
    margin: float
    # entries of the orderline on the near side (distance <= threshold)
    n_near: int


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _counts_vector(counts: Mapping[str, int], classes) -> np.ndarray:
    return np.array([int(counts.get(c, 0)) for c in classes], dtype=float)


def entropy(class_counts: Mapping[str, int]) -> float:
    """Base-2 Shannon entropy of a class-count table."""
    if any(int(v) < 0 for v in class_counts.values()):
        raise InvalidInput("class counts must be nonnegative")
    if sum(int(v) for v in class_counts.values()) < 1:
        raise InvalidInput("entropy of an empty set is undefined")
    classes = sorted(class_counts)
    return float(_entropy_rows(_counts_vector(class_counts, classes)[None, :])[0])


def _gain_rows(total: np.ndarray, left: np.ndarray) -> np.ndarray:
    n = total.sum()
    n_left = left.sum(axis=1)
    right = total[None, :] - left
    h_total = _entropy_rows(total[None, :])[0]
    h_left = np.where(n_left > 0, _entropy_rows(np.where(n_left[:, None] > 0, left, 1.0)), 0.0)
    n_right = n - n_left
    h_right = np.where(n_right > 0, _entropy_rows(np.where(n_right[:, None] > 0, right, 1.0)), 0.0)
    return h_total - (n_left / n * h_left + n_right / n * h_right)


def information_gain(total: Mapping[str, int], left: Mapping[str, int]) -> float:
    """Entropy of ``total`` minus the size-weighted entropies of ``left`` and its complement."""
    classes = sorted(set(total) | set(left))
    t = _counts_vector(total, classes)
    lft = _counts_vector(left, classes)
    if np.any(lft < 0) or np.any(lft > t):
        raise InvalidInput("left counts must lie within total counts")
    if t.sum() < 1:
        raise InvalidInput("total must contain at least one item")
    return float(_gain_rows(t, lft[None, :])[0])


def sorted_codes(distances: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Orderline permutation: by distance, then label code, then input index."""
    return np.lexsort((np.arange(distances.shape[0]), codes, distances))


def split_sorted(d: np.ndarray, codes: np.ndarray, n_classes: int) -> SplitAssessment:
    """``best_split`` on an already-sorted orderline given as label codes."""
    n = d.shape[0]
    if n == 0:
        raise InvalidInput("empty orderline")
    degenerate = SplitAssessment(0.0, float(d[-1]), 0.0, n)
    if n < 2 or np.unique(codes).shape[0] < 2:
        return degenerate
    gaps = np.nonzero(d[:-1] < d[1:])[0]
    if gaps.size == 0:
        return degenerate
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes] = 1.0
    cum = np.cumsum(onehot, axis=0)
    gains = _gain_rows(cum[-1], cum[gaps])
    lo = d[gaps]
    hi = d[gaps + 1]
    margins = hi - lo
    thresholds = lo + margins / 2.0
    thresholds = np.where(thresholds < hi, thresholds, lo)
    keys = np.round(gains, IG_DECIMALS)
    best = np.lexsort((thresholds, -margins, -keys))[0]
    return SplitAssessment(float(max(gains[best], 0.0)), float(thresholds[best]),
                           float(margins[best]), int(gaps[best] + 1))


def near_class(codes: np.ndarray, n_near: int, classes: Sequence[str]) -> str:
    """Majority label on the near side; ties go to the smallest label."""
    counts = np.bincount(codes[:n_near], minlength=len(classes))
    return classes[int(np.argmax(counts))]


def best_split(ol: Orderline) -> SplitAssessment:
    """Highest-IG threshold over all gaps between distinct distances.

    Ties on IG go to the larger margin, then the smaller threshold.
    A single-class or constant orderline yields IG 0 with zero margin.
    """
    if len(ol) == 0:
        raise InvalidInput("empty orderline")
    classes = sorted(set(ol.labels))
    code = {c: i for i, c in enumerate(classes)}
    codes = np.array([code[lab] for lab in ol.labels], dtype=np.intp)
    return split_sorted(ol.distances, codes, len(classes))
