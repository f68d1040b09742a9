"""Squared Euclidean distance and sliding minimum-distance search.

The scan keeps the running minimum as an abandon bound: a window stops
accumulating once its partial sum exceeds the best distance seen so far.
Partial sums only grow, so abandoning never changes the result.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .core import Normalization, TimeSeries, _as_finite_1d
from .exceptions import InvalidInput


@dataclass(frozen=True, eq=False)
class Subsequence:
    """Contiguous slice ``values`` of series ``source_id`` starting at ``offset``."""

    source_id: str
    offset: int
    values: np.ndarray

    @property
    def length(self) -> int:
        return self.values.shape[0]


class Match(NamedTuple):
    distance: float
    offset: int


def dist(x, y) -> float:
    """Sum of squared differences of two equal-length sequences."""
    x = _as_finite_1d(x, "x")
    y = _as_finite_1d(y, "y")
    if x.shape != y.shape:
        raise InvalidInput(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(_kernels.sqdist(x, y))


def _series_values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return _as_finite_1d(series, "series")


def _policy(policy) -> bool:
    return Normalization(policy) is Normalization.ZNORMALIZE


def min_subsequence_distance(shapelet_values, series,
                             policy=Normalization.ZNORMALIZE,
                             best_so_far: Optional[float] = None,
                             early_abandon: bool = True) -> Match:
    """Best-matching window of ``series`` for an already-normalized shapelet.

    Ties go to the smallest offset. With ``best_so_far`` the scan starts
    from that bound; if no window comes within it the result is
    ``Match(inf, -1)``.
    """
    shp = _as_finite_1d(shapelet_values, "shapelet")
    x = _series_values(series)
    length = shp.shape[0]
    if length > x.shape[0]:
        raise InvalidInput(f"shapelet length {length} exceeds series length {x.shape[0]}")
    normalize = _policy(policy)
    if normalize:
        means, stds = _kernels.window_stats(x, length)
    else:
        means = stds = np.empty(0)
    bound = np.inf if best_so_far is None else float(best_so_far)
    d, off = _kernels.min_dist(shp, x, means, stds, normalize, bound, early_abandon)
    return Match(float(d), int(off))


def length_normalized_min_distance(shapelet_values, series,
                                   policy=Normalization.ZNORMALIZE,
                                   best_so_far: Optional[float] = None) -> float:
    """``min_subsequence_distance`` divided by the shapelet length."""
    length = np.shape(shapelet_values)[0] if np.ndim(shapelet_values) else 0
    bound = None if best_so_far is None else best_so_far * length
    m = min_subsequence_distance(shapelet_values, series, policy, bound)
    return m.distance / length
