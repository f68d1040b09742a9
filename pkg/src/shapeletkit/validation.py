"""Input checks shared by the estimators.

Series collections may be ragged, so sklearn's ``check_array`` only
applies to the fixed-width feature matrices.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .core import LabeledDataset, TimeSeries
from .exceptions import InvalidInput


def check_series_collection(X) -> list:
    """Return ``X`` as a list of finite 1-d float arrays.

    Accepts a 2-d array (one series per row), a sequence of 1-d arrays,
    a sequence of TimeSeries or a LabeledDataset.
    """
    if isinstance(X, LabeledDataset):
        return [s.values for s in X.series]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        rows = list(X.astype(float, copy=False))
    elif isinstance(X, np.ndarray) and X.ndim == 1 and X.dtype != object:
        raise InvalidInput("expected a collection of series, got a single 1-d array; "
                           "reshape with X[None, :] for one series")
    else:
        try:
            rows = list(X)
        except TypeError:
            raise InvalidInput(f"expected a collection of series, got {type(X).__name__}") from None
    out = []
    for i, row in enumerate(rows):
        arr = row.values if isinstance(row, TimeSeries) else np.asarray(row, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInput(f"series {i} must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput(f"series {i} contains NaN or Inf")
        out.append(np.ascontiguousarray(arr, dtype=float))
    return out


def check_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise InvalidInput("y must be one-dimensional")
    if y.shape[0] != n:
        raise InvalidInput(f"{n} series but {y.shape[0]} labels")
    return y


def series_ids(X, n: int, ids: Optional[Sequence[str]] = None) -> list:
    if ids is not None:
        ids = [str(i) for i in ids]
        if len(ids) != n:
            raise InvalidInput(f"{n} series but {len(ids)} ids")
        return ids
    if isinstance(X, LabeledDataset):
        return X.ids
    if not isinstance(X, np.ndarray) and all(isinstance(s, TimeSeries) for s in X):
        return [s.id for s in X]
    return [str(i) for i in range(n)]


def as_dataset(X, y, ids: Optional[Sequence[str]] = None) -> LabeledDataset:
    rows = check_series_collection(X)
    y = check_labels(y, len(rows))
    return LabeledDataset(tuple(TimeSeries(r, None, i) for r, i in zip(rows, series_ids(X, len(rows), ids))),
                          tuple(str(v) for v in y))
