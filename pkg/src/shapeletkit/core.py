"""Time-series and dataset types, z-normalization and dataset validation."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import _kernels
from .exceptions import DatasetValidationError, InvalidInput

EPS_STD = _kernels.EPS_STD


class Normalization(str, enum.Enum):
    ZNORMALIZE = "znormalize"
    NONE = "none"


def _as_finite_1d(values, what="values") -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{what} must be real numbers: {exc}") from None
    if arr.ndim != 1:
        raise InvalidInput(f"{what} must be one-dimensional")
    if arr.size == 0:
        raise InvalidInput(f"{what} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{what} contains NaN or Inf")
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ordered run of finite samples, optionally with its sampling rate."""

    values: np.ndarray
    sample_rate_hz: Optional[float] = None
    id: str = ""

    def __post_init__(self):
        arr = _as_finite_1d(self.values, f"series {self.id!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.sample_rate_hz is not None:
            rate = float(self.sample_rate_hz)
            if not rate > 0 or not np.isfinite(rate):
                raise InvalidInput(f"sample rate must be positive, got {self.sample_rate_hz!r}")
            object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self.id == other.id and self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.id, len(self)))

    def with_values(self, values, sample_rate_hz=None, id=None) -> "TimeSeries":
        return TimeSeries(values,
                          self.sample_rate_hz if sample_rate_hz is None else sample_rate_hz,
                          self.id if id is None else id)


@dataclass(frozen=True)
class LabeledDataset:
    """Series paired with class labels; labels are plain strings."""

    series: tuple = field(default_factory=tuple)
    labels: tuple = field(default_factory=tuple)

    def __post_init__(self):
        series = tuple(self.series)
        labels = tuple(str(lab) for lab in self.labels)
        if len(series) != len(labels):
            raise InvalidInput(f"{len(series)} series but {len(labels)} labels")
        for s in series:
            if not isinstance(s, TimeSeries):
                raise InvalidInput("dataset entries must be TimeSeries")
        for lab in labels:
            if not lab:
                raise InvalidInput("class labels must be non-empty strings")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_arrays(cls, X, y, ids: Optional[Sequence[str]] = None,
                    sample_rate_hz: Optional[float] = None) -> "LabeledDataset":
        X = list(X)
        if ids is None:
            ids = [str(i) for i in range(len(X))]
        series = [TimeSeries(x, sample_rate_hz, str(i)) for x, i in zip(X, ids)]
        return cls(tuple(series), tuple(str(v) for v in y))

    def __len__(self) -> int:
        return len(self.series)

    def __iter__(self) -> Iterator[tuple]:
        return iter(zip(self.series, self.labels))

    @property
    def classes(self) -> list:
        return sorted(set(self.labels))

    @property
    def class_counts(self) -> Counter:
        return Counter(self.labels)

    @property
    def ids(self) -> list:
        return [s.id for s in self.series]

    def subset(self, indices: Iterable[int]) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(tuple(self.series[i] for i in idx),
                              tuple(self.labels[i] for i in idx))


def znormalize(x) -> np.ndarray:
    """Shift to mean 0 and scale to unit population std.

    Flat inputs (std <= 1e-8) map to all zeros.

    >>> znormalize([1.0, 2.0, 3.0]).round(6).tolist()
    [-1.224745, 0.0, 1.224745]
    """
    arr = _as_finite_1d(x, "input")
    return _kernels.znorm(np.ascontiguousarray(arr))


def dataset_problems(data: LabeledDataset, min_len: int) -> list:
    problems = []
    if len(data) == 0:
        problems.append("empty dataset")
    elif len(set(data.labels)) < 2:
        problems.append("single-class dataset")
    seen = set()
    for s in data.series:
        if s.id in seen:
            problems.append(f"duplicate series id {s.id!r}")
        seen.add(s.id)
        if len(s) < min_len:
            problems.append(f"series {s.id!r} has length {len(s)} < {min_len}")
    return problems


def validate_dataset(data: LabeledDataset, min_len: int = 3) -> None:
    """Raise DatasetValidationError listing every offending series."""
    problems = dataset_problems(data, min_len)
    if problems:
        raise DatasetValidationError(problems)
