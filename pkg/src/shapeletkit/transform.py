"""Map series into shapelet-distance feature space."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from .core import LabeledDataset, Normalization, TimeSeries
from .discovery import DiscoveryConfig, ShapeletSet, discover
from .exceptions import ArtifactError, InvalidInput
from .validation import as_dataset, check_series_collection, series_ids

CSV_DIGITS = 9


@dataclass(frozen=True, eq=False)
class TransformMatrix:
    """n x k minimum distances; column j belongs to ``shapelet_ids[j]``."""

    values: np.ndarray
    shapelet_ids: tuple
    labels: Optional[tuple] = None
    row_ids: tuple = ()

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = list(self.shapelet_ids)
        if self.labels is not None:
            header.append("label")
        w.writerow(header)
        for i, row in enumerate(self.values):
            cells = [format(float(v), f".{CSV_DIGITS}g") for v in row]
            if self.labels is not None:
                cells.append(self.labels[i])
            w.writerow(cells)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TransformMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ArtifactError("transform CSV has no header row")
        header = rows[0]
        has_labels = bool(header) and header[-1] == "label"
        ids = tuple(header[:-1] if has_labels else header)
        k = len(ids)
        values = np.empty((len(rows) - 1, k))
        labels = []
        for i, row in enumerate(rows[1:]):
            if len(row) != k + has_labels:
                raise ArtifactError(f"line {i + 2}: expected {k + has_labels} fields, got {len(row)}")
            try:
                values[i] = [float(v) for v in row[:k]]
            except ValueError as exc:
                raise ArtifactError(f"line {i + 2}: {exc}") from None
            if has_labels:
                labels.append(row[-1])
        return cls(values, ids, tuple(labels) if has_labels else None,
                   tuple(str(i) for i in range(values.shape[0])))


def _transform_row(x: np.ndarray, row_id: str, shapelets: ShapeletSet) -> np.ndarray:
    normalize = Normalization(shapelets.normalization) is Normalization.ZNORMALIZE
    out = np.empty(len(shapelets))
    stats: dict = {}
    empty = np.empty(0)
    for j, s in enumerate(shapelets):
        if s.length > x.shape[0]:
            raise InvalidInput(f"series {row_id!r} (length {x.shape[0]}) is shorter than "
                               f"shapelet {s.key!r} (length {s.length})")
        if normalize and s.length not in stats:
            stats[s.length] = _kernels.window_stats(x, s.length)
        means, stds = stats[s.length] if normalize else (empty, empty)
        d, _ = _kernels.min_dist(s.values, x, means, stds, normalize, np.inf, True)
        out[j] = d / s.length if shapelets.length_normalize else d
    return out


def shapelet_transform(data, shapelets: ShapeletSet, n_jobs: int = 1) -> TransformMatrix:
    """Minimum distance from every series to every shapelet.

    Normalization and length normalization are taken from ``shapelets``
    so a transform always matches the discovery run that produced them.
    Labels of a LabeledDataset are carried through.
    """
    labels = tuple(data.labels) if isinstance(data, LabeledDataset) else None
    rows = check_series_collection(data)
    ids = series_ids(data, len(rows))
    with ThreadPoolExecutor(max_workers=max(1, int(n_jobs or 1))) as pool:
        out = list(pool.map(lambda i: _transform_row(rows[i], ids[i], shapelets), range(len(rows))))
    values = np.vstack(out) if out else np.empty((0, len(shapelets)))
    return TransformMatrix(values.reshape(len(rows), len(shapelets)), tuple(shapelets.ids),
                           labels, tuple(ids))


class ShapeletTransform(TransformerMixin, BaseEstimator):
    """Discover shapelets on (X, y) and map series to shapelet distances.

    Parameters
    ----------
    min_len, max_len : int
        Candidate length range. ``max_len=None`` uses the shortest series.
    n_shapelets : int, optional
        Cap on the number of shapelets kept (``r``); defaults to 10 x n_series.
        At most ``n_shapelets // n_classes`` are kept per class.
    quality_threshold : float
        Minimum information gain for a shapelet to be kept.
    length_step, position_stride : int
        Step between candidate lengths and start positions; 1 is exhaustive.
    normalization : {"znormalize", "none"}
    length_normalize : bool
        Divide distances by the shapelet length.
    n_jobs : int, optional
        Worker threads; results do not depend on it.

    Attributes
    ----------
    shapelets_ : ShapeletSet
    classes_ : ndarray
    """

    def __init__(self, min_len=3, max_len=None, n_shapelets=None, quality_threshold=0.05,
                 length_step=1, position_stride=1, normalization="znormalize",
                 length_normalize=True, n_jobs=None):
        self.min_len = min_len
        self.max_len = max_len
        self.n_shapelets = n_shapelets
        self.quality_threshold = quality_threshold
        self.length_step = length_step
        self.position_stride = position_stride
        self.normalization = normalization
        self.length_normalize = length_normalize
        self.n_jobs = n_jobs

    def _config(self) -> DiscoveryConfig:
        return DiscoveryConfig(min_len=self.min_len, max_len=self.max_len, r=self.n_shapelets,
                               quality_threshold=self.quality_threshold,
                               length_step=self.length_step,
                               position_stride=self.position_stride,
                               normalization=self.normalization,
                               length_normalize=self.length_normalize)

    def fit(self, X, y, ids: Optional[Sequence[str]] = None):
        data = as_dataset(X, y, ids)
        self.shapelets_ = discover(data, self._config(), n_jobs=self.n_jobs or 1)
        self.classes_ = np.array(data.classes)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "shapelets_")
        return shapelet_transform(X, self.shapelets_, n_jobs=self.n_jobs or 1).values

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "shapelets_")
        return np.array(self.shapelets_.ids, dtype=object)
