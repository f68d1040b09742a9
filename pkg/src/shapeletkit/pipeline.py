"""Shapelet transform followed by a random forest, as one estimator."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .forest import ForestClassifier
from .transform import ShapeletTransform
from .validation import as_dataset


class ShapeletTransformClassifier(ClassifierMixin, BaseEstimator):
    """Discover shapelets, transform, then classify with a 500-tree forest.

    Discovery parameters are those of :class:`ShapeletTransform`; the forest
    parameters those of :class:`ForestClassifier`. ``predict_proba`` returns
    the mean of the trees' leaf class proportions.
    """

    def __init__(self, min_len=3, max_len=None, n_shapelets=None, quality_threshold=0.05,
                 length_step=1, position_stride=1, normalization="znormalize",
                 length_normalize=True, n_estimators=500, max_features="sqrt",
                 max_depth=None, min_samples_leaf=1, bootstrap=True, random_state=0,
                 n_jobs=None):
        self.min_len = min_len
        self.max_len = max_len
        self.n_shapelets = n_shapelets
        self.quality_threshold = quality_threshold
        self.length_step = length_step
        self.position_stride = position_stride
        self.normalization = normalization
        self.length_normalize = length_normalize
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y, ids=None):
        data = as_dataset(X, y, ids)
        self.transformer_ = ShapeletTransform(
            min_len=self.min_len, max_len=self.max_len, n_shapelets=self.n_shapelets,
            quality_threshold=self.quality_threshold, length_step=self.length_step,
            position_stride=self.position_stride, normalization=self.normalization,
            length_normalize=self.length_normalize, n_jobs=self.n_jobs,
        ).fit(data, data.labels)
        features = self.transformer_.transform(data)
        y = np.asarray(y)
        self.forest_ = ForestClassifier(
            n_estimators=self.n_estimators, max_features=self.max_features,
            max_depth=self.max_depth, min_samples_leaf=self.min_samples_leaf,
            bootstrap=self.bootstrap, random_state=self.random_state, n_jobs=self.n_jobs,
        ).fit(features, y)
        self.classes_ = self.forest_.classes_
        return self

    @property
    def shapelets_(self):
        check_is_fitted(self, "transformer_")
        return self.transformer_.shapelets_

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "forest_")
        return self.forest_.predict_proba(self.transformer_.transform(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
