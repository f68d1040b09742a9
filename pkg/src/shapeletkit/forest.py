"""Random forest over shapelet-distance features.

Trees split on single columns by Gini impurity and store the (bootstrap)
class counts at every leaf. A forest's class probabilities are the
unweighted mean of the per-tree leaf proportions.

Each tree draws from its own generator seeded with ``(random_state, tree_index)``,
so a fitted forest does not depend on how trees are scheduled over threads.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ArtifactError, InvalidInput

FOREST_FORMAT = "shapeletkit/forest"
FOREST_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 500
    features_per_split: Optional[int] = None
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    bootstrap: bool = True
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ForestConfig":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class Prediction:
    label: object
    probabilities: dict

    def format(self) -> str:
        """``A (prob(A) = 87%, prob(B) = 13%)``"""
        parts = ", ".join(f"prob({c}) = {100 * p:.0f}%" for c, p in self.probabilities.items())
        return f"{self.label} ({parts})"


class DecisionTree:
    """Flat array form of a fitted tree; ``feature[i] == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, counts):
        self.feature = np.asarray(feature, dtype=np.intp)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.counts = np.asarray(counts, dtype=float)

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            inner = self.feature[node] >= 0
            if not inner.any():
                return node
            f = np.where(inner, self.feature[node], 0)
            go_left = X[rows, f] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        c = self.counts[self.apply(X)]
        return c / c.sum(axis=1, keepdims=True)

    def to_dict(self, node: int = 0) -> dict:
        if self.feature[node] < 0:
            return {"counts": [int(v) for v in self.counts[node]]}
        return {"feature": int(self.feature[node]), "threshold": float(self.threshold[node]),
                "left": self.to_dict(int(self.left[node])),
                "right": self.to_dict(int(self.right[node]))}

    @classmethod
    def from_dict(cls, d: dict, n_classes: int) -> "DecisionTree":
        feature, threshold, left, right, counts = [], [], [], [], []

        def add(rec):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append([0.0] * n_classes)
            if "counts" in rec:
                if len(rec["counts"]) != n_classes:
                    raise ArtifactError("leaf counts do not match the class list")
                counts[i] = [float(v) for v in rec["counts"]]
                if sum(counts[i]) <= 0:
                    raise ArtifactError("empty leaf")
            else:
                feature[i] = int(rec["feature"])
                threshold[i] = float(rec["threshold"])
                left[i] = add(rec["left"])
                right[i] = add(rec["right"])
            return i

        try:
            add(d)
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactError(f"malformed tree record: {exc}") from None
        return cls(feature, threshold, left, right, counts)


def _gini(counts: np.ndarray, n: np.ndarray) -> np.ndarray:
    p = counts / n[..., None]
    return 1.0 - (p * p).sum(axis=-1)


def _best_column_split(x, y, n_classes, min_leaf):
    """(impurity decrease, threshold) of the best cut of one column, or None."""
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y[order]] = 1.0
    cum = np.cumsum(onehot, axis=0)
    pos = np.arange(min_leaf - 1, n - min_leaf)
    pos = pos[xs[pos] < xs[pos + 1]]
    if pos.size == 0:
        return None
    total = cum[-1]
    n_left = (pos + 1).astype(float)
    n_right = n - n_left
    child = (n_left * _gini(cum[pos], n_left) + n_right * _gini(total - cum[pos], n_right)) / n
    best = int(np.argmin(child))
    parent = float(_gini(total, np.array(float(n))))
    lo, hi = xs[pos[best]], xs[pos[best] + 1]
    t = lo + (hi - lo) / 2.0
    return parent - float(child[best]), float(t if t < hi else lo)


def grow_tree(X, y, n_classes, rng, max_features, max_depth=None, min_samples_leaf=1,
              bootstrap=True):
    """Fit one tree; returns (tree, in-bag mask)."""
    n, k = X.shape
    samples = rng.integers(0, n, n) if bootstrap else np.arange(n)
    inbag = np.zeros(n, dtype=bool)
    inbag[samples] = True
    feature, threshold, left, right, counts = [], [], [], [], []
    stack = [(samples, 0, -1, False)]
    while stack:
        idx, depth, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        c = np.bincount(y[idx], minlength=n_classes).astype(float)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(c)
        if (np.count_nonzero(c) < 2 or idx.shape[0] < 2 * min_samples_leaf
                or (max_depth is not None and depth >= max_depth)):
            continue
        best = None
        for tried, f in enumerate(rng.permutation(k)):
            if tried >= max_features and best is not None:
                break
            found = _best_column_split(X[idx, f], y[idx], n_classes, min_samples_leaf)
            if found is not None and (best is None or found[0] > best[0]):
                best = (found[0], found[1], int(f))
        if best is None:
            continue
        _, t, f = best
        feature[node] = f
        threshold[node] = t
        go_left = X[idx, f] <= t
        stack.append((idx[~go_left], depth + 1, node, False))
        stack.append((idx[go_left], depth + 1, node, True))
    return DecisionTree(feature, threshold, left, right, counts), inbag


class ForestClassifier(ClassifierMixin, BaseEstimator):
    """Bagged Gini trees with mean-probability voting.

    Parameters
    ----------
    n_estimators : int, default 500
    max_features : "sqrt", int, float or None
        Columns examined per split; "sqrt" means ceil(sqrt(n_features)).
        If none of them admits a split, the remaining columns are tried.
    max_depth : int, optional
    min_samples_leaf : int, default 1
    bootstrap : bool, default True
    oob_score : bool, default False
    random_state : int or None, default 0
        None draws a fresh seed, recorded in ``seed_``.
    n_jobs : int, optional
        Threads used to grow trees; the fitted model does not depend on it.
    """

    def __init__(self, n_estimators=500, max_features="sqrt", max_depth=None,
                 min_samples_leaf=1, bootstrap=True, oob_score=False, random_state=0,
                 n_jobs=None):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.oob_score = oob_score
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _resolve_max_features(self, k: int) -> int:
        mf = self.max_features
        if mf is None:
            m = k
        elif mf == "sqrt":
            m = math.ceil(math.sqrt(k))
        elif isinstance(mf, (int, np.integer)) and not isinstance(mf, bool):
            m = int(mf)
        elif isinstance(mf, float):
            m = math.ceil(mf * k)
        else:
            raise InvalidInput(f"invalid max_features {mf!r}")
        if not 1 <= m <= k:
            raise InvalidInput(f"max_features resolves to {m}, outside [1, {k}]")
        return m

    def fit(self, X, y):
        X = check_array(X, dtype=float, ensure_min_samples=1)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise InvalidInput(f"{X.shape[0]} rows but {y.shape[0] if y.ndim else 0} labels")
        if X.shape[0] < 2:
            raise InvalidInput("need at least 2 rows to train")
        self.classes_, codes = np.unique(y, return_inverse=True)
        if self.classes_.shape[0] < 2:
            raise InvalidInput("need at least 2 classes to train")
        if self.n_estimators < 1:
            raise InvalidInput("n_estimators must be >= 1")
        if self.min_samples_leaf < 1:
            raise InvalidInput("min_samples_leaf must be >= 1")
        self.n_features_in_ = X.shape[1]
        m = self._resolve_max_features(self.n_features_in_)
        seed = (np.random.SeedSequence().entropy if self.random_state is None
                else int(self.random_state))
        self.seed_ = seed
        n_classes = self.classes_.shape[0]

        def one(t):
            rng = np.random.default_rng([seed, t])
            return grow_tree(X, codes, n_classes, rng, m, self.max_depth,
                             self.min_samples_leaf, self.bootstrap)

        with ThreadPoolExecutor(max_workers=max(1, int(self.n_jobs or 1))) as pool:
            grown = list(pool.map(one, range(self.n_estimators)))
        self.trees_ = [t for t, _ in grown]
        if self.oob_score:
            votes = np.zeros((X.shape[0], n_classes))
            seen = np.zeros(X.shape[0], dtype=bool)
            for tree, inbag in grown:
                out = ~inbag
                if out.any():
                    votes[out] += tree.predict_proba(X[out])
                    seen |= out
            decision = np.full(votes.shape, np.nan)
            decision[seen] = votes[seen] / votes[seen].sum(axis=1, keepdims=True)
            self.oob_decision_function_ = decision
            self.oob_score_ = float(np.mean(np.argmax(votes[seen], axis=1) == codes[seen]))
        return self

    def _check_X(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        X = check_array(X, dtype=float, ensure_min_samples=0)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInput(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_X(X)
        proba = np.zeros((X.shape[0], self.classes_.shape[0]))
        for tree in self.trees_:
            proba += tree.predict_proba(X)
        return proba / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def predict_one(self, row) -> Prediction:
        row = np.asarray(row, dtype=float)
        if row.ndim != 1:
            raise InvalidInput("row must be one-dimensional")
        p = self.predict_proba(row[None, :])[0]
        return Prediction(self.classes_[int(np.argmax(p))].item(),
                          {c.item(): float(v) for c, v in zip(self.classes_, p)})

    def to_dict(self, metadata: Optional[dict] = None) -> dict:
        check_is_fitted(self, "trees_")
        params = self.get_params()
        params.pop("n_jobs")
        return {"format": FOREST_FORMAT, "version": FOREST_VERSION, "params": params,
                "classes": self.classes_.tolist(), "n_features": int(self.n_features_in_),
                "metadata": dict(metadata or {}),
                "trees": [t.to_dict() for t in self.trees_]}

    def to_json(self, metadata: Optional[dict] = None) -> str:
        return json.dumps(self.to_dict(metadata), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ForestClassifier":
        if d.get("format") != FOREST_FORMAT:
            raise ArtifactError("not a forest model document")
        if d.get("version") != FOREST_VERSION:
            raise ArtifactError(f"unsupported forest model version {d.get('version')!r}")
        try:
            model = cls(**d["params"])
            model.classes_ = np.array(d["classes"])
            model.n_features_in_ = int(d["n_features"])
            model.trees_ = [DecisionTree.from_dict(t, len(d["classes"])) for t in d["trees"]]
        except (KeyError, TypeError) as exc:
            raise ArtifactError(f"malformed forest model document: {exc}") from None
        model.metadata_ = dict(d.get("metadata", {}))
        return model

    @classmethod
    def from_json(cls, text: str) -> "ForestClassifier":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ArtifactError(f"invalid JSON: {exc}") from None


def train(features, cfg: ForestConfig = ForestConfig(), n_jobs: int = 1) -> ForestClassifier:
    """Fit a forest on a labelled TransformMatrix."""
    if features.labels is None:
        raise InvalidInput("training features carry no labels")
    k = features.values.shape[1]
    if k == 0:
        raise InvalidInput("no feature columns to train on")
    model = ForestClassifier(n_estimators=cfg.n_trees,
                             max_features="sqrt" if cfg.features_per_split is None
                             else cfg.features_per_split,
                             max_depth=cfg.max_depth, min_samples_leaf=cfg.min_samples_leaf,
                             bootstrap=cfg.bootstrap, random_state=cfg.seed, n_jobs=n_jobs)
    return model.fit(features.values, np.asarray(features.labels))


def predict(model: ForestClassifier, row) -> Prediction:
    return model.predict_one(row)
