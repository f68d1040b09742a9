"""Shapelet discovery: exhaustive candidate search with per-class caps.

Every window of every training series is a candidate. A candidate is
scored by the information gain of its orderline; candidates under the
quality threshold are dropped, overlapping candidates from the same
series are thinned greedily, and the survivors are merged into a running
top set holding at most ``r // n_classes`` shapelets per class.
"""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .core import LabeledDataset, Normalization, TimeSeries, validate_dataset
from .distance import Subsequence, min_subsequence_distance
from .exceptions import ArtifactError, EmptyResult, InvalidInput
from .quality import ig_key, near_class, sorted_codes, split_sorted

logger = logging.getLogger(__name__)

SHAPELET_SET_FORMAT = "shapeletkit/shapelet-set"
SHAPELET_SET_VERSION = 1


@dataclass(frozen=True)
class DiscoveryConfig:
    """Search parameters. ``None`` for ``max_len``/``r`` means "derive from the data"."""

    min_len: int = 3
    max_len: Optional[int] = None
    r: Optional[int] = None
    quality_threshold: float = 0.05
    length_step: int = 1
    position_stride: int = 1
    normalization: Normalization = Normalization.ZNORMALIZE
    length_normalize: bool = True
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    def resolve(self, data: LabeledDataset) -> "DiscoveryConfig":
        """Fill in data-dependent defaults and check the invariants."""
        shortest = min(len(s) for s in data.series)
        n_classes = len(set(data.labels))
        cfg = replace(self,
                      max_len=shortest if self.max_len is None else int(self.max_len),
                      r=10 * len(data) if self.r is None else int(self.r))
        if cfg.min_len < 3:
            raise InvalidInput(f"min_len must be >= 3, got {cfg.min_len}")
        if not cfg.min_len <= cfg.max_len <= shortest:
            raise InvalidInput(
                f"need min_len <= max_len <= shortest series length "
                f"({cfg.min_len}, {cfg.max_len}, {shortest})")
        if cfg.length_step < 1 or cfg.position_stride < 1:
            raise InvalidInput("length_step and position_stride must be >= 1")
        if cfg.r < n_classes:
            raise InvalidInput(f"r={cfg.r} is smaller than the number of classes ({n_classes})")
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d["normalization"] = self.normalization.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiscoveryConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True, eq=False)
class Shapelet:
    values: np.ndarray
    source_id: str
    offset: int
    length: int
    ig: float
    split_threshold: float
    margin: float
    class_label: str

    @property
    def key(self) -> str:
        return f"{self.source_id}:{self.offset}:{self.length}"

    def sort_key(self):
        return (-ig_key(self.ig), -self.margin, self.length, self.source_id, self.offset)

    def overlaps(self, other: "Shapelet") -> bool:
        return (self.source_id == other.source_id
                and self.offset < other.offset + other.length
                and other.offset < self.offset + self.length)

    def to_dict(self) -> dict:
        return {"id": self.key, "source_id": self.source_id, "offset": self.offset,
                "length": self.length, "class_label": self.class_label, "ig": self.ig,
                "split_threshold": self.split_threshold, "margin": self.margin,
                "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Shapelet":
        values = np.asarray(d["values"], dtype=float)
        if values.shape != (int(d["length"]),):
            raise ArtifactError(f"shapelet {d.get('id')!r}: values do not match its length")
        values.setflags(write=False)
        return cls(values, str(d["source_id"]), int(d["offset"]), int(d["length"]),
                   float(d["ig"]), float(d["split_threshold"]), float(d["margin"]),
                   str(d["class_label"]))


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ShapeletSet:
    shapelets: tuple = ()
    normalization: Normalization = Normalization.ZNORMALIZE
    length_normalize: bool = True
    classes: tuple = ()
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.shapelets)

    def __iter__(self) -> Iterator[Shapelet]:
        return iter(self.shapelets)

    def __getitem__(self, i) -> Shapelet:
        return self.shapelets[i]

    @property
    def ids(self) -> list:
        return [s.key for s in self.shapelets]

    def per_class(self) -> dict:
        out = {c: 0 for c in self.classes}
        for s in self.shapelets:
            out[s.class_label] = out.get(s.class_label, 0) + 1
        return out

    def _payload(self) -> dict:
        return {"normalization": Normalization(self.normalization).value,
                "length_normalize": bool(self.length_normalize),
                "classes": list(self.classes),
                "shapelets": [s.to_dict() for s in self.shapelets]}

    def fingerprint(self) -> str:
        """Hash of everything the transform depends on."""
        return hashlib.sha256(_canonical(self._payload()).encode()).hexdigest()

    def to_dict(self) -> dict:
        d = {"format": SHAPELET_SET_FORMAT, "version": SHAPELET_SET_VERSION,
             "config": self.config}
        d.update(self._payload())
        d["fingerprint"] = self.fingerprint()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeletSet":
        if d.get("format") != SHAPELET_SET_FORMAT:
            raise ArtifactError("not a shapelet-set document")
        if d.get("version") != SHAPELET_SET_VERSION:
            raise ArtifactError(f"unsupported shapelet-set version {d.get('version')!r}")
        try:
            out = cls(tuple(Shapelet.from_dict(s) for s in d["shapelets"]),
                      Normalization(d["normalization"]), bool(d["length_normalize"]),
                      tuple(d["classes"]), dict(d.get("config", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactError(f"malformed shapelet-set document: {exc}") from None
        if "fingerprint" in d and d["fingerprint"] != out.fingerprint():
            raise ArtifactError("shapelet-set fingerprint does not match its contents")
        return out

    @classmethod
    def from_json(cls, text: str) -> "ShapeletSet":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ArtifactError(f"invalid JSON: {exc}") from None


def _lengths(cfg: DiscoveryConfig, m: int) -> range:
    return range(cfg.min_len, min(cfg.max_len, m) + 1, cfg.length_step)


def generate_candidates(ts: TimeSeries, cfg: DiscoveryConfig) -> Iterator[Subsequence]:
    """Every window of ``ts`` for each length in ``[min_len, max_len]``, raw values."""
    m = len(ts)
    max_len = m if cfg.max_len is None else cfg.max_len
    for length in range(cfg.min_len, min(max_len, m) + 1, cfg.length_step):
        for off in range(0, m - length + 1, cfg.position_stride):
            yield Subsequence(ts.id, off, ts.values[off:off + length])


class CandidateQuality(NamedTuple):
    ig: float
    split_threshold: float
    margin: float
    class_label: str


def _normalize(values: np.ndarray, normalization: Normalization) -> np.ndarray:
    if normalization is Normalization.ZNORMALIZE:
        return _kernels.znorm(np.ascontiguousarray(values, dtype=float))
    return np.array(values, dtype=float)


def evaluate_candidate(c: Subsequence, data: LabeledDataset,
                       cfg: DiscoveryConfig = DiscoveryConfig()) -> CandidateQuality:
    """Score one candidate against every series of ``data``."""
    length = c.length
    shp = _normalize(c.values, cfg.normalization)
    dists = np.empty(len(data))
    for k, s in enumerate(data.series):
        dists[k] = min_subsequence_distance(shp, s, cfg.normalization).distance
    if cfg.length_normalize:
        dists = dists / length
    classes = data.classes
    code = {lab: i for i, lab in enumerate(classes)}
    codes = np.array([code[lab] for lab in data.labels], dtype=np.intp)
    order = sorted_codes(dists, codes)
    split = split_sorted(dists[order], codes[order], len(classes))
    return CandidateQuality(split.information_gain, split.split_threshold, split.margin,
                            near_class(codes[order], split.n_near, classes))


def remove_self_similar(shapelets: Sequence[Shapelet]) -> list:
    """Greedy pass over quality-sorted shapelets, dropping overlaps with kept ones."""
    kept: dict = {}
    out = []
    for s in shapelets:
        same_source = kept.setdefault(s.source_id, [])
        if any(s.overlaps(k) for k in same_source):
            continue
        same_source.append(s)
        out.append(s)
    return out


def merge(p: int, current: Sequence[Shapelet], new: Sequence[Shapelet]) -> list:
    """Best ``p`` shapelets per class from the union, in global order."""
    taken: dict = {}
    out = []
    for s in sorted([*current, *new], key=Shapelet.sort_key):
        if taken.get(s.class_label, 0) < p:
            taken[s.class_label] = taken.get(s.class_label, 0) + 1
            out.append(s)
    return out


class _Packed:
    """Dataset flattened into one contiguous array for the compiled kernels."""

    def __init__(self, data: LabeledDataset):
        self.lengths = np.array([len(s) for s in data.series], dtype=np.int64)
        self.starts = np.concatenate([[0], np.cumsum(self.lengths)[:-1]]).astype(np.int64)
        self.flat = np.ascontiguousarray(np.concatenate([s.values for s in data.series]))
        self.classes = data.classes
        code = {lab: i for i, lab in enumerate(self.classes)}
        self.codes = np.array([code[lab] for lab in data.labels], dtype=np.intp)
        self.ids = data.ids

    def series(self, k: int) -> np.ndarray:
        return self.flat[self.starts[k]:self.starts[k] + self.lengths[k]]

    def window_stats(self, length: int):
        nws = self.lengths - length + 1
        mstarts = np.concatenate([[0], np.cumsum(nws)[:-1]]).astype(np.int64)
        means = np.empty(int(nws.sum()))
        stds = np.empty(int(nws.sum()))
        for k in range(len(self.lengths)):
            mu, sd = _kernels.window_stats(self.series(k), length)
            means[mstarts[k]:mstarts[k] + nws[k]] = mu
            stds[mstarts[k]:mstarts[k] + nws[k]] = sd
        return means, stds, mstarts


def _score_series(packed: _Packed, src: int, length: int, stats, cfg: DiscoveryConfig,
                  abandon: bool) -> tuple:
    """All candidates of one length from one series; returns (kept, n_scored, best_ig)."""
    m = int(packed.lengths[src])
    offsets = np.arange(0, m - length + 1, cfg.position_stride, dtype=np.int64)
    normalize = cfg.normalization is Normalization.ZNORMALIZE
    means, stds, mstarts = stats
    rows = _kernels.candidate_orderlines(src, length, offsets, packed.flat, packed.starts,
                                         packed.lengths, means, stds, mstarts,
                                         normalize, abandon)
    if cfg.length_normalize:
        rows = rows / length
    xs = packed.series(src)
    kept = []
    best_ig = 0.0
    n_classes = len(packed.classes)
    for off, dists in zip(offsets.tolist(), rows):
        order = sorted_codes(dists, packed.codes)
        codes = packed.codes[order]
        split = split_sorted(dists[order], codes, n_classes)
        best_ig = max(best_ig, split.information_gain)
        if split.information_gain < cfg.quality_threshold:
            continue
        values = _normalize(xs[off:off + length], cfg.normalization)
        values.setflags(write=False)
        kept.append(Shapelet(values, packed.ids[src], off, length, split.information_gain,
                             split.split_threshold, split.margin,
                             near_class(codes, split.n_near, packed.classes)))
    return kept, len(offsets), best_ig


def discover(data: LabeledDataset, cfg: DiscoveryConfig = DiscoveryConfig(),
             n_jobs: int = 1, early_abandon: bool = True) -> ShapeletSet:
    """Find the top shapelets of ``data``.

    The result does not depend on ``n_jobs``: per-series results are merged
    in a fixed total order (IG desc, margin desc, length, source id, offset).
    """
    validate_dataset(data, cfg.min_len)
    cfg = cfg.resolve(data)
    packed = _Packed(data)
    n = len(data)
    p = cfg.r // len(packed.classes)
    per_series: list = [[] for _ in range(n)]
    n_scored = 0
    best_ig = 0.0
    workers = max(1, int(n_jobs or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for length in range(cfg.min_len, cfg.max_len + 1, cfg.length_step):
            stats = packed.window_stats(length)
            results = pool.map(lambda src: _score_series(packed, src, length, stats, cfg,
                                                         early_abandon), range(n))
            for src, (kept, scored, top) in enumerate(results):
                per_series[src].extend(kept)
                n_scored += scored
                best_ig = max(best_ig, top)
    running: list = []
    for src in range(n):
        ranked = sorted(per_series[src], key=Shapelet.sort_key)
        running = merge(p, running, remove_self_similar(ranked))
    logger.info("scored %d candidates, kept %d shapelets", n_scored, len(running))
    if not running:
        raise EmptyResult(
            f"no candidate reached information gain {cfg.quality_threshold}",
            {"candidates_scored": n_scored, "best_information_gain": best_ig})
    return ShapeletSet(tuple(running), cfg.normalization, cfg.length_normalize,
                       tuple(packed.classes), cfg.to_dict())
