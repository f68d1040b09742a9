"""Run configuration file (YAML, schema version 1).

Example::

    version: 1
    seed: 7
    preprocess:
      sample_rate_hz: 100
      steps:
        - {op: bandpass, low_hz: 4, high_hz: 10}
        - {op: decimate, factor: 5}
        - {op: segment, window_seconds: 300, partial: drop}
    discovery: {min_len: 3, max_len: 40, quality_threshold: 0.05}
    forest: {n_trees: 500}

``seed`` overrides the seeds inside ``discovery`` and ``forest``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from .discovery import DiscoveryConfig
from .exceptions import InputFormatError
from .forest import ForestConfig

CONFIG_VERSION = 1
STEP_OPS = {
    "bandpass": {"low_hz", "high_hz"},
    "decimate": {"factor"},
    "segment": {"window_seconds", "partial"},
    "rms_envelope": {"window", "which"},
    "zero_upcross_waves": set(),
    "demean": set(),
}
_TOP_KEYS = {"version", "seed", "input", "output", "preprocess", "discovery", "forest"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    preprocess: dict = field(default_factory=lambda: {"steps": []})
    discovery: DiscoveryConfig = DiscoveryConfig()
    forest: ForestConfig = ForestConfig()
    input: Optional[str] = None
    output: Optional[str] = None

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        seed = self.seed if seed is None else int(seed)
        return replace(self, seed=seed, discovery=replace(self.discovery, seed=seed),
                       forest=replace(self.forest, seed=seed))

    def to_dict(self) -> dict:
        d = {"version": CONFIG_VERSION, "seed": self.seed, "preprocess": self.preprocess,
             "discovery": self.discovery.to_dict(), "forest": self.forest.to_dict()}
        if self.input is not None:
            d["input"] = self.input
        if self.output is not None:
            d["output"] = self.output
        return d

    def hash(self) -> str:
        return config_hash(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, source: str = "config") -> "RunConfig":
        if not isinstance(d, dict):
            raise InputFormatError("config must be a mapping", source=source)
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise InputFormatError(f"unknown config keys {sorted(unknown)}", source=source)
        if d.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise InputFormatError(f"unsupported config version {d.get('version')!r}", source=source)
        pre = dict(d.get("preprocess") or {})
        pre.setdefault("steps", [])
        for i, step in enumerate(pre["steps"]):
            if not isinstance(step, dict) or step.get("op") not in STEP_OPS:
                raise InputFormatError(f"preprocess step {i}: unknown op {step!r}", source=source)
            extra = set(step) - {"op"} - STEP_OPS[step["op"]]
            if extra:
                raise InputFormatError(f"preprocess step {i}: unknown keys {sorted(extra)}",
                                       source=source)
        try:
            disc = DiscoveryConfig.from_dict(_checked(d.get("discovery"), DiscoveryConfig, source))
            forest = ForestConfig.from_dict(_checked(d.get("forest"), ForestConfig, source))
        except (TypeError, ValueError) as exc:
            raise InputFormatError(str(exc), source=source) from None
        cfg = cls(int(d.get("seed", 0)), pre, disc, forest, d.get("input"), d.get("output"))
        return cfg.with_seed(cfg.seed)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise InputFormatError(f"invalid YAML: {exc}", source=str(path)) from None
        return cls.from_dict(raw or {}, source=str(path))


def _checked(section, kind, source) -> dict:
    section = dict(section or {})
    unknown = set(section) - set(kind.__dataclass_fields__)
    if unknown:
        raise InputFormatError(f"unknown {kind.__name__} keys {sorted(unknown)}", source=source)
    return section
