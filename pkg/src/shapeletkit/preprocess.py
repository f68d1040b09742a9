"""Signal conditioning for continuous sensor streams.

Turns long recordings into the fixed-length (or per-wave) series that
shapelet discovery works on: band-pass filtering, decimation, fixed
windows, moving RMS envelopes and zero up-crossing wave extraction.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, TimeSeries
from .exceptions import InvalidInput

logger = logging.getLogger(__name__)


class PartialWindow(str, enum.Enum):
    DROP = "drop"
    KEEP = "keep"


@dataclass(frozen=True)
class SegmentationSpec:
    window_seconds: float
    sample_rate_hz: float
    partial: PartialWindow = PartialWindow.DROP

    def __post_init__(self):
        object.__setattr__(self, "partial", PartialWindow(self.partial))
        if not self.window_seconds > 0 or not self.sample_rate_hz > 0:
            raise InvalidInput("window length and sample rate must be positive")
        n = self.window_seconds * self.sample_rate_hz
        if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 1:
            raise InvalidInput(f"window of {self.window_seconds} s at {self.sample_rate_hz} Hz "
                               f"is not a whole number of samples ({n})")

    @property
    def window_samples(self) -> int:
        return int(round(self.window_seconds * self.sample_rate_hz))


def _rate(x: TimeSeries) -> float:
    if x.sample_rate_hz is None:
        raise InvalidInput(f"series {x.id!r} has no sample rate")
    return x.sample_rate_hz


def bandpass(x: TimeSeries, low_hz: float, high_hz: float) -> TimeSeries:
    """Zero-phase band-pass: zero every FFT bin outside ``[low_hz, high_hz]``."""
    fs = _rate(x)
    if not 0 < low_hz < high_hz < fs / 2:
        raise InvalidInput(f"need 0 < low < high < {fs / 2} Hz, got [{low_hz}, {high_hz}]")
    m = len(x)
    spectrum = np.fft.rfft(x.values)
    freqs = np.fft.rfftfreq(m, d=1.0 / fs)
    spectrum[(freqs < low_hz) | (freqs > high_hz)] = 0.0
    return x.with_values(np.fft.irfft(spectrum, n=m))


def decimate(x: TimeSeries, factor: int) -> TimeSeries:
    """Keep every ``factor``-th sample from index 0. No anti-alias filtering."""
    if int(factor) != factor or factor < 1:
        raise InvalidInput(f"decimation factor must be a positive integer, got {factor!r}")
    factor = int(factor)
    rate = None if x.sample_rate_hz is None else x.sample_rate_hz / factor
    return x.with_values(x.values[::factor], sample_rate_hz=rate)


def segment(x: TimeSeries, spec: SegmentationSpec) -> list:
    """Consecutive non-overlapping windows with ids ``<parent>#<index>``."""
    _rate(x)
    if not math.isclose(x.sample_rate_hz, spec.sample_rate_hz):
        raise InvalidInput(f"series is sampled at {x.sample_rate_hz} Hz, "
                           f"segmentation expects {spec.sample_rate_hz} Hz")
    w = spec.window_samples
    m = len(x)
    out = []
    for i, start in enumerate(range(0, m, w)):
        chunk = x.values[start:start + w]
        if chunk.shape[0] < w and spec.partial is PartialWindow.DROP:
            break
        out.append(TimeSeries(chunk, x.sample_rate_hz, f"{x.id}#{i}"))
    if not out:
        logger.warning("series %r (%d samples) is shorter than one %d-sample window",
                       x.id, m, w)
    return out


def rms_envelope(x: TimeSeries, window: int) -> tuple:
    """Upper and lower moving-RMS envelopes over a centred window.

    The window around sample i spans ``[i - window//2, i - window//2 + window)``,
    clipped at the ends of the series.
    """
    m = len(x)
    if int(window) != window or not 1 <= window <= m:
        raise InvalidInput(f"window must be an integer in [1, {m}], got {window!r}")
    window = int(window)
    sq = np.concatenate([[0.0], np.cumsum(x.values * x.values)])
    idx = np.arange(m)
    lo = np.clip(idx - window // 2, 0, m)
    hi = np.clip(idx - window // 2 + window, 0, m)
    rms = np.sqrt(np.maximum((sq[hi] - sq[lo]) / (hi - lo), 0.0))
    return x.with_values(rms, id=f"{x.id}#upper"), x.with_values(-rms, id=f"{x.id}#lower")


ZERO_SNAP = 1e-10


def zero_upcross_waves(x: TimeSeries) -> list:
    """Split at up-crossings ``x[i] < 0 <= x[i+1]``; partial head and tail are dropped.

    Each wave starts at the first nonnegative sample after a crossing.
    Samples within ``ZERO_SNAP * max|x|`` of zero count as zero, and a
    record that starts at zero and then rises starts on a crossing.
    """
    v = x.values
    if v.shape[0] < 2:
        raise InvalidInput("need at least 2 samples to find crossings")
    scale = float(np.max(np.abs(v)))
    v = np.where(np.abs(v) <= ZERO_SNAP * scale, 0.0, v)
    starts = np.nonzero((v[:-1] < 0) & (v[1:] >= 0))[0] + 1
    if v[0] == 0.0 and v[1] > 0.0:
        starts = np.r_[0, starts]
    if starts.shape[0] < 2:
        logger.warning("series %r has %d up-crossing(s); no complete wave", x.id, starts.shape[0])
        return []
    return [TimeSeries(x.values[a:b], x.sample_rate_hz, f"{x.id}#{i}")
            for i, (a, b) in enumerate(zip(starts[:-1].tolist(), starts[1:].tolist()))]


def demean(x: TimeSeries) -> TimeSeries:
    return x.with_values(x.values - x.values.mean())


def balance_by_downsampling(data: LabeledDataset, seed: int = 0) -> LabeledDataset:
    """Subsample every class to the minority-class size, keeping dataset order."""
    counts = data.class_counts
    if len(counts) < 2:
        raise InvalidInput("need at least 2 classes to balance")
    target = min(counts.values())
    rng = np.random.default_rng(seed)
    keep = []
    labels = np.array(data.labels)
    for c in sorted(counts):
        idx = np.nonzero(labels == c)[0]
        keep.extend(rng.choice(idx, size=target, replace=False).tolist())
    return data.subset(sorted(keep))


def _apply_step(x: TimeSeries, step: dict) -> list:
    op = step["op"]
    if op == "bandpass":
        return [bandpass(x, float(step["low_hz"]), float(step["high_hz"]))]
    if op == "decimate":
        return [decimate(x, step["factor"])]
    if op == "segment":
        spec = SegmentationSpec(float(step["window_seconds"]), _rate(x),
                                step.get("partial", PartialWindow.DROP))
        return segment(x, spec)
    if op == "rms_envelope":
        upper, lower = rms_envelope(x, step["window"])
        which = step.get("which", "upper")
        if which not in ("upper", "lower", "both"):
            raise InvalidInput(f"rms_envelope: 'which' must be upper, lower or both, got {which!r}")
        return {"upper": [upper], "lower": [lower], "both": [upper, lower]}[which]
    if op == "zero_upcross_waves":
        return zero_upcross_waves(x)
    if op == "demean":
        return [demean(x)]
    raise InvalidInput(f"unknown preprocessing op {op!r}")


def run_pipeline(series, steps) -> list:
    """Apply ``steps`` (dicts with an ``op`` key) in order; each may fan out."""
    current = list(series)
    for step in steps:
        current = [y for x in current for y in _apply_step(x, step)]
    return current
