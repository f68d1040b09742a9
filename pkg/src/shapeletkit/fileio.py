"""Text formats: labelled dataset CSV and single-column continuous streams."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import LabeledDataset, TimeSeries
from .exceptions import InputFormatError, InvalidInput

CSV_DIGITS = 9
UNLABELED = "unlabeled"


def fmt(v: float) -> str:
    return format(float(v), f".{CSV_DIGITS}g")


def parse_dataset_csv(text: str, header: bool = False, source: Optional[str] = None,
                      sample_rate_hz: Optional[float] = None) -> LabeledDataset:
    """One series per row: ``label,x0,x1,...``. Rows may differ in length."""
    series, labels = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if header and lineno == 1:
            continue
        if not row or all(not c.strip() for c in row):
            continue
        label = row[0].strip()
        if not label:
            raise InputFormatError("empty class label", lineno, source)
        cells = [c for c in row[1:] if c.strip()]
        if not cells:
            raise InputFormatError("row has no samples", lineno, source)
        try:
            values = [float(c) for c in cells]
        except ValueError as exc:
            raise InputFormatError(str(exc), lineno, source) from None
        if not all(math.isfinite(v) for v in values):
            raise InputFormatError("non-finite sample", lineno, source)
        series.append(TimeSeries(values, sample_rate_hz, str(len(series))))
        labels.append(label)
    return LabeledDataset(tuple(series), tuple(labels))


def read_dataset_csv(path, header: bool = False) -> LabeledDataset:
    return parse_dataset_csv(Path(path).read_text(), header=header, source=str(path))


def format_dataset_csv(series: Sequence[TimeSeries], labels: Sequence[str]) -> str:
    if len(series) != len(labels):
        raise InvalidInput("series and labels differ in length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for s, lab in zip(series, labels):
        w.writerow([lab, *(fmt(v) for v in s.values)])
    return buf.getvalue()


def parse_stream(text: str, sample_rate_hz: Optional[float] = None, id: str = "stream",
                 source: Optional[str] = None) -> TimeSeries:
    """One sample per line; blank lines are skipped."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise InputFormatError(f"not a number: {line[:40]!r}", lineno, source) from None
        if not math.isfinite(v):
            raise InputFormatError("non-finite sample", lineno, source)
        values.append(v)
    if not values:
        raise InputFormatError("no samples", None, source)
    return TimeSeries(np.array(values), sample_rate_hz, id)


def read_stream(path, sample_rate_hz: Optional[float] = None) -> TimeSeries:
    path = Path(path)
    return parse_stream(path.read_text(), sample_rate_hz, id=path.stem, source=str(path))
