import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def burst_dataset(n, length=80, burst=20, amplitude=3.0, seed=0):
    """Class A: noise plus a one-period sine burst at a random position. Class B: noise."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    wave = amplitude * np.sin(np.linspace(0, 2 * np.pi, burst))
    for i in range(n):
        x = rng.normal(0.0, 1.0, length)
        label = "A" if i % 2 == 0 else "B"
        if label == "A":
            start = int(rng.integers(0, length - burst + 1))
            x[start:start + burst] += wave
        X.append(x)
        y.append(label)
    return X, y


@pytest.fixture
def bursts():
    return burst_dataset


@pytest.fixture
def small_burst_data():
    from shapeletkit import LabeledDataset
    X, y = burst_dataset(16, length=40, burst=10, seed=3)
    return LabeledDataset.from_arrays(X, y)
