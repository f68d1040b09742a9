"""Compiled inner loops.

All sums accumulate left to right so that a value computed here is
bit-identical no matter which public entry point produced it.
"""
import numpy as np
from numba import njit

EPS_STD = 1e-8


@njit(cache=True, nogil=True)
def mean_std(x, start, length):
    s = 0.0
    for i in range(length):
        s += x[start + i]
    mu = s / length
    v = 0.0
    for i in range(length):
        d = x[start + i] - mu
        v += d * d
    return mu, np.sqrt(v / length)


@njit(cache=True, nogil=True)
def znorm(x):
    n = x.shape[0]
    out = np.zeros(n)
    mu, sd = mean_std(x, 0, n)
    if sd > EPS_STD:
        for i in range(n):
            out[i] = (x[i] - mu) / sd
    return out


@njit(cache=True, nogil=True)
def sqdist(x, y):
    acc = 0.0
    for i in range(x.shape[0]):
        d = x[i] - y[i]
        acc += d * d
    return acc


@njit(cache=True, nogil=True)
def window_stats(x, length):
    nw = x.shape[0] - length + 1
    means = np.empty(nw)
    stds = np.empty(nw)
    for j in range(nw):
        mu, sd = mean_std(x, j, length)
        means[j] = mu
        stds[j] = sd
    return means, stds


@njit(cache=True, nogil=True)
def min_dist(shp, x, means, stds, normalize, bound, abandon):
    """Minimum squared distance of ``shp`` over all windows of ``x``.

    Windows whose running sum exceeds the current best are abandoned when
    ``abandon`` is set. Returns (inf, -1) if no window reaches ``bound``.
    """
    length = shp.shape[0]
    nw = x.shape[0] - length + 1
    best = bound
    best_off = -1
    for j in range(nw):
        acc = 0.0
        if normalize:
            mu = means[j]
            sd = stds[j]
            flat = sd <= EPS_STD
            for i in range(length):
                z = 0.0
                if not flat:
                    z = (x[j + i] - mu) / sd
                d = z - shp[i]
                acc += d * d
                if abandon and acc > best:
                    break
        else:
            for i in range(length):
                d = x[j + i] - shp[i]
                acc += d * d
                if abandon and acc > best:
                    break
        if best_off == -1:
            if acc <= best:
                best = acc
                best_off = j
        elif acc < best:
            best = acc
            best_off = j
    if best_off == -1:
        return np.inf, -1
    return best, best_off


@njit(cache=True, nogil=True)
def candidate_orderlines(src, length, offsets, flat, starts, lengths,
                         mflat, sflat, mstarts, normalize, abandon):
    """Distances of each candidate ``flat[src][off:off+length]`` to every series.

    ``mflat``/``sflat`` hold window means/stds for ``length`` of all series,
    series ``k`` starting at ``mstarts[k]``.
    """
    n = starts.shape[0]
    out = np.empty((offsets.shape[0], n))
    xs = flat[starts[src]:starts[src] + lengths[src]]
    for c in range(offsets.shape[0]):
        off = offsets[c]
        if normalize:
            shp = znorm(xs[off:off + length])
        else:
            shp = xs[off:off + length].copy()
        for k in range(n):
            x = flat[starts[k]:starts[k] + lengths[k]]
            nw = lengths[k] - length + 1
            d, _ = min_dist(shp, x, mflat[mstarts[k]:mstarts[k] + nw],
                            sflat[mstarts[k]:mstarts[k] + nw],
                            normalize, np.inf, abandon)
            out[c, k] = d
    return out
