"""Slow, obvious implementations used as test oracles.

Plain Python floats, full scans, every split point enumerated. Nothing
here imports the compiled kernels.
"""
import math

EPS_STD = 1e-8


def mean_std(xs):
    s = 0.0
    for v in xs:
        s += v
    mu = s / len(xs)
    acc = 0.0
    for v in xs:
        acc += (v - mu) * (v - mu)
    return mu, math.sqrt(acc / len(xs))


def znorm(xs):
    mu, sd = mean_std(xs)
    if sd <= EPS_STD:
        return [0.0] * len(xs)
    return [(v - mu) / sd for v in xs]


def full_scan_min(shp, series, normalize=True):
    """(distance, offset) of the closest window, no pruning; first offset wins ties."""
    length = len(shp)
    best, best_off = math.inf, -1
    for j in range(len(series) - length + 1):
        window = list(series[j:j + length])
        if normalize:
            window = znorm(window)
        acc = 0.0
        for a, b in zip(window, shp):
            acc += (a - b) * (a - b)
        if acc < best:
            best, best_off = acc, j
    return best, best_off


def min_over_windows(shp, windows):
    best = math.inf
    for w in windows:
        acc = 0.0
        for a, b in zip(w, shp):
            acc += (a - b) * (a - b)
        if acc < best:
            best = acc
    return best


def entropy(counts):
    n = sum(counts.values())
    h = 0.0
    for c in counts.values():
        if c:
            p = c / n
            h += -p * math.log2(p)
    return h


def gain(labels_left, labels_right):
    def tally(labels):
        out = {}
        for lab in labels:
            out[lab] = out.get(lab, 0) + 1
        return out
    n = len(labels_left) + len(labels_right)
    weighted = 0.0
    for side in (labels_left, labels_right):
        if side:
            weighted += len(side) / n * entropy(tally(side))
    return entropy(tally(labels_left + labels_right)) - weighted


def best_split(distances, labels):
    """Try every midpoint; rank by (IG rounded to 12 places, margin, -threshold)."""
    pairs = sorted(zip(distances, labels, range(len(labels))))
    d = [p[0] for p in pairs]
    lab = [p[1] for p in pairs]
    best = None
    for i in range(len(d) - 1):
        lo, hi = d[i], d[i + 1]
        if not lo < hi:
            continue
        t = lo + (hi - lo) / 2.0
        if not t < hi:
            t = lo
        near = [lab[k] for k in range(len(d)) if d[k] <= t]
        far = [lab[k] for k in range(len(d)) if d[k] > t]
        ig = gain(near, far)
        key = (round(ig, 12), hi - lo, -t)
        if best is None or key > best[0]:
            majority = sorted(set(near), key=lambda c: (-near.count(c), c))[0]
            best = (key, ig, t, hi - lo, majority)
    if best is None or len(set(labels)) < 2:
        return 0.0, max(distances), 0.0, sorted(set(labels), key=lambda c: (-labels.count(c), c))[0]
    return max(best[1], 0.0), best[2], best[3], best[4]


def discover(series, labels, min_len=3, max_len=None, r=None, quality_threshold=0.05,
             normalize=True, length_normalize=True):
    """Returns a list of dicts in rank order."""
    n = len(series)
    ids = [str(i) for i in range(n)]
    max_len = min(len(s) for s in series) if max_len is None else max_len
    r = 10 * n if r is None else r
    classes = sorted(set(labels))
    p = r // len(classes)

    def rank(s):
        return (-round(s["ig"], 12), -s["margin"], s["length"], s["source_id"], s["offset"])

    windows = {}

    def windows_of(k, length):
        if (k, length) not in windows:
            xs = list(series[k])
            ws = [xs[j:j + length] for j in range(len(xs) - length + 1)]
            windows[(k, length)] = [znorm(w) for w in ws] if normalize else ws
        return windows[(k, length)]

    kept = []
    for src in range(n):
        found = []
        xs = list(series[src])
        for length in range(min_len, max_len + 1):
            for off in range(len(xs) - length + 1):
                cand = xs[off:off + length]
                shp = znorm(cand) if normalize else cand
                dists = []
                for k in range(n):
                    dk = min_over_windows(shp, windows_of(k, length))
                    dists.append(dk / length if length_normalize else dk)
                ig, t, margin, cls = best_split(dists, list(labels))
                if ig < quality_threshold:
                    continue
                found.append({"source_id": ids[src], "offset": off, "length": length,
                              "ig": ig, "split_threshold": t, "margin": margin,
                              "class_label": cls})
        found.sort(key=rank)
        survivors = []
        for s in found:
            if any(o["offset"] < s["offset"] + s["length"] and s["offset"] < o["offset"] + o["length"]
                   for o in survivors):
                continue
            survivors.append(s)
        taken = {}
        merged = []
        for s in sorted(kept + survivors, key=rank):
            if taken.get(s["class_label"], 0) < p:
                taken[s["class_label"]] = taken.get(s["class_label"], 0) + 1
                merged.append(s)
        kept = merged
    return kept
