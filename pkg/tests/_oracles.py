"""Independent brute-force references used to pin expected test values.

Everything here deliberately avoids the library's accumulation strategies:
plain nested loops over index pairs, one exp() call per pair.
"""

import math

import numpy as np


def brute_pairs(events, u, v):
    """All 1-based (l, m) with events[l]=u, events[m]=v, l < m."""
    out = []
    for l in range(len(events)):
        for m in range(l + 1, len(events)):
            if events[l] == u and events[m] == v:
                out.append((l + 1, m + 1))
    return out


def brute_accumulate(events, size, kappa, ordered=True):
    """Pair counts and decayed-effect sums; ordered=False drops the l<m restriction."""
    counts = np.zeros((size, size))
    effects = np.zeros((size, size))
    for l in range(len(events)):
        for m in range(len(events)):
            if m == l:
                continue
            if ordered and m < l:
                continue
            counts[events[l], events[m]] += 1.0
            effects[events[l], events[m]] += math.exp(-kappa * abs(m - l))
    return counts, effects


def brute_matrix(events, size, kappa, length_sensitive=True, ordered=True):
    """Final feature matrix straight from the definition."""
    counts, effects = brute_accumulate(events, size, kappa, ordered=ordered)
    length = len(events)
    psi = np.zeros((size, size))
    for u in range(size):
        for v in range(size):
            if counts[u, v] == 0:
                continue
            denom = counts[u, v] if length_sensitive else counts[u, v] / length
            psi[u, v] = (effects[u, v] / denom) ** (1.0 / kappa)
    return psi


def brute_manhattan_ranking(points, ids, query):
    dists = [float(np.abs(p - query).sum()) for p in points]
    order = sorted(range(len(ids)), key=lambda i: (dists[i], ids[i]))
    return [(ids[i], dists[i]) for i in order]
