"""Pool-adjacent-violators for nonincreasing least squares fits."""
from __future__ import annotations

import numpy as np


def pava_nonincreasing(y, w=None) -> np.ndarray:
    """Weighted least-squares projection of ``y`` onto nonincreasing sequences.

    Minimizes ``sum(w * (z - y)**2)`` subject to ``z[0] >= z[1] >= ...``.
    Blocks are merged from left to right whenever the newest block mean
    exceeds its predecessor.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n == 0:
        return y.copy()
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    if w.shape != y.shape or np.any(w <= 0):
        raise ValueError("weights must be positive and match y")

    means = np.empty(n)
    weights = np.empty(n)
    sizes = np.empty(n, dtype=int)
    top = -1
    for i in range(n):
        top += 1
        means[top], weights[top], sizes[top] = y[i], w[i], 1
        while top > 0 and means[top] > means[top - 1]:
            tw = weights[top - 1] + weights[top]
            means[top - 1] = (weights[top - 1] * means[top - 1] + weights[top] * means[top]) / tw
            weights[top - 1] = tw
            sizes[top - 1] += sizes[top]
            top -= 1
    return np.repeat(means[: top + 1], sizes[: top + 1])


def project_monotone_cone(y) -> np.ndarray:
    """Euclidean projection onto ``{z : z_1 >= z_2 >= ... >= 0}``."""
    return np.maximum(pava_nonincreasing(y), 0.0)


def project_monotone_box(y, w=None, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Weighted projection onto ``{hi >= z_1 >= ... >= z_n >= lo}``."""
    return np.clip(pava_nonincreasing(y, w), lo, hi)
