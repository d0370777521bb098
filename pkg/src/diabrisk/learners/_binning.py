"""Quantile binning of feature columns for histogram-based tree growth.

Each feature gets a sorted array of candidate split thresholds. A bin code c
means the value lies in (t[c-1], t[c]], so splitting at threshold index s is
exactly the predicate ``x <= t[s]``. Columns with at most ``max_bins``
distinct values get exact midpoint thresholds.
"""

from __future__ import annotations

import numpy as np


def quantile_thresholds(column: np.ndarray, max_bins: int) -> np.ndarray:
    distinct = np.unique(column)
    if distinct.size <= 1:
        return np.empty(0, dtype=np.float64)
    if distinct.size <= max_bins:
        return (distinct[:-1] + distinct[1:]) / 2.0
    probs = np.linspace(0.0, 1.0, max_bins + 1)[1:-1]
    return np.unique(np.quantile(column, probs))


class BinnedFeatures:
    """Bin codes (features x rows, C-order) plus flattened threshold arrays."""

    def __init__(self, features: np.ndarray, max_bins: int):
        n, p = features.shape
        thresholds = [quantile_thresholds(features[:, j], max_bins) for j in range(p)]
        self.offsets = np.zeros(p + 1, dtype=np.int64)
        self.offsets[1:] = np.cumsum([t.size for t in thresholds])
        self.thresholds = (
            np.concatenate(thresholds) if self.offsets[-1] else np.empty(0, dtype=np.float64)
        )
        codes = np.empty((p, n), dtype=np.uint16)
        for j in range(p):
            codes[j] = np.searchsorted(thresholds[j], features[:, j], side="left")
        self.codes = codes

    def threshold_value(self, feature: int, threshold_index: int) -> float:
        return float(self.thresholds[self.offsets[feature] + threshold_index])
