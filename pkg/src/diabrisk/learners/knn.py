"""K-nearest-neighbors classifier with exact search.

Training rows are stored in canonical (lexicographic) order so predictions
are invariant to the order rows arrived in; neighbor ties resolve by distance
then canonical index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._nn import kneighbors
from ..errors import DataError


@dataclass(frozen=True)
class KnnModel:
    points: np.ndarray  # canonically ordered training rows
    labels: np.ndarray
    k: int

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        neighbor_idx = kneighbors(rows, self.points, self.k)
        return self.labels[neighbor_idx].mean(axis=1)


def fit_knn(x: np.ndarray, y: np.ndarray, k: int = 5) -> KnnModel:
    if not 1 <= k <= x.shape[0]:
        raise DataError(f"k must lie in [1, {x.shape[0]}]")
    # lexsort keys run last-to-first: features lead, label breaks exact-row ties
    order = np.lexsort((y,) + tuple(x[:, j] for j in reversed(range(x.shape[1]))))
    return KnnModel(
        points=np.ascontiguousarray(x[order], dtype=np.float64),
        labels=y[order].astype(np.float64),
        k=k,
    )
