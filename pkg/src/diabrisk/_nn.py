"""Exact Euclidean nearest-neighbor search.

Distances are the direct per-pair sum of squared feature differences in
float64, accumulated in feature order, so results match a naive reference
scan bit for bit; ties resolve to the lowest point index.

The kernels are tiled: a block of queries is held against a cache-resident
block of points (stored feature-major so the inner loop vectorizes across
points without reordering any per-pair sum). Queries are independent, so
parallelism never changes results.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_QUERY_TILE = 64
_POINT_TILE = 1024


@njit(cache=True, parallel=True)
def _nearest_one_kernel(points_t):
    width, n = points_t.shape
    out = np.empty(n, np.int64)
    n_tiles = (n + _QUERY_TILE - 1) // _QUERY_TILE
    for tile in prange(n_tiles):
        i0 = tile * _QUERY_TILE
        i1 = min(i0 + _QUERY_TILE, n)
        best = np.full(i1 - i0, np.inf)
        best_j = np.full(i1 - i0, -1, np.int64)
        acc = np.empty(_POINT_TILE)
        for j0 in range(0, n, _POINT_TILE):
            j1 = min(j0 + _POINT_TILE, n)
            block = j1 - j0
            for i in range(i0, i1):
                for j in range(block):
                    acc[j] = 0.0
                for f in range(width):
                    q = points_t[f, i]
                    for j in range(block):
                        diff = q - points_t[f, j0 + j]
                        acc[j] += diff * diff
                b = best[i - i0]
                bj = best_j[i - i0]
                for j in range(block):
                    if j0 + j != i and acc[j] < b:  # strict: lowest index on ties
                        b = acc[j]
                        bj = j0 + j
                best[i - i0] = b
                best_j[i - i0] = bj
        for i in range(i0, i1):
            out[i] = best_j[i - i0]
    return out


@njit(cache=True, parallel=True)
def _kneighbors_kernel(queries_t, points_t, k, skip_identity):
    width, m = queries_t.shape
    n = points_t.shape[1]
    out = np.empty((m, k), np.int64)
    n_tiles = (m + _QUERY_TILE - 1) // _QUERY_TILE
    for tile in prange(n_tiles):
        i0 = tile * _QUERY_TILE
        i1 = min(i0 + _QUERY_TILE, m)
        rows = i1 - i0
        best_d = np.full((rows, k), np.inf)
        best_j = np.full((rows, k), -1, np.int64)
        acc = np.empty(_POINT_TILE)
        for j0 in range(0, n, _POINT_TILE):
            j1 = min(j0 + _POINT_TILE, n)
            block = j1 - j0
            for i in range(i0, i1):
                for j in range(block):
                    acc[j] = 0.0
                for f in range(width):
                    q = queries_t[f, i]
                    for j in range(block):
                        diff = q - points_t[f, j0 + j]
                        acc[j] += diff * diff
                row = i - i0
                for j in range(block):
                    if skip_identity and j0 + j == i:
                        continue
                    d = acc[j]
                    if d < best_d[row, k - 1]:  # ties never displace a lower index
                        pos = k - 1
                        while pos > 0 and d < best_d[row, pos - 1]:
                            best_d[row, pos] = best_d[row, pos - 1]
                            best_j[row, pos] = best_j[row, pos - 1]
                            pos -= 1
                        best_d[row, pos] = d
                        best_j[row, pos] = j0 + j
        for i in range(i0, i1):
            out[i] = best_j[i - i0]
    return out


def nearest_one(points: np.ndarray) -> np.ndarray:
    """Index of each point's single nearest neighbor, excluding itself."""
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] < 2:
        raise ValueError("nearest_one needs at least 2 points")
    return _nearest_one_kernel(np.ascontiguousarray(points.T))


def kneighbors(
    queries: np.ndarray,
    points: np.ndarray,
    k: int,
    skip_identity: bool = False,
) -> np.ndarray:
    """Indices of the k nearest points per query, ordered by (distance, index).

    With ``skip_identity`` the query block must BE the point set; query i
    then never matches point i.
    """
    queries = np.asarray(queries, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    limit = n - 1 if skip_identity else n
    if k < 1 or k > limit:
        raise ValueError(f"k must be in [1, {limit}]")
    if skip_identity and queries.shape[0] != n:
        raise ValueError("skip_identity requires queries to be the point set")
    return _kneighbors_kernel(
        np.ascontiguousarray(queries.T), np.ascontiguousarray(points.T), k, skip_identity
    )
