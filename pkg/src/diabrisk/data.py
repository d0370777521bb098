"""Tabular dataset loading, cleaning, normalization, splitting, and profiling.

A :class:`Dataset` is an immutable column-oriented numeric table with binary
labels. All transformations return new datasets and append a human-readable
descriptor to ``transform_log``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .errors import DataError

#: Columns with more than this many distinct values are treated as continuous.
ORDINAL_CARDINALITY_MAX = 15


@dataclass(frozen=True)
class FeatureSchema:
    """Inferred per-column schema: value kind plus observed value range."""

    name: str
    kind: str  # "binary" | "ordinal" | "continuous"
    observed_min: float
    observed_max: float

    def __post_init__(self) -> None:
        if self.kind not in ("binary", "ordinal", "continuous"):
            raise DataError(f"unknown schema kind {self.kind!r} for column {self.name!r}")
        if self.observed_min > self.observed_max:
            raise DataError(f"column {self.name!r}: observed_min > observed_max")


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with 0/1 labels and per-column schema.

    ``features`` has shape (row_count, n_features) and is stored in Fortran
    order so column slices are contiguous. Missing cells are NaN until
    :func:`impute` runs.
    """

    features: np.ndarray
    labels: np.ndarray
    schema: tuple[FeatureSchema, ...]
    label_name: str = "label"
    transform_log: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if len(self.labels) != self.features.shape[0]:
            raise DataError("labels length must equal the number of feature rows")
        if len(self.schema) != self.features.shape[1]:
            raise DataError("schema length must equal the number of feature columns")

    @property
    def row_count(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.schema)

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]

    def class_counts(self) -> dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def with_rows(self, index: np.ndarray, log_entry: str | None = None) -> "Dataset":
        """New dataset restricted to the given row indices (order preserved)."""
        log = self.transform_log + (log_entry,) if log_entry else self.transform_log
        return replace(
            self,
            features=np.asfortranarray(self.features[index]),
            labels=self.labels[index].copy(),
            transform_log=log,
        )

    @staticmethod
    def from_arrays(
        features: np.ndarray,
        labels: Iterable[int],
        names: Sequence[str] | None = None,
        label_name: str = "label",
    ) -> "Dataset":
        """Build a dataset from raw arrays, inferring the schema per column."""
        features = np.asfortranarray(np.asarray(features, dtype=np.float64))
        labels = np.asarray(list(labels), dtype=np.int8)
        if names is None:
            names = [f"f{j}" for j in range(features.shape[1])]
        schema = tuple(
            _infer_column_schema(str(names[j]), features[:, j]) for j in range(features.shape[1])
        )
        return Dataset(features=features, labels=labels, schema=schema, label_name=label_name)


@dataclass(frozen=True)
class Scaler:
    """Per-column min-max scaler; invertible within 1e-12 absolute."""

    mins: np.ndarray
    maxs: np.ndarray
    method: str = "minmax"

    def _ranges(self) -> np.ndarray:
        ranges = self.maxs - self.mins
        return np.where(ranges == 0.0, 1.0, ranges)  # constant columns map to 0

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return (np.asarray(rows, dtype=np.float64) - self.mins) / self._ranges()

    def inverse(self, rows: np.ndarray) -> np.ndarray:
        return np.asarray(rows, dtype=np.float64) * self._ranges() + self.mins

    def select(self, indices: Sequence[int]) -> "Scaler":
        idx = np.asarray(indices, dtype=np.intp)
        return Scaler(mins=self.mins[idx].copy(), maxs=self.maxs[idx].copy(), method=self.method)

    def to_dict(self) -> dict:
        return {"method": self.method, "mins": self.mins.tolist(), "maxs": self.maxs.tolist()}


@dataclass(frozen=True)
class ProfileReport:
    """EDA summary: histograms, Pearson correlations, VIF, class balance."""

    histograms: dict[str, dict[str, list[float]]]  # name -> {"edges": [...], "counts": [...]}
    correlation: np.ndarray
    feature_names: tuple[str, ...]
    vif: dict[str, float | None]  # None means infinite (perfect collinearity)
    class_counts: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "histograms": self.histograms,
            "feature_names": list(self.feature_names),
            "correlation": [[float(v) for v in row] for row in self.correlation],
            "vif": {
                name: (None if value is None else float(value)) for name, value in self.vif.items()
            },
            "class_counts": {str(k): v for k, v in self.class_counts.items()},
        }


def _infer_column_schema(name: str, column: np.ndarray) -> FeatureSchema:
    observed = column[~np.isnan(column)]
    if observed.size == 0:
        raise DataError(f"column {name!r} has no observed values")
    distinct = np.unique(observed)
    if set(distinct.tolist()) <= {0.0, 1.0}:
        kind = "binary"
    elif distinct.size <= ORDINAL_CARDINALITY_MAX:
        kind = "ordinal"
    else:
        kind = "continuous"
    return FeatureSchema(
        name=name,
        kind=kind,
        observed_min=float(distinct[0]),
        observed_max=float(distinct[-1]),
    )


def load_csv(path: str | Path, label_column: str) -> Dataset:
    """Load an RFC-4180 CSV with a header row into a :class:`Dataset`.

    Empty cells, the literal "NA", and any non-numeric cell are recorded as
    missing (NaN). The label column must parse to 0/1 for every row.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    frame = pd.read_csv(path, na_values=["", "NA"], keep_default_na=False, dtype=str)
    if frame.shape[0] == 0:
        raise DataError("empty dataset: no data rows")
    if label_column not in frame.columns:
        raise DataError(f"missing label column {label_column!r}")

    labels_raw = pd.to_numeric(frame[label_column], errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(np.isnan(labels_raw) | ~np.isin(labels_raw, (0.0, 1.0)))
    if bad.size:
        row = int(bad[0])
        raise DataError(
            f"label column {label_column!r} must contain only 0/1; "
            f"row {row} has {frame[label_column].iloc[row]!r}"
        )

    feature_cols = [c for c in frame.columns if c != label_column]
    if not feature_cols:
        raise DataError("dataset has no feature columns")
    features = np.empty((frame.shape[0], len(feature_cols)), dtype=np.float64, order="F")
    for j, col in enumerate(feature_cols):
        features[:, j] = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=np.float64)

    schema = tuple(_infer_column_schema(col, features[:, j]) for j, col in enumerate(feature_cols))
    return Dataset(
        features=features,
        labels=labels_raw.astype(np.int8),
        schema=schema,
        label_name=label_column,
        transform_log=(f"load_csv:{path.name}",),
    )


def select_columns(d: Dataset, names: Sequence[str]) -> Dataset:
    """Restrict to the named feature columns, in the given order."""
    missing = [n for n in names if n not in d.feature_names]
    if missing:
        raise DataError(f"unknown feature columns: {missing}")
    idx = [d.feature_names.index(n) for n in names]
    return replace(
        d,
        features=np.asfortranarray(d.features[:, idx]),
        schema=tuple(d.schema[i] for i in idx),
        transform_log=d.transform_log + (f"select_columns:{len(idx)}",),
    )


def save_npz(d: Dataset, path: str | Path) -> None:
    """Persist a dataset as .npz (features, labels, schema, log)."""
    import json

    np.savez_compressed(
        path,
        features=np.ascontiguousarray(d.features),
        labels=d.labels,
        schema=json.dumps(
            [
                {
                    "name": s.name,
                    "kind": s.kind,
                    "observed_min": s.observed_min,
                    "observed_max": s.observed_max,
                }
                for s in d.schema
            ]
        ),
        label_name=d.label_name,
        transform_log=json.dumps(list(d.transform_log)),
    )


def load_npz(path: str | Path) -> Dataset:
    import json

    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    with np.load(path, allow_pickle=False) as archive:
        schema = tuple(
            FeatureSchema(**entry) for entry in json.loads(str(archive["schema"]))
        )
        return Dataset(
            features=np.asfortranarray(archive["features"].astype(np.float64)),
            labels=archive["labels"].astype(np.int8),
            schema=schema,
            label_name=str(archive["label_name"]),
            transform_log=tuple(json.loads(str(archive["transform_log"]))),
        )


def _row_view(d: Dataset) -> np.ndarray:
    """Byte view of each (features, label) row; NaNs compare equal bytewise."""
    combined = np.ascontiguousarray(
        np.column_stack([d.features, d.labels.astype(np.float64)])
    )
    return combined.view(np.dtype((np.void, combined.dtype.itemsize * combined.shape[1]))).ravel()


def deduplicate(d: Dataset) -> tuple[Dataset, int]:
    """Drop rows identical across all features and the label; keep first hits."""
    _, first_index = np.unique(_row_view(d), return_index=True)
    keep = np.sort(first_index)
    removed = d.row_count - keep.size
    if removed == 0:
        return d, 0
    return d.with_rows(keep, log_entry=f"deduplicate:removed={removed}"), removed


def impute(d: Dataset, strategy: str = "median") -> Dataset:
    """Fill missing cells: column mode for binary, column median otherwise.

    Returns the input unchanged when nothing is missing.
    """
    if strategy not in ("median", "mode-for-binary"):
        raise DataError(f"unknown impute strategy {strategy!r}")
    missing = np.isnan(d.features)
    if not missing.any():
        return d
    features = np.array(d.features, order="F")
    for j, spec in enumerate(d.schema):
        column_missing = missing[:, j]
        if not column_missing.any():
            continue
        observed = features[~column_missing, j]
        if observed.size == 0:
            raise DataError(f"column {spec.name!r} is entirely missing; cannot impute")
        if spec.kind == "binary":
            values, counts = np.unique(observed, return_counts=True)
            fill = float(values[np.argmax(counts)])  # ties resolve to the smaller value
        else:
            fill = float(np.median(observed))
        features[column_missing, j] = fill
    n_filled = int(missing.sum())
    return replace(
        d,
        features=features,
        transform_log=d.transform_log + (f"impute:{strategy}:cells={n_filled}",),
    )


def normalize(d: Dataset) -> tuple[Dataset, Scaler]:
    """Min-max scale every column to [0, 1]; constant columns map to 0."""
    if np.isnan(d.features).any():
        raise DataError("normalize requires no missing values; run impute first")
    mins = d.features.min(axis=0)
    maxs = d.features.max(axis=0)
    scaler = Scaler(mins=mins, maxs=maxs)
    features = np.asfortranarray(scaler.transform(d.features))
    schema = tuple(
        replace(
            s,
            observed_min=float(features[:, j].min()),
            observed_max=float(features[:, j].max()),
        )
        for j, s in enumerate(d.schema)
    )
    out = replace(
        d,
        features=features,
        schema=schema,
        transform_log=d.transform_log + ("normalize:minmax",),
    )
    return out, scaler


def split(
    d: Dataset, test_fraction: float, stratify: bool = True, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Disjoint train/test row split, optionally stratified by label."""
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    if stratify:
        test_parts = []
        for value in np.unique(d.labels):
            class_idx = np.flatnonzero(d.labels == value)
            if class_idx.size < 2:
                raise DataError(
                    f"class {int(value)} has fewer than 2 rows; cannot stratify"
                )
            n_test = int(round(test_fraction * class_idx.size))
            n_test = min(max(n_test, 1), class_idx.size - 1)
            test_parts.append(rng.permutation(class_idx)[:n_test])
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        order = rng.permutation(d.row_count)
        n_test = int(round(test_fraction * d.row_count))
        n_test = min(max(n_test, 1), d.row_count - 1)
        test_idx = np.sort(order[:n_test])
    mask = np.zeros(d.row_count, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    tag = f"split:test={test_fraction}:stratify={stratify}:seed={seed}"
    return (
        d.with_rows(train_idx, log_entry=tag + ":part=train"),
        d.with_rows(test_idx, log_entry=tag + ":part=test"),
    )


def _pearson_correlation(features: np.ndarray) -> np.ndarray:
    centered = features - features.mean(axis=0)
    std = np.sqrt((centered**2).mean(axis=0))
    safe_std = np.where(std == 0.0, 1.0, std)
    scaled = centered / safe_std
    corr = (scaled.T @ scaled) / features.shape[0]
    corr[std == 0.0, :] = 0.0
    corr[:, std == 0.0] = 0.0
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)  # force exact symmetry
    np.fill_diagonal(corr, 1.0)
    return corr


def _vif_one(features: np.ndarray, j: int) -> float | None:
    """VIF_j = 1/(1-R^2) from an OLS fit of column j on the other columns."""
    y = features[:, j]
    others = np.delete(features, j, axis=1)
    design = np.column_stack([np.ones(features.shape[0]), others])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coef
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0  # constant column carries no collinearity signal
    r2 = min(max(1.0 - float((residual**2).sum()) / ss_tot, 0.0), 1.0)
    if 1.0 - r2 < 1e-12:
        return None
    return max(1.0 / (1.0 - r2), 1.0)


def profile(d: Dataset, bins: int = 10) -> ProfileReport:
    """Histogram, correlation, and VIF profile of a fully-observed dataset."""
    if d.row_count < 3:
        raise DataError("profile requires at least 3 rows")
    if np.isnan(d.features).any():
        raise DataError("profile requires no missing values; run impute first")
    histograms = {}
    for j, spec in enumerate(d.schema):
        counts, edges = np.histogram(d.features[:, j], bins=bins)
        histograms[spec.name] = {
            "edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts],
        }
    correlation = _pearson_correlation(d.features)
    vif = {spec.name: _vif_one(d.features, j) for j, spec in enumerate(d.schema)}
    return ProfileReport(
        histograms=histograms,
        correlation=correlation,
        feature_names=d.feature_names,
        vif=vif,
        class_counts=d.class_counts(),
    )
