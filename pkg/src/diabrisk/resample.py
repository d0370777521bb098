"""Class rebalancing: SMOTE oversampling followed by Tomek-link cleaning.

SMOTE synthesizes minority rows by interpolating toward one of each seed
row's k nearest minority neighbors. Tomek removal then drops the
majority-class member of every cross-class mutual-nearest-neighbor pair in a
single pass. Both stages expect normalized features so Euclidean distances
are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._nn import kneighbors, nearest_one
from .data import Dataset
from .errors import DataError


@dataclass(frozen=True)
class ResampleConfig:
    smote_k: int = 5
    target_ratio: float = 1.0  # minority/majority count ratio after SMOTE
    seed: int = 0
    distance: str = "euclidean"

    def __post_init__(self) -> None:
        if self.smote_k < 1:
            raise DataError("smote_k must be >= 1")
        if not 0.0 < self.target_ratio <= 1.0:
            raise DataError("target_ratio must lie in (0, 1]")
        if self.distance != "euclidean":
            raise DataError(f"unsupported distance {self.distance!r}")


@dataclass(frozen=True)
class ResampleReport:
    counts_before: dict[int, int]
    counts_after_smote: dict[int, int]
    synthetic_created: int
    tomek_pairs_found: int
    majority_removed: int

    def to_dict(self) -> dict:
        return {
            "counts_before": {str(k): v for k, v in self.counts_before.items()},
            "counts_after_smote": {str(k): v for k, v in self.counts_after_smote.items()},
            "synthetic_created": self.synthetic_created,
            "tomek_pairs_found": self.tomek_pairs_found,
            "majority_removed": self.majority_removed,
        }


def _two_class_counts(d: Dataset) -> dict[int, int]:
    counts = d.class_counts()
    if len(counts) != 2:
        raise DataError(f"resampling requires exactly 2 classes; found {sorted(counts)}")
    return counts


def _minority_majority(counts: dict[int, int]) -> tuple[int, int]:
    # On a tie the positive class is treated as the minority, matching the
    # screening convention that label 0 is the bulk class.
    (a, na), (b, nb) = sorted(counts.items())
    if na == nb:
        return b, a
    return (a, b) if na < nb else (b, a)


def smote(d: Dataset, cfg: ResampleConfig) -> tuple[Dataset, ResampleReport]:
    """Oversample the minority class up to target_ratio * majority count."""
    counts = _two_class_counts(d)
    minority, majority = _minority_majority(counts)
    n_target = int(round(cfg.target_ratio * counts[majority]))
    n_new = n_target - counts[minority]

    if n_new <= 0:
        report = ResampleReport(
            counts_before=counts,
            counts_after_smote=dict(counts),
            synthetic_created=0,
            tomek_pairs_found=0,
            majority_removed=0,
        )
        return d, report

    if counts[minority] < cfg.smote_k + 1:
        raise DataError(
            f"SMOTE with k={cfg.smote_k} needs at least {cfg.smote_k + 1} minority rows; "
            f"class {minority} has {counts[minority]}"
        )

    minority_rows = np.flatnonzero(d.labels == minority)
    x_min = np.ascontiguousarray(d.features[minority_rows])
    neighbor_idx = kneighbors(x_min, x_min, cfg.smote_k, skip_identity=True)

    rng = np.random.default_rng(cfg.seed)
    seeds = rng.integers(0, len(minority_rows), size=n_new)
    picks = rng.integers(0, cfg.smote_k, size=n_new)
    lam = rng.random(n_new)

    p = x_min[seeds]
    q = x_min[neighbor_idx[seeds, picks]]
    synthetic = p + lam[:, None] * (q - p)

    features = np.asfortranarray(np.vstack([d.features, synthetic]))
    labels = np.concatenate([d.labels, np.full(n_new, minority, dtype=d.labels.dtype)])
    out = replace(
        d,
        features=features,
        labels=labels,
        transform_log=d.transform_log
        + (f"smote:k={cfg.smote_k}:ratio={cfg.target_ratio}:seed={cfg.seed}:created={n_new}",),
    )
    after = dict(counts)
    after[minority] += n_new
    report = ResampleReport(
        counts_before=counts,
        counts_after_smote=after,
        synthetic_created=n_new,
        tomek_pairs_found=0,
        majority_removed=0,
    )
    return out, report


def tomek(d: Dataset, majority_label: int | None = None) -> tuple[Dataset, ResampleReport]:
    """Single-pass Tomek-link cleaning: drop majority members of mutual-NN pairs.

    ``majority_label`` defaults to the more frequent class (label 0 on a tie);
    :func:`balance` passes the pre-SMOTE majority explicitly.
    """
    counts = d.class_counts()
    if len(counts) == 1:
        # links need opposite labels, so a one-class table has none
        report = ResampleReport(
            counts_before=counts,
            counts_after_smote=dict(counts),
            synthetic_created=0,
            tomek_pairs_found=0,
            majority_removed=0,
        )
        return d, report
    counts = _two_class_counts(d)
    if majority_label is None:
        _, majority_label = _minority_majority(counts)
    elif majority_label not in counts:
        raise DataError(f"majority_label {majority_label} not present in labels")

    nn = nearest_one(np.ascontiguousarray(d.features))
    labels = d.labels
    idx = np.arange(d.row_count)
    mutual = (nn[nn[idx]] == idx) & (labels != labels[nn[idx]]) & (idx < nn[idx])
    pair_first = np.flatnonzero(mutual)
    pair_second = nn[pair_first]

    remove = np.where(labels[pair_first] == majority_label, pair_first, pair_second)
    n_pairs = int(pair_first.size)
    n_removed = int(remove.size)

    if n_removed == 0:
        out = d
    else:
        mask = np.ones(d.row_count, dtype=bool)
        mask[remove] = False
        out = d.with_rows(np.flatnonzero(mask), log_entry=f"tomek:removed={n_removed}")
    report = ResampleReport(
        counts_before=counts,
        counts_after_smote=dict(counts),
        synthetic_created=0,
        tomek_pairs_found=n_pairs,
        majority_removed=n_removed,
    )
    return out, report


def balance(d: Dataset, cfg: ResampleConfig) -> tuple[Dataset, ResampleReport]:
    """SMOTE then Tomek with a merged report."""
    counts = _two_class_counts(d)
    _, majority = _minority_majority(counts)
    oversampled, smote_report = smote(d, cfg)
    cleaned, tomek_report = tomek(oversampled, majority_label=majority)
    report = ResampleReport(
        counts_before=smote_report.counts_before,
        counts_after_smote=smote_report.counts_after_smote,
        synthetic_created=smote_report.synthetic_created,
        tomek_pairs_found=tomek_report.tomek_pairs_found,
        majority_removed=tomek_report.majority_removed,
    )
    return cleaned, report
