"""Stacked generalization with out-of-fold meta-features.

Base models predict each training row from a fold model that never saw it;
the meta-learner trains on those probabilities. Bases are then refitted on
the full training set for inference. Defaults mirror the best-performing
combination: gradient-boosted trees plus KNN under a boosted meta-learner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DataError
from .learners import LearnerSpec, TrainedModel, fit, predict_proba
from .tuning import kfold_indices


@dataclass(frozen=True)
class StackSpec:
    base_specs: tuple[LearnerSpec, ...]
    meta_spec: LearnerSpec
    n_folds: int = 5
    passthrough: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.base_specs) < 1:
            raise DataError("stacking requires at least one base learner")
        if self.n_folds < 2:
            raise DataError("n_folds must be >= 2")


def default_stack_spec(seed: int = 0) -> StackSpec:
    """GBDT 'xgb' preset + KNN bases under a GBDT 'lgbm' preset meta-learner."""
    return StackSpec(
        base_specs=(
            LearnerSpec("gbdt", {"preset": "xgb"}, seed=seed),
            LearnerSpec("knn", {"k": 5}, seed=seed),
        ),
        meta_spec=LearnerSpec("gbdt", {"preset": "lgbm"}, seed=seed),
        n_folds=5,
        seed=seed,
    )


@dataclass(frozen=True)
class StackModel:
    bases: tuple[TrainedModel, ...]
    meta: TrainedModel
    spec: StackSpec
    feature_names: tuple[str, ...] = ()

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return predict_stack(self, rows)

    def predict(self, rows: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(rows) >= threshold).astype(np.int64)


def _base_column_names(base_specs: tuple[LearnerSpec, ...]) -> list[str]:
    return [f"base{i}_{s.family}" for i, s in enumerate(base_specs)]


def oof_matrix(
    base_specs: tuple[LearnerSpec, ...] | list[LearnerSpec],
    train: Dataset,
    n_folds: int,
    seed: int = 0,
) -> np.ndarray:
    """(n_rows, n_bases) matrix of out-of-fold class-1 probabilities."""
    folds = kfold_indices(
        train.row_count, n_folds, labels=train.labels, stratify=True, seed=seed
    )
    matrix = np.empty((train.row_count, len(base_specs)))
    for fold in folds:
        mask = np.zeros(train.row_count, dtype=bool)
        mask[fold] = True
        rest = np.flatnonzero(~mask)
        if np.unique(train.labels[rest]).size < 2:
            raise DataError("fold with single class; reduce n_folds or rebalance")
        fold_train = train.with_rows(rest)
        for b, spec in enumerate(base_specs):
            model = fit(spec, fold_train)
            matrix[fold, b] = predict_proba(model, train.features[fold])
    return matrix


def fit_stack(spec: StackSpec, train: Dataset) -> StackModel:
    """Meta-learner on OOF probabilities; bases refit on the full set."""
    oof = oof_matrix(spec.base_specs, train, spec.n_folds, spec.seed)
    meta_features = oof
    meta_names = _base_column_names(spec.base_specs)
    if spec.passthrough:
        meta_features = np.hstack([oof, train.features])
        meta_names = meta_names + list(train.feature_names)
    meta_train = Dataset.from_arrays(meta_features, train.labels, names=meta_names)
    meta = fit(spec.meta_spec, meta_train)
    bases = tuple(fit(base_spec, train) for base_spec in spec.base_specs)
    return StackModel(bases=bases, meta=meta, spec=spec, feature_names=train.feature_names)


def predict_stack(m: StackModel, rows: np.ndarray) -> np.ndarray:
    """Class-1 probabilities: refitted-base probabilities fed to the meta."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[None, :]
    base_probs = np.column_stack([predict_proba(b, rows) for b in m.bases])
    meta_input = np.hstack([base_probs, rows]) if m.spec.passthrough else base_probs
    return predict_proba(m.meta, meta_input)
