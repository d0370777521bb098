"""Trainable learner zoo behind a single spec-driven interface.

Families: logreg, linear_svc, gaussian_nb, knn, tree, random_forest, gbdt.
Every family is fit from a :class:`LearnerSpec` (validated hyperparameters +
seed) and returns a :class:`TrainedModel` whose ``predict_proba`` emits the
class-1 probability per row.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from ..data import Dataset
from ..errors import DataError, DiabriskError, TrainingError
from .bayes import GaussianNbModel, fit_gaussian_nb
from .knn import KnnModel, fit_knn
from .linear import LinearSvcModel, LogisticModel, fit_linear_svc, fit_logreg
from .trees import (
    GBDT_PRESETS,
    ForestModel,
    GbdtModel,
    GbdtParams,
    TreeModel,
    fit_forest,
    fit_gbdt,
    fit_tree,
)

__all__ = [
    "GBDT_PRESETS",
    "GbdtParams",
    "LearnerSpec",
    "TrainedModel",
    "feature_importance",
    "fit",
    "predict",
    "predict_proba",
]

#: Full hyperparameter surface per family, with defaults.
FAMILY_DEFAULTS: dict[str, dict] = {
    "logreg": {"l2": 1.0, "tol": 1e-8, "max_iter": 100},
    "linear_svc": {"l2": 1e-4, "epochs": 500},
    "gaussian_nb": {"var_floor": 1e-9},
    "knn": {"k": 5},
    "tree": {
        "max_depth": 10,
        "min_samples_split": 2,
        "min_samples_leaf": 1,
        "max_bins": 256,
        "max_features": None,
    },
    "random_forest": {
        "n_trees": 100,
        "max_depth": 10,
        "min_samples_split": 2,
        "min_samples_leaf": 1,
        "max_bins": 256,
        "max_features": "sqrt",
        "bootstrap": True,
    },
    "gbdt": {"preset": "xgb"},  # plus any GbdtParams field as an override
}

_GBDT_FIELDS = {f.name for f in fields(GbdtParams)}


@dataclass(frozen=True)
class LearnerSpec:
    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILY_DEFAULTS:
            raise DataError(
                f"unknown learner family {self.family!r}; "
                f"expected one of {sorted(FAMILY_DEFAULTS)}"
            )
        allowed = set(FAMILY_DEFAULTS[self.family])
        if self.family == "gbdt":
            allowed |= _GBDT_FIELDS
        unknown = set(self.hyperparameters) - allowed
        if unknown:
            raise DataError(
                f"unknown hyperparameters for {self.family}: {sorted(unknown)}; "
                f"allowed: {sorted(allowed)}"
            )
        if self.family == "gbdt":
            preset = self.hyperparameters.get("preset", "xgb")
            if preset not in GBDT_PRESETS:
                raise DataError(f"unknown gbdt preset {preset!r}; expected {sorted(GBDT_PRESETS)}")

    def resolved(self) -> dict:
        params = dict(FAMILY_DEFAULTS[self.family])
        params.update(self.hyperparameters)
        return params

    def gbdt_params(self) -> GbdtParams:
        params = self.resolved()
        base = GBDT_PRESETS[params.pop("preset")]
        return replace(base, **{k: v for k, v in params.items() if k in _GBDT_FIELDS})


@dataclass(frozen=True)
class TrainedModel:
    family: str
    params: dict
    model: object
    feature_names: tuple[str, ...]
    seed: int
    metadata: dict = field(default_factory=dict)

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return predict_proba(self, rows)

    def predict(self, rows: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return predict(self, rows, threshold)


def _validate_training_input(spec: LearnerSpec, train: Dataset) -> tuple[np.ndarray, np.ndarray]:
    if train.row_count == 0:
        raise TrainingError("cannot fit on an empty dataset")
    x = np.ascontiguousarray(train.features, dtype=np.float64)
    if not np.isfinite(x).all():
        raise TrainingError("training features contain non-finite values")
    y = train.labels.astype(np.int64)
    if spec.family != "knn" and np.unique(y).size < 2:
        raise TrainingError(f"{spec.family} requires both classes in the training data")
    return x, y


def fit(spec: LearnerSpec, train: Dataset) -> TrainedModel:
    x, y = _validate_training_input(spec, train)
    params = spec.resolved()
    family = spec.family
    if family == "logreg":
        model = fit_logreg(x, y, **params)
    elif family == "linear_svc":
        model = fit_linear_svc(x, y, **params)
    elif family == "gaussian_nb":
        model = fit_gaussian_nb(x, y, **params)
    elif family == "knn":
        model = fit_knn(x, y, **params)
    elif family == "tree":
        model = fit_tree(x, y, seed=spec.seed, **params)
    elif family == "random_forest":
        model = fit_forest(x, y, seed=spec.seed, **params)
    else:
        model = fit_gbdt(x, y, spec.gbdt_params(), seed=spec.seed)
    return TrainedModel(
        family=family,
        params=params,
        model=model,
        feature_names=train.feature_names,
        seed=spec.seed,
        metadata={"n_rows": train.row_count, "class_counts": train.class_counts()},
    )


def _check_width(m: TrainedModel, rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[1] != len(m.feature_names):
        raise DataError(
            f"expected {len(m.feature_names)} feature columns, got {rows.shape[1]}"
        )
    return rows


def predict_proba(m: TrainedModel, rows: np.ndarray) -> np.ndarray:
    """Class-1 probability per row."""
    rows = _check_width(m, rows)
    return np.clip(m.model.predict_proba(rows), 0.0, 1.0)


def predict(m: TrainedModel, rows: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Hard labels: 1 iff probability >= threshold."""
    return (predict_proba(m, rows) >= threshold).astype(np.int64)


def feature_importance(m: TrainedModel) -> dict[str, float]:
    """Native importances: |weights| for linear, total gain for trees."""
    if isinstance(m.model, (LogisticModel, LinearSvcModel)):
        values = np.abs(m.model.weights)
    elif isinstance(m.model, (TreeModel, ForestModel, GbdtModel)):
        values = m.model.importances()
    elif isinstance(m.model, KnnModel):
        raise DiabriskError(
            "knn has no native feature importance; use metrics.permutation_importance"
        )
    elif isinstance(m.model, GaussianNbModel):
        raise DiabriskError(
            "gaussian_nb has no native feature importance; use metrics.permutation_importance"
        )
    else:
        raise DiabriskError(f"unsupported model payload {type(m.model).__name__}")
    return {name: float(v) for name, v in zip(m.feature_names, values)}
