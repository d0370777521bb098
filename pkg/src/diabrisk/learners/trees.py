"""Tree-based learners: CART decision tree, bagged random forest, and a
histogram gradient-boosted tree engine with Newton updates on logistic loss.

All three share the same quantile-binned grower. The GBDT presets stand in
for the boosted-library zoo: they differ only in depth, bin count, shrinkage,
and regularization defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, TrainingError
from ._binning import BinnedFeatures
from ._tree_kernels import GINI, NEWTON, grow_tree, predict_tree


@dataclass(frozen=True)
class DecisionTree:
    """Flat array encoding of one fitted tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_value: np.ndarray
    gain: np.ndarray
    count: np.ndarray

    def add_predictions(self, rows: np.ndarray, out: np.ndarray) -> None:
        predict_tree(self.feature, self.threshold, self.left, self.right,
                     self.leaf_value, rows, out)

    def importance(self, n_features: int, weight_by_count: bool) -> np.ndarray:
        imp = np.zeros(n_features)
        root = max(int(self.count[0]), 1)
        for node in range(self.feature.size):
            f = int(self.feature[node])
            if f < 0:
                continue
            scale = self.count[node] / root if weight_by_count else 1.0
            imp[f] += scale * self.gain[node]
        return imp


@dataclass(frozen=True)
class GbdtParams:
    n_trees: int = 300
    max_depth: int = 6
    learning_rate: float = 0.1
    min_child_weight: float = 1.0
    l2_reg: float = 1.0
    max_bins: int = 256
    subsample: float = 1.0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise DataError("n_trees must be >= 1")
        if self.max_bins < 2:
            raise DataError("max_bins must be >= 2")
        if not 0.0 < self.subsample <= 1.0:
            raise DataError("subsample must lie in (0, 1]")
        if self.learning_rate <= 0.0:
            raise DataError("learning_rate must be positive")
        if self.max_depth < 1:
            raise DataError("max_depth must be >= 1")
        if self.min_child_weight < 0.0 or self.l2_reg < 0.0:
            raise DataError("min_child_weight and l2_reg must be non-negative")


#: Named default bundles standing in for XGBoost / LightGBM / CatBoost /
#: classic GradientBoosting. Library-specific behavior is not emulated.
GBDT_PRESETS: dict[str, GbdtParams] = {
    "xgb": GbdtParams(n_trees=300, max_depth=6, learning_rate=0.1,
                      min_child_weight=1.0, l2_reg=1.0, max_bins=256, subsample=1.0),
    "lgbm": GbdtParams(n_trees=300, max_depth=8, learning_rate=0.1,
                       min_child_weight=1e-3, l2_reg=0.0, max_bins=255, subsample=1.0),
    "cat": GbdtParams(n_trees=400, max_depth=6, learning_rate=0.08,
                      min_child_weight=1.0, l2_reg=3.0, max_bins=254, subsample=1.0),
    "gb": GbdtParams(n_trees=200, max_depth=3, learning_rate=0.1,
                     min_child_weight=1.0, l2_reg=0.0, max_bins=256, subsample=1.0),
}


def _node_cap(max_depth: int, n_rows: int) -> int:
    if max_depth >= 40:
        return 2 * n_rows + 1
    return min(2 ** (max_depth + 1) - 1, 2 * n_rows + 1)


def _resolve_mtry(max_features, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, math.isqrt(n_features))
    mtry = int(max_features)
    if not 1 <= mtry <= n_features:
        raise DataError(f"max_features must lie in [1, {n_features}]")
    return mtry


def _grow(binned: BinnedFeatures, g, h, sample_idx, *, max_depth, min_samples_split,
          min_child_hess, l2, criterion, mtry, seed) -> DecisionTree:
    feature, split_bin, left, right, leaf_value, gain, count = grow_tree(
        binned.codes, binned.offsets, g, h, sample_idx,
        max_depth, min_samples_split, min_child_hess, float(l2),
        criterion, mtry, np.uint64(seed & (2**64 - 1)), _node_cap(max_depth, sample_idx.size),
    )
    threshold = np.zeros(feature.size, dtype=np.float64)
    for node in range(feature.size):
        if feature[node] >= 0:
            threshold[node] = binned.threshold_value(int(feature[node]), int(split_bin[node]))
    return DecisionTree(feature=feature, threshold=threshold, left=left, right=right,
                        leaf_value=leaf_value, gain=gain, count=count)


@dataclass(frozen=True)
class TreeModel:
    tree: DecisionTree
    n_features: int

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        out = np.zeros(rows.shape[0])
        self.tree.add_predictions(np.ascontiguousarray(rows, dtype=np.float64), out)
        return out

    def importances(self) -> np.ndarray:
        return self.tree.importance(self.n_features, weight_by_count=True)


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[DecisionTree, ...]
    n_features: int

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        out = np.zeros(rows.shape[0])
        for tree in self.trees:
            tree.add_predictions(rows, out)
        return out / len(self.trees)

    def importances(self) -> np.ndarray:
        total = np.zeros(self.n_features)
        for tree in self.trees:
            total += tree.importance(self.n_features, weight_by_count=True)
        return total / len(self.trees)


@dataclass(frozen=True)
class GbdtModel:
    trees: tuple[DecisionTree, ...]  # leaf values already scaled by learning_rate
    base_score: float
    params: GbdtParams
    n_features: int
    train_log_loss: tuple[float, ...] = field(default_factory=tuple)

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        raw = np.full(rows.shape[0], self.base_score)
        for tree in self.trees:
            tree.add_predictions(rows, raw)
        return raw

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(rows))

    def importances(self) -> np.ndarray:
        total = np.zeros(self.n_features)
        for tree in self.trees:
            total += tree.importance(self.n_features, weight_by_count=False)
        return total


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_gradient_hessian(raw: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row gradient p - y and hessian p(1-p) of the logistic loss."""
    p = _sigmoid(raw)
    return p - y, p * (1.0 - p)


def fit_tree(x: np.ndarray, y: np.ndarray, *, max_depth=10, min_samples_split=2,
             min_samples_leaf=1, max_bins=256, max_features=None, seed=0) -> TreeModel:
    binned = BinnedFeatures(x, max_bins)
    tree = _grow(
        binned, y.astype(np.float64), np.ones(x.shape[0]), np.arange(x.shape[0], dtype=np.int64),
        max_depth=max_depth, min_samples_split=min_samples_split,
        min_child_hess=float(min_samples_leaf), l2=0.0, criterion=GINI,
        mtry=_resolve_mtry(max_features, x.shape[1]), seed=seed,
    )
    return TreeModel(tree=tree, n_features=x.shape[1])


def fit_forest(x: np.ndarray, y: np.ndarray, *, n_trees=100, max_depth=10,
               min_samples_split=2, min_samples_leaf=1, max_bins=256,
               max_features="sqrt", bootstrap=True, seed=0) -> ForestModel:
    if n_trees < 1:
        raise DataError("n_trees must be >= 1")
    binned = BinnedFeatures(x, max_bins)
    n = x.shape[0]
    y_f = y.astype(np.float64)
    ones = np.ones(n)
    mtry = _resolve_mtry(max_features, x.shape[1])
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        idx = rng.integers(0, n, n) if bootstrap else np.arange(n, dtype=np.int64)
        node_seed = int(rng.integers(0, 2**63))
        trees.append(
            _grow(binned, y_f, ones, idx.astype(np.int64), max_depth=max_depth,
                  min_samples_split=min_samples_split, min_child_hess=float(min_samples_leaf),
                  l2=0.0, criterion=GINI, mtry=mtry, seed=node_seed)
        )
    return ForestModel(trees=tuple(trees), n_features=x.shape[1])


def fit_gbdt(x: np.ndarray, y: np.ndarray, params: GbdtParams, seed: int = 0) -> GbdtModel:
    n, p = x.shape
    binned = BinnedFeatures(x, params.max_bins)
    y_f = y.astype(np.float64)
    mean = min(max(float(y_f.mean()), 1e-12), 1.0 - 1e-12)
    base_score = math.log(mean / (1.0 - mean))
    raw = np.full(n, base_score)
    full_idx = np.arange(n, dtype=np.int64)
    trees = []
    losses = []
    for t in range(params.n_trees):
        g, h = logistic_gradient_hessian(raw, y_f)
        losses.append(float(np.mean(np.logaddexp(0.0, raw) - y_f * raw)))
        if params.subsample < 1.0:
            rng = np.random.default_rng([seed, t])
            take = max(1, int(round(params.subsample * n)))
            idx = np.sort(rng.choice(n, size=take, replace=False)).astype(np.int64)
        else:
            idx = full_idx
        tree = _grow(binned, g, h, idx, max_depth=params.max_depth, min_samples_split=2,
                     min_child_hess=params.min_child_weight, l2=params.l2_reg,
                     criterion=NEWTON, mtry=p, seed=seed + t)
        tree = DecisionTree(
            feature=tree.feature, threshold=tree.threshold, left=tree.left, right=tree.right,
            leaf_value=tree.leaf_value * params.learning_rate, gain=tree.gain, count=tree.count,
        )
        tree.add_predictions(np.ascontiguousarray(x), raw)
        trees.append(tree)
    losses.append(float(np.mean(np.logaddexp(0.0, raw) - y_f * raw)))
    if not np.isfinite(raw).all():
        raise TrainingError("boosting diverged to non-finite scores")
    return GbdtModel(trees=tuple(trees), base_score=base_score, params=params,
                     n_features=p, train_log_loss=tuple(losses))
