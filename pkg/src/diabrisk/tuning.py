"""Hyperparameter search: stratified k-fold CV scoring, randomized search
over mixed domains, and exhaustive grid search for refinement."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DataError
from .learners import LearnerSpec, fit, predict_proba
from .metrics import _metric_value


@dataclass(frozen=True)
class Choice:
    values: tuple

    def __post_init__(self) -> None:
        if not self.values:
            raise DataError("Choice domain must be non-empty")

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int  # inclusive

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DataError("IntRange bounds must be ordered")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class LogUniform:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0 < self.lo <= self.hi:
            raise DataError("LogUniform bounds must be positive and ordered")


#: SearchSpace = {hyperparameter name: Choice | IntRange | LogUniform}
SearchSpace = dict


#: Documented default search spaces used by the CLI `tune` command.
DEFAULT_SPACES: dict[str, SearchSpace] = {
    "logreg": {"l2": LogUniform(1e-4, 100.0)},
    "linear_svc": {"l2": LogUniform(1e-6, 1e-2), "epochs": IntRange(100, 1000)},
    "gaussian_nb": {"var_floor": LogUniform(1e-12, 1e-6)},
    "knn": {"k": IntRange(3, 25)},
    "tree": {"max_depth": IntRange(2, 16), "min_samples_leaf": IntRange(1, 32)},
    "random_forest": {"n_trees": IntRange(50, 200), "max_depth": IntRange(4, 16)},
    "gbdt": {
        "n_trees": IntRange(50, 300),
        "max_depth": IntRange(3, 8),
        "learning_rate": LogUniform(0.03, 0.3),
        "l2_reg": LogUniform(1e-3, 10.0),
    },
}


@dataclass(frozen=True)
class CvResult:
    params: dict
    fold_values: tuple[float, ...]
    mean: float
    std: float

    def to_dict(self) -> dict:
        return {
            "params": dict(self.params),
            "fold_values": list(self.fold_values),
            "mean": self.mean,
            "std": self.std,
        }


def kfold_indices(
    n: int,
    k: int,
    labels: np.ndarray | None = None,
    stratify: bool = False,
    seed: int = 0,
) -> list[np.ndarray]:
    """k disjoint index sets covering 0..n-1; sizes differ by at most 1.

    With stratification, each class's fold counts also differ by at most 1;
    the per-class remainders rotate across folds so overall sizes stay even.
    """
    if not 2 <= k <= n:
        raise DataError(f"k must lie in [2, {n}]")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    if stratify:
        if labels is None:
            raise DataError("stratified folding requires labels")
        extra_ptr = 0
        for value in np.unique(labels):
            class_idx = rng.permutation(np.flatnonzero(labels == value))
            base, rem = divmod(class_idx.size, k)
            gets_extra = {(extra_ptr + i) % k for i in range(rem)}
            pos = 0
            for f in range(k):
                size = base + (1 if f in gets_extra else 0)
                folds[f].extend(class_idx[pos : pos + size].tolist())
                pos += size
            extra_ptr = (extra_ptr + rem) % k
    else:
        order = rng.permutation(n)
        base, rem = divmod(n, k)
        pos = 0
        for f in range(k):
            size = base + (1 if f < rem else 0)
            folds[f].extend(order[pos : pos + size].tolist())
            pos += size
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def cross_val_score(
    spec: LearnerSpec, train: Dataset, cv_k: int, metric: str, seed: int = 0
) -> CvResult:
    """Mean +- std of ``metric`` over stratified folds."""
    folds = kfold_indices(train.row_count, cv_k, labels=train.labels, stratify=True, seed=seed)
    all_idx = np.arange(train.row_count)
    values = []
    for fold in folds:
        mask = np.zeros(train.row_count, dtype=bool)
        mask[fold] = True
        model = fit(spec, train.with_rows(all_idx[~mask]))
        scores = predict_proba(model, train.features[fold])
        values.append(_metric_value(metric, train.labels[fold], scores))
    values = np.asarray(values)
    return CvResult(
        params=dict(spec.hyperparameters),
        fold_values=tuple(float(v) for v in values),
        mean=float(values.mean()),
        std=float(values.std()),
    )


def _finite_sizes(space: SearchSpace) -> int | None:
    total = 1
    for domain in space.values():
        if isinstance(domain, LogUniform):
            return None
        total *= domain.size
    return total


def _combo_at(space: SearchSpace, index: int) -> dict:
    """Mixed-radix decode of a lexicographic combination index."""
    params = {}
    for name in sorted(space, reverse=True):
        domain = space[name]
        index, digit = divmod(index, domain.size)
        params[name] = (
            domain.values[digit] if isinstance(domain, Choice) else domain.lo + digit
        )
    return params


def _sample_params(space: SearchSpace, rng: np.random.Generator) -> dict:
    params = {}
    for name in sorted(space):
        domain = space[name]
        if isinstance(domain, Choice):
            params[name] = domain.values[rng.integers(0, domain.size)]
        elif isinstance(domain, IntRange):
            params[name] = int(rng.integers(domain.lo, domain.hi + 1))
        else:
            params[name] = float(np.exp(rng.uniform(math.log(domain.lo), math.log(domain.hi))))
    return params


def random_search(
    spec_family: str,
    space: SearchSpace,
    budget: int,
    cv_k: int,
    metric: str,
    train: Dataset,
    seed: int = 0,
) -> tuple[dict, list[CvResult]]:
    """Randomized CV search; finite spaces are sampled without replacement."""
    if budget < 1:
        raise DataError("budget must be >= 1")
    if not space:
        raise DataError("search space is empty")
    rng = np.random.default_rng(seed)
    total = _finite_sizes(space)
    if total is not None:
        n_candidates = min(budget, total)
        picks = rng.choice(total, size=n_candidates, replace=False)
        candidates = [_combo_at(space, int(i)) for i in picks]
    else:
        candidates = [_sample_params(space, rng) for _ in range(budget)]

    results = [
        cross_val_score(
            LearnerSpec(spec_family, hyperparameters=params, seed=seed), train, cv_k, metric, seed
        )
        for params in candidates
    ]
    best = max(range(len(results)), key=lambda i: results[i].mean)  # ties: first sampled
    return dict(results[best].params), results


def grid_search(
    spec_family: str,
    grid: dict[str, list],
    cv_k: int,
    metric: str,
    train: Dataset,
    seed: int = 0,
) -> tuple[dict, list[CvResult]]:
    """Exhaustive CV search over the Cartesian product of the grid."""
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise DataError("grid must be non-empty")
    names = sorted(grid)
    results = []
    for combo in itertools.product(*[grid[name] for name in names]):
        params = dict(zip(names, combo))
        results.append(
            cross_val_score(
                LearnerSpec(spec_family, hyperparameters=params, seed=seed),
                train,
                cv_k,
                metric,
                seed,
            )
        )
    best = max(range(len(results)), key=lambda i: results[i].mean)
    return dict(results[best].params), results


def neighborhood_grid(space: SearchSpace, best_params: dict) -> dict[str, list]:
    """Refinement grid of +-1 neighbors (or x/1.5 steps) around a winner.

    The winner itself is always a member, so the grid's best CV mean can
    never fall below the winner's score.
    """
    grid: dict[str, list] = {}
    for name, value in best_params.items():
        domain = space[name]
        if isinstance(domain, IntRange):
            grid[name] = [v for v in (value - 1, value, value + 1) if domain.lo <= v <= domain.hi]
        elif isinstance(domain, Choice):
            values = list(domain.values)
            i = values.index(value)
            lo, hi = max(i - 1, 0), min(i + 1, len(values) - 1)
            grid[name] = values[lo : hi + 1]
        else:
            candidates = [value / 1.5, value, value * 1.5]
            grid[name] = sorted(
                {min(max(c, domain.lo), domain.hi) for c in candidates}
            )
    return grid


@dataclass(frozen=True)
class SearchTrace:
    """Audit record of a two-stage search, exportable to JSON."""

    family: str
    metric: str
    random_results: tuple[CvResult, ...]
    grid_results: tuple[CvResult, ...]
    best_params: dict
    best_mean: float
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "metric": self.metric,
            "seed": self.seed,
            "random_results": [r.to_dict() for r in self.random_results],
            "grid_results": [r.to_dict() for r in self.grid_results],
            "best_params": dict(self.best_params),
            "best_mean": self.best_mean,
            **self.extra,
        }


def two_stage_search(
    spec_family: str,
    space: SearchSpace,
    train: Dataset,
    budget: int = 25,
    cv_k: int = 5,
    metric: str = "roc_auc",
    seed: int = 0,
) -> SearchTrace:
    """Randomized exploration followed by a +-1-neighbor grid refinement."""
    rand_best, rand_results = random_search(spec_family, space, budget, cv_k, metric, train, seed)
    grid = neighborhood_grid(space, rand_best)
    grid_best, grid_results = grid_search(spec_family, grid, cv_k, metric, train, seed)
    candidates = list(rand_results) + list(grid_results)
    best = max(range(len(candidates)), key=lambda i: candidates[i].mean)
    return SearchTrace(
        family=spec_family,
        metric=metric,
        random_results=tuple(rand_results),
        grid_results=tuple(grid_results),
        best_params=dict(candidates[best].params),
        best_mean=candidates[best].mean,
        seed=seed,
    )
