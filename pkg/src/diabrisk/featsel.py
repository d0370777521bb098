"""Ensemble feature selection: mutual information, recursive feature
elimination, and LASSO, aggregated by normalized mean rank.

Every method produces a full permutation ranking (1 = best) with
deterministic lexicographic tie-breaking; the aggregate score is the mean of
(rank - 1)/(p - 1) across methods, so 0 is best and 1 is worst.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError, TrainingError
from .learners.linear import fit_logreg


@dataclass(frozen=True)
class MethodRanking:
    method: str  # "MI" | "RFE" | "LASSO"
    rank_of: dict[str, int]
    score_of: dict[str, float]

    def __post_init__(self) -> None:
        ranks = sorted(self.rank_of.values())
        if ranks != list(range(1, len(ranks) + 1)):
            raise DataError(f"{self.method} ranks must be a permutation of 1..p")

    def to_dict(self) -> dict:
        return {"method": self.method, "rank": dict(self.rank_of), "score": dict(self.score_of)}


@dataclass(frozen=True)
class FeatureRanking:
    methods: tuple[MethodRanking, ...]
    aggregate_score: dict[str, float]
    selected: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "methods": [m.to_dict() for m in self.methods],
            "aggregate_score": dict(self.aggregate_score),
            "selected": list(self.selected),
        }

    def format_table(self) -> str:
        names = sorted(self.aggregate_score, key=lambda n: (self.aggregate_score[n], n))
        headers = ["feature", *[m.method for m in self.methods], "aggregate", "selected"]
        rows = [headers]
        for name in names:
            rows.append(
                [
                    name,
                    *[str(m.rank_of[name]) for m in self.methods],
                    f"{self.aggregate_score[name]:.4f}",
                    "*" if name in self.selected else "",
                ]
            )
        widths = [max(len(r[c]) for r in rows) for c in range(len(headers))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)


@dataclass(frozen=True)
class LassoFit:
    coefficients: np.ndarray  # on internally standardized features
    intercept: float
    lam: float
    iterations_run: int
    converged: bool


def _rank_by_score(names, scores, descending: bool = True) -> dict[str, int]:
    """Ranks 1..p by score; equal scores tie-break lexicographically."""
    key = (lambda n: (-scores[n], n)) if descending else (lambda n: (scores[n], n))
    ordered = sorted(names, key=key)
    return {name: i + 1 for i, name in enumerate(ordered)}


def _discretize(column: np.ndarray, bins: int) -> np.ndarray:
    """Quantile-bin codes for a continuous column (at most ``bins`` bins)."""
    edges = np.unique(np.quantile(column, np.linspace(0.0, 1.0, bins + 1)[1:-1]))
    return np.searchsorted(edges, column, side="left")


def mutual_information_nats(x_codes: np.ndarray, y_codes: np.ndarray) -> float:
    """Plug-in MI of two discrete code vectors, in nats."""
    n = x_codes.size
    x_vals, x_inv = np.unique(x_codes, return_inverse=True)
    y_vals, y_inv = np.unique(y_codes, return_inverse=True)
    joint = np.zeros((x_vals.size, y_vals.size))
    np.add.at(joint, (x_inv, y_inv), 1.0)
    joint /= n
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    outer = px[:, None] * py[None, :]
    return float((joint[nz] * np.log(joint[nz] / outer[nz])).sum())


def mutual_info(d: Dataset, bins: int = 10) -> MethodRanking:
    """Rank features by plug-in mutual information with the label."""
    if np.isnan(d.features).any():
        raise DataError("mutual_info requires no missing values")
    if np.unique(d.labels).size < 2:
        raise DataError("label has one class")
    scores = {}
    for j, spec in enumerate(d.schema):
        column = d.features[:, j]
        codes = _discretize(column, bins) if spec.kind == "continuous" else column
        scores[spec.name] = mutual_information_nats(codes, d.labels)
    return MethodRanking(method="MI", rank_of=_rank_by_score(scores, scores), score_of=scores)


def rfe(d: Dataset, keep: int) -> MethodRanking:
    """Recursive elimination of the smallest-|coefficient| feature per round,
    using L2-regularized logistic regression on standardized features."""
    if keep < 1:
        raise DataError("keep must be >= 1")
    p = d.n_features
    keep = min(keep, p)
    x = np.ascontiguousarray(d.features, dtype=np.float64)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    x = (x - mean) / np.where(std == 0.0, 1.0, std)
    y = d.labels.astype(np.int64)

    names = list(d.feature_names)
    surviving = list(range(p))
    eliminated: list[int] = []
    scores: dict[str, float] = {}
    while len(surviving) > keep:
        model = fit_logreg(x[:, surviving], y)
        if not model.converged:
            raise TrainingError(
                f"RFE base estimator failed to converge within {model.n_iter} iterations"
            )
        weights = np.abs(model.weights)
        worst = min(
            range(len(surviving)), key=lambda i: (weights[i], names[surviving[i]])
        )
        scores[names[surviving[worst]]] = float(weights[worst])
        eliminated.append(surviving.pop(worst))

    final = fit_logreg(x[:, surviving], y)
    if not final.converged:
        raise TrainingError(
            f"RFE base estimator failed to converge within {final.n_iter} iterations"
        )
    for i, col in enumerate(surviving):
        scores[names[col]] = float(abs(final.weights[i]))

    rank_of: dict[str, int] = {}
    for i, col in enumerate(sorted(surviving, key=lambda c: names[c])):
        rank_of[names[col]] = i + 1  # survivors tie at the top, broken lexicographically
    for i, col in enumerate(reversed(eliminated)):
        rank_of[names[col]] = keep + 1 + i  # later eliminations rank better
    return MethodRanking(method="RFE", rank_of=rank_of, score_of=scores)


def _standardized(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    x = np.ascontiguousarray(d.features, dtype=np.float64)
    std = x.std(axis=0)
    x = (x - x.mean(axis=0)) / np.where(std == 0.0, 1.0, std)
    return x, d.labels.astype(np.float64)


def lasso_lambda_max(d: Dataset) -> float:
    """Smallest penalty at which every LASSO coefficient is exactly zero.

    Uses the same per-column dot products as the coordinate-descent loop so
    the zero threshold holds bit-exactly, not just to rounding.
    """
    x, y = _standardized(d)
    centered = y - y.mean()
    n = x.shape[0]
    return max(abs(float(x[:, j] @ centered)) / n for j in range(x.shape[1]))


def soft_threshold(z: float, lam: float) -> float:
    return float(np.sign(z) * max(abs(z) - lam, 0.0))


def lasso_fit(d: Dataset, lam: float, tol: float = 1e-7, max_sweeps: int = 10000) -> LassoFit:
    """Cyclic coordinate descent on (1/2n)||y - Xb - c||^2 + lam*||b||_1.

    Features are standardized internally; the 0/1 label is the regression
    target. Converges when no coordinate moves more than ``tol`` in a sweep.
    """
    if lam < 0:
        raise DataError("lambda must be non-negative")
    x, y = _standardized(d)
    n, p = x.shape
    intercept = float(y.mean())
    beta = np.zeros(p)
    residual = y - intercept  # y - intercept - X @ beta, maintained incrementally
    col_scale = np.einsum("ij,ij->j", x, x) / n  # z_j; 1 for non-constant columns

    sweeps = 0
    converged = False
    for sweeps in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(p):
            if col_scale[j] == 0.0:
                continue
            old = beta[j]
            rho = float(x[:, j] @ residual) / n + col_scale[j] * old
            new = soft_threshold(rho, lam) / col_scale[j]
            if new != old:
                residual -= (new - old) * x[:, j]
                beta[j] = new
            max_delta = max(max_delta, abs(new - old))
        if max_delta < tol:
            converged = True
            break
    return LassoFit(
        coefficients=beta,
        intercept=intercept,
        lam=lam,
        iterations_run=sweeps,
        converged=converged,
    )


def lasso_objective(d: Dataset, fit: LassoFit) -> float:
    x, y = _standardized(d)
    residual = y - fit.intercept - x @ fit.coefficients
    return float((residual @ residual) / (2 * x.shape[0]) + fit.lam * np.abs(fit.coefficients).sum())


def lasso_rank(d: Dataset) -> MethodRanking:
    """Rank by |coefficient| of a LASSO fit at lambda_max/100."""
    lam = lasso_lambda_max(d) / 100.0
    fit = lasso_fit(d, lam)
    scores = {
        spec.name: float(abs(fit.coefficients[j])) for j, spec in enumerate(d.schema)
    }
    return MethodRanking(method="LASSO", rank_of=_rank_by_score(scores, scores), score_of=scores)


def aggregate(rankings: list[MethodRanking], keep: int) -> FeatureRanking:
    """Mean normalized rank across methods; lowest ``keep`` scores selected."""
    if not rankings:
        raise DataError("at least one method ranking is required")
    names = set(rankings[0].rank_of)
    for r in rankings[1:]:
        if set(r.rank_of) != names:
            raise DataError("method rankings cover different feature sets")
    p = len(names)
    if keep < 1:
        raise DataError("keep must be >= 1")
    keep = min(keep, p)
    aggregate_score = {
        name: (
            0.0
            if p == 1
            else float(np.mean([(r.rank_of[name] - 1) / (p - 1) for r in rankings]))
        )
        for name in names
    }
    selected = sorted(names, key=lambda n: (aggregate_score[n], n))[:keep]
    return FeatureRanking(
        methods=tuple(rankings),
        aggregate_score=aggregate_score,
        selected=tuple(selected),
    )


def select_features(d: Dataset, keep: int, bins: int = 10) -> FeatureRanking:
    """Run all three methods and aggregate."""
    return aggregate([mutual_info(d, bins), rfe(d, keep), lasso_rank(d)], keep)
