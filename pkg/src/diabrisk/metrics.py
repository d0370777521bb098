"""Binary-classification evaluation: confusion counts, scalar metrics, ROC and
precision-recall sweeps, and permutation importance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DataError

_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # numpy < 2 fallback


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def to_dict(self) -> dict:
        return {"tn": self.tn, "fp": self.fp, "fn": self.fn, "tp": self.tp}


@dataclass(frozen=True)
class ScalarMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    #: names of metrics whose denominator was zero (value forced to 0)
    zero_denominator: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "zero_denominator": list(self.zero_denominator),
        }


@dataclass(frozen=True)
class CurvePoints:
    """Ordered (x, y, threshold) sweep; thresholds descend, anchor uses +inf."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    thresholds: tuple[float, ...]

    def to_rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.xs, self.ys, self.thresholds))

    def to_dict(self) -> dict:
        def encode(t: float) -> float | str:
            return "inf" if np.isinf(t) else float(t)

        return {
            "x": list(self.xs),
            "y": list(self.ys),
            "threshold": [encode(t) for t in self.thresholds],
        }


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    metrics: ScalarMetrics
    roc_auc: float
    pr_auc: float
    roc_curve: CurvePoints
    pr_curve: CurvePoints
    threshold: float = 0.5
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "threshold": self.threshold,
            "confusion": self.confusion.to_dict(),
            "accuracy": self.metrics.accuracy,
            "precision": self.metrics.precision,
            "recall": self.metrics.recall,
            "f1": self.metrics.f1,
            "zero_denominator": list(self.metrics.zero_denominator),
            "roc_auc": self.roc_auc,
            "pr_auc": self.pr_auc,
            "roc_curve": self.roc_curve.to_dict(),
            "pr_curve": self.pr_curve.to_dict(),
        }
        out.update(self.extra)
        return out


def _check_binary(values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values)
    if not np.isin(values, (0, 1)).all():
        raise DataError(f"{what} must contain only 0/1 values")
    return values.astype(np.int64)


def confusion(labels, predictions) -> ConfusionMatrix:
    labels = _check_binary(labels, "labels")
    predictions = _check_binary(predictions, "predictions")
    if labels.shape != predictions.shape:
        raise DataError("labels and predictions must have equal length")
    tp = int(((labels == 1) & (predictions == 1)).sum())
    tn = int(((labels == 0) & (predictions == 0)).sum())
    fp = int(((labels == 0) & (predictions == 1)).sum())
    fn = int(((labels == 1) & (predictions == 0)).sum())
    return ConfusionMatrix(tn=tn, fp=fp, fn=fn, tp=tp)


def scalar_metrics(cm: ConfusionMatrix) -> ScalarMetrics:
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    flags: list[str] = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            flags.append(name)
            return 0.0
        return num / den

    accuracy = (cm.tp + cm.tn) / cm.total
    precision = ratio(cm.tp, cm.tp + cm.fp, "precision")
    recall = ratio(cm.tp, cm.tp + cm.fn, "recall")
    f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn, "f1")
    return ScalarMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        zero_denominator=tuple(flags),
    )


def _sweep(labels: np.ndarray, scores: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative (tp, fp) after each distinct score, descending; ties grouped."""
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    # last position of each tie group
    boundary = np.flatnonzero(np.diff(sorted_scores) != 0.0)
    last = np.concatenate([boundary, [labels.size - 1]])
    tp = np.cumsum(sorted_labels)[last].astype(np.float64)
    fp = (last + 1) - tp
    return tp, fp, sorted_scores[last]


def roc(labels, scores) -> tuple[CurvePoints, float]:
    """ROC sweep and trapezoid AUC (equals the tie-aware pair statistic)."""
    labels = _check_binary(labels, "labels")
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC requires both classes present")
    tp, fp, thresholds = _sweep(labels, scores)
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    thr = np.concatenate([[np.inf], thresholds])
    auc = float(_trapezoid(tpr, fpr))
    curve = CurvePoints(xs=tuple(fpr), ys=tuple(tpr), thresholds=tuple(thr))
    return curve, auc


def pr(labels, scores) -> tuple[CurvePoints, float]:
    """Precision-recall sweep and step-wise (non-interpolated) average precision."""
    labels = _check_binary(labels, "labels")
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DataError("average precision requires at least one positive")
    tp, fp, thresholds = _sweep(labels, scores)
    recall = tp / n_pos
    precision = tp / (tp + fp)
    ap = float(np.sum(np.diff(np.concatenate([[0.0], recall])) * precision))
    curve = CurvePoints(
        xs=(0.0, *recall),
        ys=(1.0, *precision),
        thresholds=(np.inf, *thresholds),
    )
    return curve, ap


def evaluate_scores(labels, scores, threshold: float = 0.5) -> EvalReport:
    """Full evaluation of probability scores against 0/1 labels."""
    scores = np.asarray(scores, dtype=np.float64)
    cm = confusion(labels, (scores >= threshold).astype(np.int64))
    roc_curve, roc_auc = roc(labels, scores)
    pr_curve, pr_auc = pr(labels, scores)
    return EvalReport(
        confusion=cm,
        metrics=scalar_metrics(cm),
        roc_auc=roc_auc,
        pr_auc=pr_auc,
        roc_curve=roc_curve,
        pr_curve=pr_curve,
        threshold=threshold,
    )


def _metric_value(metric: str, labels: np.ndarray, scores: np.ndarray) -> float:
    if metric == "accuracy":
        cm = confusion(labels, (scores >= 0.5).astype(np.int64))
        return scalar_metrics(cm).accuracy
    if metric == "roc_auc":
        return roc(labels, scores)[1]
    raise DataError(f"unknown metric {metric!r}; expected 'accuracy' or 'roc_auc'")


def permutation_importance(
    model,
    data: Dataset,
    metric: str = "accuracy",
    repeats: int = 5,
    seed: int = 0,
) -> dict[str, tuple[float, float]]:
    """Mean and std of the metric drop after shuffling each feature column.

    ``model`` is anything with ``predict_proba(rows) -> probabilities``.
    """
    if repeats < 1:
        raise DataError("repeats must be >= 1")
    baseline = _metric_value(metric, data.labels, model.predict_proba(data.features))
    out: dict[str, tuple[float, float]] = {}
    for j, spec in enumerate(data.schema):
        drops = np.empty(repeats)
        for r in range(repeats):
            rng = np.random.default_rng([seed, j, r])
            permuted = np.array(data.features)
            permuted[:, j] = permuted[rng.permutation(data.row_count), j]
            drops[r] = baseline - _metric_value(metric, data.labels, model.predict_proba(permuted))
        out[spec.name] = (float(drops.mean()), float(drops.std()))
    return out
