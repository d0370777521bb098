"""Linear classifiers: logistic regression via damped IRLS (Newton) and a
linear SVC trained by full-batch subgradient descent with iterate averaging,
calibrated to probabilities by a one-dimensional logistic link."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TrainingError


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    n_iter: int
    converged: bool
    gradient_norm: float

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self.weights + self.intercept

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(rows))


def _logreg_loss(x, y, w, b, l2, n):
    z = x @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w) / n)


def fit_logreg(
    x: np.ndarray,
    y: np.ndarray,
    l2: float = 1.0,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> LogisticModel:
    """Minimize mean log-loss + 0.5*l2*||w||^2/n by damped Newton steps.

    Stops when the full gradient's Euclidean norm drops below ``tol``;
    otherwise returns with ``converged=False`` after ``max_iter`` iterations.
    """
    n, p = x.shape
    y = y.astype(np.float64)
    w = np.zeros(p)
    b = 0.0
    gnorm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        prob = _sigmoid(x @ w + b)
        grad_w = x.T @ (prob - y) / n + l2 * w / n
        grad_b = float(np.mean(prob - y))
        gnorm = float(np.sqrt(grad_w @ grad_w + grad_b * grad_b))
        if gnorm < tol:
            return LogisticModel(w, b, it - 1, True, gnorm)

        weight = prob * (1.0 - prob) + 1e-12
        xw = x * weight[:, None]
        hess = np.empty((p + 1, p + 1))
        hess[:p, :p] = x.T @ xw / n
        hess[:p, :p].flat[:: p + 1] += l2 / n
        cross = x.T @ weight / n
        hess[:p, p] = cross
        hess[p, :p] = cross
        hess[p, p] = float(weight.mean())
        step = np.linalg.solve(hess, np.concatenate([grad_w, [grad_b]]))

        loss0 = _logreg_loss(x, y, w, b, l2, n)
        alpha = 1.0
        while alpha > 1e-10:  # backtrack so the loss never increases
            w_new = w - alpha * step[:p]
            b_new = b - alpha * step[p]
            if _logreg_loss(x, y, w_new, b_new, l2, n) <= loss0 + 1e-15:
                break
            alpha /= 2.0
        w, b = w_new, b_new
    prob = _sigmoid(x @ w + b)
    grad_w = x.T @ (prob - y) / n + l2 * w / n
    grad_b = float(np.mean(prob - y))
    gnorm = float(np.sqrt(grad_w @ grad_w + grad_b * grad_b))
    return LogisticModel(w, b, it, gnorm < tol, gnorm)


@dataclass(frozen=True)
class LinearSvcModel:
    weights: np.ndarray
    intercept: float
    platt_scale: float
    platt_offset: float

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self.weights + self.intercept

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return _sigmoid(self.platt_scale * self.decision_function(rows) + self.platt_offset)


def fit_linear_svc(
    x: np.ndarray,
    y: np.ndarray,
    l2: float = 1e-4,
    epochs: int = 500,
) -> LinearSvcModel:
    """Hinge loss + 0.5*l2*||w||^2 by deterministic full-batch subgradient
    steps (eta_t = 1/(l2*(t + 1/l2))), averaging iterates over the second
    half of the budget, then Platt-style calibration on the training margins.
    """
    if epochs < 1:
        raise TrainingError("epochs must be >= 1")
    n, p = x.shape
    sign = 2.0 * y.astype(np.float64) - 1.0
    w = np.zeros(p)
    b = 0.0
    w_sum = np.zeros(p)
    b_sum = 0.0
    n_avg = 0
    t0 = 1.0 / l2
    for t in range(1, epochs + 1):
        margin = sign * (x @ w + b)
        violating = margin < 1.0
        grad_w = l2 * w - (sign[violating, None] * x[violating]).sum(axis=0) / n
        grad_b = -float(sign[violating].sum()) / n
        eta = 1.0 / (l2 * (t + t0))
        w -= eta * grad_w
        b -= eta * grad_b
        if t > epochs // 2:
            w_sum += w
            b_sum += b
            n_avg += 1
    w = w_sum / n_avg
    b = b_sum / n_avg

    scores = x @ w + b
    link = fit_logreg(scores[:, None], y, l2=1e-6, tol=1e-8, max_iter=100)
    return LinearSvcModel(
        weights=w,
        intercept=b,
        platt_scale=float(link.weights[0]),
        platt_offset=link.intercept,
    )
