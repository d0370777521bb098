"""Gaussian naive Bayes with closed-form per-class statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaussianNbModel:
    classes: np.ndarray  # sorted class labels, length 2
    priors: np.ndarray
    means: np.ndarray  # (n_classes, n_features)
    variances: np.ndarray  # floored, same shape

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        log_post = np.empty((rows.shape[0], self.classes.size))
        for c in range(self.classes.size):
            log_like = -0.5 * (
                np.log(2.0 * np.pi * self.variances[c])
                + (rows - self.means[c]) ** 2 / self.variances[c]
            ).sum(axis=1)
            log_post[:, c] = np.log(self.priors[c]) + log_like
        log_post -= log_post.max(axis=1, keepdims=True)
        post = np.exp(log_post)
        post /= post.sum(axis=1, keepdims=True)
        positive = int(np.flatnonzero(self.classes == 1)[0])
        return post[:, positive]


def fit_gaussian_nb(x: np.ndarray, y: np.ndarray, var_floor: float = 1e-9) -> GaussianNbModel:
    classes = np.unique(y)
    priors = np.empty(classes.size)
    means = np.empty((classes.size, x.shape[1]))
    variances = np.empty_like(means)
    for c, label in enumerate(classes):
        rows = x[y == label]
        priors[c] = rows.shape[0] / x.shape[0]
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), var_floor)
    return GaussianNbModel(classes=classes, priors=priors, means=means, variances=variances)
