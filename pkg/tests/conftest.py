"""Shared synthetic-data helpers."""

from __future__ import annotations

import numpy as np
import pytest

from diabrisk.data import Dataset


def make_classification(
    n: int = 300,
    p: int = 4,
    informative: int = 2,
    seed: int = 0,
    noise: float = 0.5,
    positive_rate_shift: float = 0.0,
) -> Dataset:
    """Linear-logit synthetic binary problem with trailing noise features."""
    rng = np.random.default_rng(seed)
    x = rng.random((n, p))
    logits = np.zeros(n)
    for j in range(informative):
        logits += (2.0 + j) * (x[:, j] - 0.5)
    logits += noise * rng.standard_normal(n) + positive_rate_shift
    y = (logits > 0).astype(int)
    return Dataset.from_arrays(x, y)


def make_imbalanced(
    n_majority: int = 80,
    n_minority: int = 20,
    gap: float = 1.0,
    seed: int = 0,
    p: int = 2,
) -> Dataset:
    """Two Gaussian blobs, class 1 in the minority, centers ``gap`` apart."""
    rng = np.random.default_rng(seed)
    x0 = rng.normal(0.0, 0.3, size=(n_majority, p))
    x1 = rng.normal(gap, 0.3, size=(n_minority, p))
    return Dataset.from_arrays(
        np.vstack([x0, x1]), [0] * n_majority + [1] * n_minority
    )


def write_brfss_like_csv(path, n: int = 400, seed: int = 3) -> None:
    """Small CSV fixture shaped like the health-indicators table."""
    import csv

    rng = np.random.default_rng(seed)
    cols = {
        "HighBP": rng.integers(0, 2, n),
        "HighChol": rng.integers(0, 2, n),
        "BMI": np.round(rng.normal(28, 6, n), 1),
        "Smoker": rng.integers(0, 2, n),
        "GenHlth": rng.integers(1, 6, n),
        "Age": rng.integers(1, 14, n),
    }
    risk = (
        0.9 * cols["HighBP"]
        + 0.5 * cols["HighChol"]
        + 0.08 * (cols["BMI"] - 28)
        + 0.35 * cols["GenHlth"]
        + 0.12 * cols["Age"]
    )
    y = (risk + rng.standard_normal(n) > 2.8).astype(int)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([*cols, "Diabetes_binary"])
        for i in range(n):
            writer.writerow([*(cols[k][i] for k in cols), y[i]])


@pytest.fixture
def brfss_like_csv(tmp_path):
    path = tmp_path / "brfss_like.csv"
    write_brfss_like_csv(path)
    return path
