import math

import numpy as np
import pytest

from diabrisk.data import Dataset
from diabrisk.errors import DataError
from diabrisk.featsel import (
    MethodRanking,
    aggregate,
    lasso_fit,
    lasso_lambda_max,
    lasso_objective,
    lasso_rank,
    mutual_info,
    mutual_information_nats,
    rfe,
    select_features,
)
from diabrisk.learners.linear import fit_logreg


def mi_double_sum_oracle(x_codes, y_codes):
    """Explicit cell-by-cell summation over the contingency table."""
    n = len(x_codes)
    total = 0.0
    for xv in np.unique(x_codes):
        for yv in np.unique(y_codes):
            p_xy = np.sum((x_codes == xv) & (y_codes == yv)) / n
            if p_xy == 0:
                continue
            p_x = np.sum(x_codes == xv) / n
            p_y = np.sum(y_codes == yv) / n
            total += p_xy * math.log(p_xy / (p_x * p_y))
    return total


def orthonormal_columns(n, p, seed):
    """Zero-mean columns with X^T X / n = I, so standardization is identity."""
    rng = np.random.default_rng(seed)
    basis = np.column_stack([np.ones(n), rng.standard_normal((n, p))])
    q, _ = np.linalg.qr(basis)
    return q[:, 1:] * math.sqrt(n)


class TestMutualInfo:
    def test_perfectly_informative_binary(self):
        y = np.array([0, 1] * 50)
        d = Dataset.from_arrays(y[:, None].astype(float), y)
        ranking = mutual_info(d)
        assert ranking.score_of["f0"] == pytest.approx(math.log(2), abs=1e-12)

    def test_independent_feature_zero(self):
        # exact product distribution: every (x, y) combo appears 25 times
        x = np.array([0, 0, 1, 1] * 25, dtype=float)
        y = np.array([0, 1, 0, 1] * 25)
        d = Dataset.from_arrays(x[:, None], y)
        assert mutual_info(d).score_of["f0"] == pytest.approx(0.0, abs=1e-12)

    def test_matches_double_sum_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.integers(0, 4, 200)
            y = rng.integers(0, 3, 200)
            assert mutual_information_nats(x, y) == pytest.approx(
                mi_double_sum_oracle(x, y), abs=1e-12
            )

    def test_symmetric_and_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = rng.integers(0, 5, 150)
            y = rng.integers(0, 2, 150)
            mi_xy = mutual_information_nats(x, y)
            mi_yx = mutual_information_nats(y, x)
            assert mi_xy >= 0.0
            assert mi_xy == pytest.approx(mi_yx, abs=1e-12)

    def test_constant_label_rejected(self):
        d = Dataset.from_arrays(np.random.default_rng(2).random((20, 2)), [1] * 20)
        with pytest.raises(DataError, match="label has one class"):
            mutual_info(d)

    def test_continuous_feature_binned(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(500)
        y = (x > 0).astype(int)
        d = Dataset.from_arrays(x[:, None], y)
        assert d.schema[0].kind == "continuous"
        score = mutual_info(d, bins=10).score_of["f0"]
        assert score > 0.5  # binned MI of a threshold label stays high

    def test_ranks_are_permutation(self):
        rng = np.random.default_rng(4)
        d = Dataset.from_arrays(rng.integers(0, 3, (100, 5)).astype(float),
                                rng.integers(0, 2, 100))
        ranking = mutual_info(d)
        assert sorted(ranking.rank_of.values()) == [1, 2, 3, 4, 5]


class TestRfe:
    def _noise_problem(self):
        rng = np.random.default_rng(5)
        n = 60
        f1 = rng.standard_normal(n)
        f2 = rng.standard_normal(n)
        f3 = rng.standard_normal(n)  # pure noise
        y = ((f1 + f2) > 0).astype(int)
        return Dataset.from_arrays(np.column_stack([f1, f2, f3]), y,
                                   names=["f1", "f2", "f3"])

    def test_noise_eliminated_first(self):
        d = self._noise_problem()
        ranking = rfe(d, keep=2)
        assert ranking.rank_of["f3"] == 3  # eliminated in round one

    def test_exhaustive_subset_oracle_agrees(self):
        d = self._noise_problem()
        x = d.features
        std = (x - x.mean(axis=0)) / x.std(axis=0)
        y = d.labels

        def mean_log_loss(cols):
            model = fit_logreg(std[:, cols], y.astype(np.int64))
            z = std[:, cols] @ model.weights + model.intercept
            return float(np.mean(np.logaddexp(0.0, z) - y * z))

        subsets = {(0, 1): None, (0, 2): None, (1, 2): None}
        losses = {cols: mean_log_loss(list(cols)) for cols in subsets}
        assert min(losses, key=losses.get) == (0, 1)  # oracle: drop f3

    def test_keep_all_lexicographic_tie(self):
        rng = np.random.default_rng(6)
        d = Dataset.from_arrays(rng.random((40, 3)), rng.integers(0, 2, 40),
                                names=["b", "a", "c"])
        ranking = rfe(d, keep=3)
        assert ranking.rank_of == {"a": 1, "b": 2, "c": 3}

    def test_duplicated_column_one_survives(self):
        rng = np.random.default_rng(7)
        n = 80
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        z = rng.standard_normal(n) * 0.01
        y = ((a + b) > 0).astype(int)
        d = Dataset.from_arrays(np.column_stack([a, a.copy(), b, z]), y,
                                names=["a", "a_dup", "b", "z"])
        ranking = rfe(d, keep=2)
        top = {name for name, rank in ranking.rank_of.items() if rank <= 2}
        assert len(top & {"a", "a_dup"}) == 1
        assert "b" in top


class TestLassoFit:
    def test_lambda_max_gives_exact_zero(self):
        rng = np.random.default_rng(8)
        d = Dataset.from_arrays(rng.random((50, 4)), rng.integers(0, 2, 50))
        lam_max = lasso_lambda_max(d)
        fit = lasso_fit(d, lam_max)
        assert np.all(fit.coefficients == 0.0)
        assert fit.converged

    def test_lambda_zero_matches_ols(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((50, 3))
        y = rng.integers(0, 2, 50)
        d = Dataset.from_arrays(x, y)
        fit = lasso_fit(d, 0.0, tol=1e-12)
        std = (x - x.mean(axis=0)) / x.std(axis=0)
        design = np.column_stack([np.ones(50), std])
        beta = np.linalg.solve(design.T @ design, design.T @ y.astype(float))
        assert np.abs(fit.coefficients - beta[1:]).max() < 1e-6

    def test_orthonormal_closed_form(self):
        n, p = 64, 5
        x = orthonormal_columns(n, p, seed=10)
        rng = np.random.default_rng(11)
        y = rng.integers(0, 2, n)
        d = Dataset.from_arrays(x, y)
        lam = 0.03
        fit = lasso_fit(d, lam, tol=1e-12)
        rho = x.T @ (y - y.mean()) / n
        expected = np.sign(rho) * np.maximum(np.abs(rho) - lam, 0.0)
        assert np.abs(fit.coefficients - expected).max() < 1e-8

    def test_objective_monotone_over_sweeps(self):
        rng = np.random.default_rng(12)
        for trial in range(10):
            n, p = 40, 4
            x = rng.standard_normal((n, p)) @ (np.eye(p) + 0.5 * rng.random((p, p)))
            y = rng.integers(0, 2, n)
            d = Dataset.from_arrays(x, y)
            lam = lasso_lambda_max(d) / 20
            objectives = [
                lasso_objective(d, lasso_fit(d, lam, tol=0.0, max_sweeps=s))
                for s in range(1, 10)
            ]
            assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_kkt_residuals_at_convergence(self):
        rng = np.random.default_rng(13)
        tol = 1e-7
        for trial in range(5):
            x = rng.standard_normal((60, 5))
            y = rng.integers(0, 2, 60)
            d = Dataset.from_arrays(x, y)
            lam = lasso_lambda_max(d) / 10
            fit = lasso_fit(d, lam, tol=tol)
            assert fit.converged
            std = (x - x.mean(axis=0)) / x.std(axis=0)
            residual = y - fit.intercept - std @ fit.coefficients
            grad = std.T @ residual / 60
            for j in range(5):
                if fit.coefficients[j] != 0.0:
                    assert abs(grad[j] - lam * np.sign(fit.coefficients[j])) <= 10 * tol
                else:
                    assert abs(grad[j]) <= lam + 10 * tol

    def test_max_sweeps_flag(self):
        rng = np.random.default_rng(14)
        d = Dataset.from_arrays(rng.standard_normal((30, 3)), rng.integers(0, 2, 30))
        fit = lasso_fit(d, 1e-9, tol=0.0, max_sweeps=3)
        assert not fit.converged
        assert fit.iterations_run == 3


class TestLassoRank:
    def test_single_informative_ranks_first(self):
        rng = np.random.default_rng(15)
        n = 200
        informative = rng.standard_normal(n)
        y = (informative > 0).astype(int)
        x = np.column_stack([informative] + [rng.standard_normal(n) for _ in range(4)])
        d = Dataset.from_arrays(x, y, names=["sig", "n1", "n2", "n3", "n4"])
        # correlation-screening oracle agrees the signal column dominates
        correlations = [abs(np.corrcoef(x[:, j], y)[0, 1]) for j in range(5)]
        assert int(np.argmax(correlations)) == 0
        assert lasso_rank(d).rank_of["sig"] == 1

    def test_all_zero_coefficients_rank_lexicographically(self):
        rng = np.random.default_rng(16)
        d = Dataset.from_arrays(rng.random((40, 3)), rng.integers(0, 2, 40),
                                names=["c", "a", "b"])
        fit = lasso_fit(d, lasso_lambda_max(d) * 2)
        assert np.all(fit.coefficients == 0.0)
        from diabrisk.featsel import _rank_by_score

        scores = {name: 0.0 for name in ("c", "a", "b")}
        assert _rank_by_score(scores, scores) == {"a": 1, "b": 2, "c": 3}

    def test_rank_permutation(self):
        rng = np.random.default_rng(17)
        d = Dataset.from_arrays(rng.random((60, 4)), rng.integers(0, 2, 60))
        assert sorted(lasso_rank(d).rank_of.values()) == [1, 2, 3, 4]


class TestAggregate:
    def test_single_method_passthrough(self):
        ranking = MethodRanking("MI", {"a": 2, "b": 1, "c": 3},
                                {"a": 0.5, "b": 0.9, "c": 0.1})
        out = aggregate([ranking], keep=2)
        assert out.selected == ("b", "a")
        assert out.aggregate_score["b"] == 0.0
        assert out.aggregate_score["c"] == 1.0

    def test_reversed_orders_tie_at_half(self):
        r1 = MethodRanking("MI", {"a": 1, "b": 2, "c": 3}, {})
        r2 = MethodRanking("LASSO", {"a": 3, "b": 2, "c": 1}, {})
        out = aggregate([r1, r2], keep=2)
        assert all(v == pytest.approx(0.5) for v in out.aggregate_score.values())
        assert out.selected == ("a", "b")  # lexicographic under full tie

    def test_mismatched_features_rejected(self):
        r1 = MethodRanking("MI", {"a": 1, "b": 2}, {})
        r2 = MethodRanking("RFE", {"a": 1, "c": 2}, {})
        with pytest.raises(DataError, match="different feature sets"):
            aggregate([r1, r2], keep=1)

    def test_scores_in_unit_interval(self):
        rng = np.random.default_rng(18)
        d = Dataset.from_arrays(rng.random((80, 5)), rng.integers(0, 2, 80))
        out = select_features(d, keep=3)
        assert all(0.0 <= v <= 1.0 for v in out.aggregate_score.values())
        assert len(out.selected) == 3

    def test_format_table_contains_all_features(self):
        rng = np.random.default_rng(19)
        d = Dataset.from_arrays(rng.random((50, 3)), rng.integers(0, 2, 50),
                                names=["x1", "x2", "x3"])
        table = select_features(d, keep=2).format_table()
        for name in ("x1", "x2", "x3"):
            assert name in table
