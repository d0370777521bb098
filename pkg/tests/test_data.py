import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diabrisk.data import (
    Dataset,
    deduplicate,
    impute,
    load_csv,
    load_npz,
    normalize,
    profile,
    save_npz,
    select_columns,
    split,
)
from diabrisk.errors import DataError


def write_csv(path, text):
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_basic_load_and_schema(self, tmp_path):
        path = write_csv(
            tmp_path / "t.csv",
            "HighBP,BMI,label\n0,23.5,0\n1,31.0,1\n0,27.25,0\n",
        )
        d = load_csv(path, "label")
        assert d.row_count == 3
        assert d.feature_names == ("HighBP", "BMI")
        assert d.schema[0].kind == "binary"
        assert d.schema[1].kind == "continuous" or d.schema[1].kind == "ordinal"

    def test_binary_inference(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "HighBP,label\n0,0\n1,1\n1,0\n")
        d = load_csv(path, "label")
        assert d.schema[0].kind == "binary"

    def test_ordinal_vs_continuous_threshold(self, tmp_path):
        rows = "\n".join(f"{i % 12},{i % 20 + 0.5},{i % 2}" for i in range(60))
        path = write_csv(tmp_path / "t.csv", "ord,cont,label\n" + rows + "\n")
        d = load_csv(path, "label")
        assert d.schema[0].kind == "ordinal"  # 12 distinct <= 15
        assert d.schema[1].kind == "continuous"  # 20 distinct > 15

    def test_header_only_is_empty_dataset(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "a,b,label\n")
        with pytest.raises(DataError, match="empty dataset"):
            load_csv(path, "label")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="nope.csv"):
            load_csv(tmp_path / "nope.csv", "label")

    def test_missing_label_column(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "a,label\n1,0\n")
        with pytest.raises(DataError, match="missing label column 'y'"):
            load_csv(path, "y")

    def test_non_numeric_label_names_row(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "a,label\n1,0\n2,oops\n")
        with pytest.raises(DataError, match="row 1.*oops"):
            load_csv(path, "label")

    def test_non_binary_label_rejected(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "a,label\n1,2\n")
        with pytest.raises(DataError, match="0/1"):
            load_csv(path, "label")

    def test_unparsable_cell_recorded_missing(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "a,label\n1,0\nwhat,1\nNA,0\n,1\n")
        d = load_csv(path, "label")
        assert np.isnan(d.features[1:, 0]).all()
        assert d.features[0, 0] == 1.0


class TestDeduplicate:
    def test_exact_duplicate_removed(self):
        d = Dataset.from_arrays([[1, 0], [1, 0], [2, 3]], [1, 1, 0])
        out, removed = deduplicate(d)
        assert removed == 1
        assert out.row_count == 2
        assert out.features[0].tolist() == [1, 0]

    def test_label_differs_not_duplicate(self):
        d = Dataset.from_arrays([[1, 0], [1, 0]], [1, 0])
        out, removed = deduplicate(d)
        assert removed == 0
        assert out.row_count == 2

    def test_matches_hash_set_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.integers(0, 3, size=(500, 3)).astype(float)
        y = rng.integers(0, 2, size=500)
        d = Dataset.from_arrays(x, y)
        seen = set()
        for i in range(500):
            seen.add((tuple(x[i]), int(y[i])))
        _, removed = deduplicate(d)
        assert removed == 500 - len(seen)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        d = Dataset.from_arrays(rng.integers(0, 2, (200, 2)).astype(float),
                                rng.integers(0, 2, 200))
        once, _ = deduplicate(d)
        twice, removed = deduplicate(once)
        assert removed == 0
        assert np.array_equal(once.features, twice.features)

    def test_nan_rows_deduplicate(self):
        x = np.array([[1.0, np.nan], [1.0, np.nan], [1.0, 2.0]])
        d = Dataset.from_arrays(x, [0, 0, 0])
        _, removed = deduplicate(d)
        assert removed == 1


class TestImpute:
    def test_median_fill(self):
        d = Dataset.from_arrays(np.array([[1.0], [np.nan], [3.0]]), [0, 1, 0])
        out = impute(d)
        assert out.features[:, 0].tolist() == [1.0, 2.0, 3.0]

    def test_binary_mode_fill(self):
        d = Dataset.from_arrays(np.array([[0.0], [0.0], [1.0], [np.nan]]), [0, 1, 0, 1])
        out = impute(d)
        assert out.features[3, 0] == 0.0

    def test_no_missing_is_identity(self):
        d = Dataset.from_arrays([[1.0, 2.0]], [1])
        assert impute(d) is d

    def test_never_alters_observed_cells(self):
        rng = np.random.default_rng(3)
        x = rng.random((50, 3))
        mask = rng.random((50, 3)) < 0.2
        x_missing = np.where(mask, np.nan, x)
        d = Dataset.from_arrays(x_missing, rng.integers(0, 2, 50))
        out = impute(d)
        assert np.array_equal(out.features[~mask], x[~mask])
        assert not np.isnan(out.features).any()

    def test_all_missing_column_error(self):
        x = np.array([[np.nan, 1.0], [np.nan, 2.0]])
        with pytest.raises(DataError, match="no observed values"):
            Dataset.from_arrays(x, [0, 1])


class TestNormalize:
    def test_endpoints(self):
        d = Dataset.from_arrays(np.array([[0.0], [50.0], [100.0]]), [0, 1, 0])
        out, _ = normalize(d)
        assert out.features[:, 0].tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_maps_to_zero(self):
        d = Dataset.from_arrays(np.array([[7.0], [7.0], [7.0]]), [0, 1, 0])
        out, _ = normalize(d)
        assert out.features[:, 0].tolist() == [0.0, 0.0, 0.0]

    def test_round_trip_within_1e12(self):
        rng = np.random.default_rng(4)
        x = rng.random((1000, 5)) * 200 - 50
        d = Dataset.from_arrays(x, rng.integers(0, 2, 1000))
        out, scaler = normalize(d)
        back = scaler.inverse(out.features)
        assert np.abs(back - x).max() < 1e-12

    def test_output_in_unit_interval(self):
        rng = np.random.default_rng(5)
        d = Dataset.from_arrays(rng.standard_normal((100, 3)) * 30,
                                rng.integers(0, 2, 100))
        out, _ = normalize(d)
        assert out.features.min() >= 0.0 and out.features.max() <= 1.0

    def test_requires_no_missing(self):
        d = Dataset.from_arrays(np.array([[1.0], [np.nan]]), [0, 1])
        with pytest.raises(DataError, match="impute"):
            normalize(d)


class TestSplit:
    def test_exact_stratified_counts(self):
        x = np.arange(200, dtype=float).reshape(100, 2)
        y = np.array([0, 1] * 50)
        train, test = split(Dataset.from_arrays(x, y), 0.2, stratify=True, seed=0)
        assert test.class_counts() == {0: 10, 1: 10}
        assert train.row_count == 80

    def test_same_seed_identical(self):
        d = Dataset.from_arrays(np.random.default_rng(0).random((50, 2)),
                                [0, 1] * 25)
        a = split(d, 0.3, seed=7)
        b = split(d, 0.3, seed=7)
        assert np.array_equal(a[0].features, b[0].features)
        assert np.array_equal(a[1].features, b[1].features)

    def test_partition_property(self):
        rng = np.random.default_rng(6)
        x = rng.random((83, 2))
        d = Dataset.from_arrays(x, rng.integers(0, 2, 83))
        train, test = split(d, 0.25, seed=1)
        assert train.row_count + test.row_count == 83
        rows = {tuple(r) for r in np.vstack([train.features, test.features])}
        assert rows == {tuple(r) for r in x}

    def test_small_class_error(self):
        d = Dataset.from_arrays([[0.0], [1.0], [2.0]], [0, 0, 1])
        with pytest.raises(DataError, match="fewer than 2"):
            split(d, 0.5, stratify=True, seed=0)

    def test_fraction_bounds(self):
        d = Dataset.from_arrays([[0.0], [1.0]], [0, 1])
        with pytest.raises(DataError, match="between 0 and 1"):
            split(d, 1.0, seed=0)


class TestProfile:
    def test_orthogonal_features_unit_vif(self):
        # exactly sample-uncorrelated pattern
        x = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] * 25)
        d = Dataset.from_arrays(x, [0, 1] * 50)
        report = profile(d, bins=4)
        for value in report.vif.values():
            assert value == pytest.approx(1.0, abs=1e-9)

    def test_duplicated_column_infinite_vif(self):
        rng = np.random.default_rng(7)
        col = rng.random(60)
        d = Dataset.from_arrays(np.column_stack([col, col, rng.random(60)]),
                                rng.integers(0, 2, 60))
        report = profile(d)
        assert report.vif["f0"] is None
        assert report.vif["f1"] is None

    def test_correlation_matches_textbook_formula(self):
        rng = np.random.default_rng(8)
        x = rng.random((120, 5))
        d = Dataset.from_arrays(x, rng.integers(0, 2, 120))
        report = profile(d)
        n, p = x.shape
        expected = np.empty((p, p))
        for a in range(p):
            for b in range(p):
                xa, xb = x[:, a], x[:, b]
                num = ((xa - xa.mean()) * (xb - xb.mean())).sum()
                den = np.sqrt(((xa - xa.mean()) ** 2).sum() * ((xb - xb.mean()) ** 2).sum())
                expected[a, b] = num / den
        assert np.abs(report.correlation - expected).max() < 1e-10

    def test_correlation_matrix_invariants(self):
        rng = np.random.default_rng(9)
        x = rng.random((80, 4))
        x[:, 3] = 2.5  # constant column must not break symmetry
        report = profile(Dataset.from_arrays(x, rng.integers(0, 2, 80)))
        corr = report.correlation
        assert np.array_equal(corr, corr.T)
        assert np.allclose(np.diag(corr), 1.0, atol=1e-12)
        assert corr.min() >= -1.0 and corr.max() <= 1.0

    def test_too_few_rows(self):
        d = Dataset.from_arrays([[1.0], [2.0]], [0, 1])
        with pytest.raises(DataError, match="at least 3"):
            profile(d)

    def test_histograms_present(self):
        rng = np.random.default_rng(10)
        d = Dataset.from_arrays(rng.random((40, 2)), rng.integers(0, 2, 40))
        report = profile(d, bins=7)
        assert sum(report.histograms["f0"]["counts"]) == 40
        assert len(report.histograms["f0"]["edges"]) == 8


class TestDatasetPlumbing:
    def test_select_columns_order(self):
        d = Dataset.from_arrays([[1.0, 2.0, 3.0]], [0], names=["a", "b", "c"])
        out = select_columns(d, ["c", "a"])
        assert out.feature_names == ("c", "a")
        assert out.features[0].tolist() == [3.0, 1.0]

    def test_select_columns_unknown(self):
        d = Dataset.from_arrays([[1.0]], [0], names=["a"])
        with pytest.raises(DataError, match="unknown feature columns"):
            select_columns(d, ["zz"])

    def test_npz_round_trip(self, tmp_path):
        rng = np.random.default_rng(11)
        d = Dataset.from_arrays(rng.random((30, 3)), rng.integers(0, 2, 30),
                                names=["a", "b", "c"])
        save_npz(d, tmp_path / "d.npz")
        back = load_npz(tmp_path / "d.npz")
        assert np.array_equal(back.features, d.features)
        assert np.array_equal(back.labels, d.labels)
        assert back.schema == d.schema

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_split_deterministic_any_seed(self, seed):
        d = Dataset.from_arrays(np.arange(60, dtype=float).reshape(30, 2),
                                [0, 1] * 15)
        a_train, a_test = split(d, 0.2, seed=seed)
        b_train, b_test = split(d, 0.2, seed=seed)
        assert np.array_equal(a_train.features, b_train.features)
        assert np.array_equal(a_test.features, b_test.features)
