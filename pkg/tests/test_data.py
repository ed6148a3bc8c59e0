import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treexplain import load_csv, stratified_kfold, train_test_split
from treexplain.bundled import dataset_path
from treexplain.errors import (
    DegenerateSplitError,
    EmptyFileError,
    MissingColumnError,
    NonNumericCellError,
    SingleClassError,
    TooManyFoldsError,
)


def test_load_iris(iris):
    assert iris.n == 150
    assert iris.d == 4
    assert iris.n_classes == 3
    assert np.bincount(iris.labels).tolist() == [50, 50, 50]


def test_load_wine(wine):
    assert (wine.n, wine.d, wine.n_classes) == (178, 13, 3)


def test_load_minimal(tmp_path):
    p = tmp_path / "mini.csv"
    p.write_text("x,label\n0.5,a\n1.5,b\n")
    ds = load_csv(p, "label")
    assert (ds.n, ds.d, ds.n_classes) == (2, 1, 2)
    assert ds.class_names == ("a", "b")  # first-appearance encoding


def test_load_encoding_order(tmp_path):
    p = tmp_path / "order.csv"
    p.write_text("x,label\n1,z\n2,a\n3,z\n4,m\n")
    ds = load_csv(p, "label")
    assert ds.class_names == ("z", "a", "m")
    assert ds.labels.tolist() == [0, 1, 0, 2]


def test_load_errors(tmp_path):
    missing = tmp_path / "m.csv"
    missing.write_text("x,y\n1,2\n")
    with pytest.raises(MissingColumnError):
        load_csv(missing, "label")

    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(EmptyFileError):
        load_csv(empty, "label")

    headeronly = tmp_path / "h.csv"
    headeronly.write_text("x,label\n")
    with pytest.raises(EmptyFileError):
        load_csv(headeronly, "label")

    bad = tmp_path / "b.csv"
    bad.write_text("x,label\noops,a\n2,b\n")
    with pytest.raises(NonNumericCellError) as exc:
        load_csv(bad, "label")
    assert exc.value.row == 1 and exc.value.col == "x"

    single = tmp_path / "s.csv"
    single.write_text("x,label\n1,a\n2,a\n")
    with pytest.raises(SingleClassError):
        load_csv(single, "label")


def test_load_repeatable(iris):
    again = load_csv(dataset_path("iris"), "species", name="iris")
    assert np.array_equal(again.features, iris.features)
    assert np.array_equal(again.labels, iris.labels)


def test_split_iris_counts(iris):
    plan = train_test_split(iris, 0.7, seed=1)
    assert len(plan.train_indices) == 105
    assert len(plan.test_indices) == 45
    # 150 = 3 x 50, so each class splits exactly 35/15
    for c in range(3):
        assert np.sum(iris.labels[plan.train_indices] == c) == 35
        assert np.sum(iris.labels[plan.test_indices] == c) == 15


def test_split_small_balanced(toy_balanced_10):
    plan = train_test_split(toy_balanced_10, 0.5, seed=7)
    assert len(plan.train_indices) == 5
    assert len(plan.test_indices) == 5
    for c in (0, 1):
        n_train = np.sum(toy_balanced_10.labels[plan.train_indices] == c)
        assert abs(n_train - 2.5) <= 0.5 + 1e-9


def test_split_deterministic(iris):
    a = train_test_split(iris, 0.7, seed=42)
    b = train_test_split(iris, 0.7, seed=42)
    assert np.array_equal(a.train_indices, b.train_indices)
    assert np.array_equal(a.test_indices, b.test_indices)


def test_split_degenerate(toy_two_class):
    with pytest.raises(DegenerateSplitError):
        train_test_split(toy_two_class, 0.26, seed=0)  # one slot for two classes


@given(seed=st.integers(0, 2**63 - 1), frac=st.floats(0.2, 0.8))
@settings(max_examples=30, deadline=None)
def test_split_partitions(seed, frac):
    from treexplain.bundled import load_bundled

    ds = load_bundled("iris")
    plan = train_test_split(ds, frac, seed)
    both = np.concatenate([plan.train_indices, plan.test_indices])
    assert sorted(both.tolist()) == list(range(ds.n))
    assert len(plan.train_indices) == round(frac * ds.n)


def test_kfold_iris(iris):
    plan = train_test_split(iris, 0.7, seed=1)
    folds = stratified_kfold(plan.train_indices, iris.labels, k=10, seed=1)
    sizes = sorted(len(f) for f in folds.folds)
    assert sizes == [10] * 5 + [11] * 5  # 105 = 10*10 + 5
    merged = sorted(int(i) for f in folds.folds for i in f)
    assert merged == sorted(plan.train_indices.tolist())
    # stratification: per-class fold counts within one of each other
    for c in range(3):
        counts = [int(np.sum(iris.labels[f] == c)) for f in folds.folds]
        assert max(counts) - min(counts) <= 1


def test_kfold_leave_one_out(toy_balanced_10):
    idx = np.arange(10)
    plan = stratified_kfold(idx, toy_balanced_10.labels, k=5, seed=0)
    assert all(len(f) == 2 for f in plan.folds)


def test_kfold_too_many(toy_balanced_10):
    with pytest.raises(TooManyFoldsError):
        stratified_kfold(np.arange(10), toy_balanced_10.labels, k=10, seed=0)


@given(seed=st.integers(0, 2**32), k=st.integers(2, 10))
@settings(max_examples=25, deadline=None)
def test_kfold_partition_property(seed, k):
    from treexplain.bundled import load_bundled

    ds = load_bundled("iris")
    idx = np.arange(ds.n)
    plan = stratified_kfold(idx, ds.labels, k, seed)
    merged = sorted(int(i) for f in plan.folds for i in f)
    assert merged == list(range(ds.n))
    sizes = [len(f) for f in plan.folds]
    assert max(sizes) - min(sizes) <= 1
