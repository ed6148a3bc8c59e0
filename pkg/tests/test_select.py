import json

import numpy as np
import pytest

from treexplain import (
    CartConfig,
    Dataset,
    HyperGrid,
    compare_methods,
    expand_grid,
    select_by_cv,
    select_by_fe,
    train_test_split,
)
from treexplain import ensemble
from treexplain.errors import EmptyAxisError, InvalidSpecError
from treexplain.select import report_to_csv, report_to_dict


DT_GRID = HyperGrid(family="decision_tree",
                    axes={"max_depth": [2, 3, 4, None], "criterion": ["gini", "entropy"]})


def test_expand_grid_product():
    grid = HyperGrid(family="decision_tree",
                     axes={"max_depth": [2, 4], "criterion": ["gini", "entropy"]})
    specs = expand_grid(grid, seed=1)
    assert len(specs) == 4
    # lexicographic axis order: criterion before max_depth
    assert [(s.cart.criterion, s.cart.max_depth) for s in specs] == [
        ("gini", 2), ("gini", 4), ("entropy", 2), ("entropy", 4)]


def test_expand_grid_single():
    specs = expand_grid(HyperGrid(family="decision_tree", axes={"max_depth": [3]}), 0)
    assert len(specs) == 1


def test_expand_grid_12_distinct():
    grid = HyperGrid(family="random_forest",
                     axes={"n_trees": [5, 10, 20], "max_depth": [2, 3],
                           "criterion": ["gini", "entropy"]})
    specs = expand_grid(grid, seed=0)
    assert len(specs) == 12
    assert len({(s.n_trees, s.cart.max_depth, s.cart.criterion) for s in specs}) == 12


def test_expand_grid_errors():
    with pytest.raises(EmptyAxisError):
        expand_grid(HyperGrid(family="decision_tree", axes={"max_depth": []}), 0)
    with pytest.raises(InvalidSpecError):
        expand_grid(HyperGrid(family="decision_tree", axes={"bogus": [1]}), 0)


def test_grid_of_one_fe(iris):
    split = train_test_split(iris, 0.7, seed=1)
    grid = HyperGrid(family="decision_tree", axes={"max_depth": [3]})
    report = select_by_fe(iris, split, grid, seed=1)
    assert len(report.top3) == 1
    assert report.fewer_than_three
    assert 0.0 <= report.mean_top3_test_acc <= 1.0
    assert report.wall_seconds > 0


def test_grid_of_one_cv_separable(toy_balanced_10):
    split = train_test_split(toy_balanced_10, 0.5, seed=7)
    grid = HyperGrid(family="decision_tree", axes={"max_depth": [2]})
    report = select_by_cv(toy_balanced_10, split, grid, k=2, seed=7)
    assert report.candidates[0].cv_acc == 1.0
    assert report.mean_top3_test_acc == 1.0


def test_cv_acc_is_fold_mean(iris):
    split = train_test_split(iris, 0.7, seed=1)
    report = select_by_cv(iris, split, DT_GRID, k=5, seed=1)
    for c in report.candidates:
        assert c.cv_acc == pytest.approx(float(np.mean(c.fold_accs)), abs=1e-12)
        assert len(c.fold_accs) == 5


def test_fe_ranking_rule(iris):
    split = train_test_split(iris, 0.7, seed=1)
    report = select_by_fe(iris, split, DT_GRID, gate_delta=0.02, seed=1)
    by_spec = {id(c.spec): c for c in report.candidates}
    max_train = max(c.train_acc for c in report.candidates)
    gated = [c for c in report.candidates if c.train_acc >= max_train - 0.02]
    best = min(c.explain_cv for c in gated if c.explain_cv is not None)
    assert by_spec[id(report.top3[0])].explain_cv == best


def test_fe_gate_monotone(iris):
    # gate_delta = 1.0 admits everything: top3 are the 3 smallest scores
    split = train_test_split(iris, 0.7, seed=1)
    report = select_by_fe(iris, split, DT_GRID, gate_delta=1.0, seed=1)
    scores = sorted(c.explain_cv for c in report.candidates if c.explain_cv is not None)
    chosen = {id(s) for s in report.top3}
    top_scores = sorted(c.explain_cv for c in report.candidates if id(c.spec) in chosen)
    assert top_scores == scores[:3]


def test_fit_counts(iris):
    split = train_test_split(iris, 0.7, seed=1)
    g = len(expand_grid(DT_GRID, 1))

    ensemble.reset_fit_count()
    select_by_fe(iris, split, DT_GRID, seed=1)
    assert ensemble.fit_count() == g

    ensemble.reset_fit_count()
    select_by_cv(iris, split, DT_GRID, k=10, seed=1)
    assert ensemble.fit_count() == 10 * g + 3


def _scramble_test_labels(ds, split, seed):
    labels = ds.labels.copy()
    rng = np.random.default_rng(seed)
    test = split.test_indices
    labels[test] = labels[test[rng.permutation(len(test))]]
    return Dataset(features=ds.features, labels=labels,
                   feature_names=ds.feature_names, class_names=ds.class_names,
                   name=ds.name)


@pytest.mark.parametrize("method", ["fe", "cv"])
def test_selection_never_reads_test_labels(iris, method):
    split = train_test_split(iris, 0.7, seed=2)
    scrambled = _scramble_test_labels(iris, split, seed=99)
    run = select_by_fe if method == "fe" else select_by_cv
    a = run(iris, split, DT_GRID, seed=2)
    b = run(scrambled, split, DT_GRID, seed=2)
    assert [s.to_dict() for s in a.top3] == [s.to_dict() for s in b.top3]


@pytest.mark.parametrize("method", ["fe", "cv"])
def test_reports_deterministic(iris, method):
    split = train_test_split(iris, 0.7, seed=3)
    run = select_by_fe if method == "fe" else select_by_cv
    a = run(iris, split, DT_GRID, seed=3)
    b = run(iris, split, DT_GRID, seed=3)
    ja = json.dumps(report_to_dict(a, include_timing=False), sort_keys=True)
    jb = json.dumps(report_to_dict(b, include_timing=False), sort_keys=True)
    assert ja == jb


def test_workers_do_not_change_results(iris):
    split = train_test_split(iris, 0.7, seed=3)
    a = select_by_fe(iris, split, DT_GRID, seed=3, workers=1)
    b = select_by_fe(iris, split, DT_GRID, seed=3, workers=4)
    assert json.dumps(report_to_dict(a, include_timing=False), sort_keys=True) == \
        json.dumps(report_to_dict(b, include_timing=False), sort_keys=True)


def test_compare_methods_iris(iris):
    grid = HyperGrid(family="decision_tree", axes={"max_depth": [3, 4]})
    rec = compare_methods(iris, grid, k=5, seed=1, repetitions=2)
    assert rec["repetitions"] == 2
    assert len(rec["reps"]) == 2
    assert rec["speedup_ratio"] > 1.0
    assert 0.0 <= rec["fe_mean_top3_test_acc"] <= 1.0
    # identical splits per rep for both methods
    for rep in rec["reps"]:
        assert rep["cv"].seed == rep["fe"].seed


def test_report_csv_round_trip(tmp_path, iris):
    import csv as csvmod

    split = train_test_split(iris, 0.7, seed=1)
    report = select_by_fe(iris, split, DT_GRID, seed=1)
    path = tmp_path / "report.csv"
    report_to_csv(report, path)
    with open(path, newline="") as fh:
        rows = list(csvmod.DictReader(fh))
    assert len(rows) == len(report.candidates)
    assert float(rows[0]["train_acc"]) == report.candidates[0].train_acc
    assert rows[0]["method"] == "fe"
