"""Hyperparameter selection by explanation score vs k-fold cross validation.

Both selectors consume the same expanded grid and the same train/test
split. The CV path retrains every candidate k times on stratified folds
and ranks by mean fold accuracy; the explanation path fits each candidate
once, gates on training accuracy, and ranks by ascending dispersion
score. Test accuracy is only ever computed for reporting, after ranking.
"""

import csv
import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset, SplitPlan, stratified_kfold, train_test_split
from .ensemble import ModelSpec, accuracy, fit_model
from .errors import EmptyAxisError, InvalidSpecError, NoFeaturesUsedError
from .explain import explain_cv_model
from .rng import derive_seed
from .tree import CartConfig

SCHEMA_VERSION = "treexplain-report/1"

_CART_AXES = ("max_depth", "min_samples_leaf", "criterion", "max_features")
_SPEC_AXES = ("n_trees", "learning_rate", "n_rounds", "bootstrap")


@dataclass(frozen=True)
class HyperGrid:
    family: str
    axes: dict  # parameter name -> list of values

    def validate(self):
        for name, values in self.axes.items():
            if name not in _CART_AXES + _SPEC_AXES:
                raise InvalidSpecError(f"unknown grid axis: {name!r}")
            if not values:
                raise EmptyAxisError(f"axis {name!r} has no values")


@dataclass
class CandidateResult:
    spec: ModelSpec
    train_acc: Optional[float] = None
    explain_cv: Optional[float] = None
    cv_acc: Optional[float] = None
    fold_accs: Optional[tuple] = None
    fit_seconds: float = 0.0
    test_acc: Optional[float] = None  # reporting only, never used for selection


@dataclass
class SelectionReport:
    method: str  # fe | cv
    candidates: list  # of CandidateResult, in grid order
    top3: list  # of ModelSpec
    mean_top3_test_acc: float
    wall_seconds: float
    seed: int
    dataset_name: str
    acc_gate_delta: Optional[float] = None  # fe only
    k: Optional[int] = None  # cv only
    mode: Optional[str] = None  # fe only
    fewer_than_three: bool = False


def expand_grid(grid: HyperGrid, seed: int):
    """Cartesian product of the grid axes, as concrete ModelSpecs.

    Axes iterate in lexicographic name order; each candidate gets its own
    derived seed so results are independent of evaluation order.
    """
    grid.validate()
    names = sorted(grid.axes)
    specs = []
    for i, combo in enumerate(itertools.product(*(grid.axes[n] for n in names))):
        params = dict(zip(names, combo))
        cart = CartConfig(
            max_depth=params.get("max_depth"),
            min_samples_leaf=params.get("min_samples_leaf", 1),
            criterion=params.get("criterion", "gini"),
            max_features=params.get("max_features"),
        )
        spec = ModelSpec(
            family=grid.family,
            cart=cart,
            n_trees=params.get("n_trees"),
            learning_rate=params.get("learning_rate"),
            n_rounds=params.get("n_rounds"),
            bootstrap=params.get("bootstrap"),
            seed=derive_seed(seed, "candidate", i),
        )
        spec.validate()
        specs.append(spec)
    return specs


def _map_ordered(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def select_by_fe(ds: Dataset, split: SplitPlan, grid: HyperGrid, mode="literal",
                 gate_delta=0.02, seed=0, workers=1) -> SelectionReport:
    """Fit each candidate once on the training portion, gate on training
    accuracy, rank ascending by aggregate dispersion score."""
    if not 0.0 <= gate_delta <= 1.0:
        raise ValueError("gate_delta must be in [0, 1]")
    specs = expand_grid(grid, seed)
    train = split.train_indices
    t_start = time.perf_counter()

    def evaluate(spec):
        t0 = time.perf_counter()
        model = fit_model(ds, train, spec)
        fit_s = time.perf_counter() - t0
        train_acc = accuracy(model, ds, train)
        try:
            score = explain_cv_model(model, ds, train, mode).aggregate
        except NoFeaturesUsedError:
            score = None  # stump model: worst rank, but not fatal
        return model, CandidateResult(spec=spec, train_acc=train_acc,
                                      explain_cv=score, fit_seconds=fit_s)

    evaluated = _map_ordered(evaluate, specs, workers)
    models = [m for m, _ in evaluated]
    candidates = [c for _, c in evaluated]

    max_train = max(c.train_acc for c in candidates)
    gated = [i for i, c in enumerate(candidates) if c.train_acc >= max_train - gate_delta]
    ranked = sorted(
        gated,
        key=lambda i: (
            candidates[i].explain_cv if candidates[i].explain_cv is not None else np.inf,
            -candidates[i].train_acc,
            i,
        ),
    )
    top = ranked[:3]

    # test accuracy for reporting and scatter output; models already fitted
    for i, c in enumerate(candidates):
        c.test_acc = accuracy(models[i], ds, split.test_indices)
    mean_top3 = float(np.mean([candidates[i].test_acc for i in top]))
    wall = time.perf_counter() - t_start

    return SelectionReport(
        method="fe",
        candidates=candidates,
        top3=[candidates[i].spec for i in top],
        mean_top3_test_acc=mean_top3,
        wall_seconds=wall,
        seed=seed,
        dataset_name=ds.name,
        acc_gate_delta=gate_delta,
        mode=mode,
        fewer_than_three=len(top) < 3,
    )


def select_by_cv(ds: Dataset, split: SplitPlan, grid: HyperGrid, k=10,
                 seed=0, workers=1) -> SelectionReport:
    """Stratified k-fold over the training portion per candidate; rank
    descending by mean fold accuracy; refit the top picks on the full
    training portion for test reporting."""
    specs = expand_grid(grid, seed)
    train = split.train_indices
    t_start = time.perf_counter()

    def evaluate(item):
        i, spec = item
        plan = stratified_kfold(train, ds.labels, k, derive_seed(seed, "folds", i))
        fold_accs = []
        fit_s = 0.0
        train_set = set(train.tolist())
        for fold in plan.folds:
            fit_idx = np.array(sorted(train_set - set(fold.tolist())), dtype=np.int64)
            t0 = time.perf_counter()
            model = fit_model(ds, fit_idx, spec)
            fit_s += time.perf_counter() - t0
            fold_accs.append(accuracy(model, ds, fold))
        return CandidateResult(spec=spec, cv_acc=float(np.mean(fold_accs)),
                               fold_accs=tuple(fold_accs), fit_seconds=fit_s)

    candidates = _map_ordered(evaluate, list(enumerate(specs)), workers)

    ranked = sorted(range(len(candidates)),
                    key=lambda i: (-candidates[i].cv_acc, i))
    top = ranked[:3]

    for i in top:
        model = fit_model(ds, train, candidates[i].spec)
        candidates[i].train_acc = accuracy(model, ds, train)
        candidates[i].test_acc = accuracy(model, ds, split.test_indices)
    mean_top3 = float(np.mean([candidates[i].test_acc for i in top]))
    wall = time.perf_counter() - t_start

    return SelectionReport(
        method="cv",
        candidates=candidates,
        top3=[candidates[i].spec for i in top],
        mean_top3_test_acc=mean_top3,
        wall_seconds=wall,
        seed=seed,
        dataset_name=ds.name,
        k=k,
        fewer_than_three=len(top) < 3,
    )


def compare_methods(ds: Dataset, grid: HyperGrid, k=10, mode="literal",
                    gate_delta=0.02, seed=0, repetitions=1, workers=1,
                    train_fraction=0.7):
    """Run both selectors on identical splits and grids, averaged over
    repetitions with fresh split seeds. Returns a plain dict record."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    reps = []
    for r in range(repetitions):
        split_seed = derive_seed(seed, "rep", r)
        split = train_test_split(ds, train_fraction, split_seed)
        cv = select_by_cv(ds, split, grid, k=k, seed=split_seed, workers=workers)
        fe = select_by_fe(ds, split, grid, mode=mode, gate_delta=gate_delta,
                          seed=split_seed, workers=workers)
        reps.append({"split_seed": split_seed, "cv": cv, "fe": fe})

    cv_acc = float(np.mean([r["cv"].mean_top3_test_acc for r in reps]))
    fe_acc = float(np.mean([r["fe"].mean_top3_test_acc for r in reps]))
    cv_wall = float(np.mean([r["cv"].wall_seconds for r in reps]))
    fe_wall = float(np.mean([r["fe"].wall_seconds for r in reps]))
    return {
        "schema": SCHEMA_VERSION,
        "kind": "comparison",
        "dataset": ds.name,
        "family": grid.family,
        "k": k,
        "mode": mode,
        "gate_delta": gate_delta,
        "seed": seed,
        "repetitions": repetitions,
        "workers": workers,
        "cv_mean_top3_test_acc": cv_acc,
        "fe_mean_top3_test_acc": fe_acc,
        "cv_wall_seconds": cv_wall,
        "fe_wall_seconds": fe_wall,
        "speedup_ratio": cv_wall / fe_wall if fe_wall > 0 else float("inf"),
        "reps": reps,
    }


# --- serialization ---

def _candidate_to_dict(c: CandidateResult, include_timing=True):
    doc = {
        "spec": c.spec.to_dict(),
        "train_acc": c.train_acc,
        "explain_cv": c.explain_cv,
        "cv_acc": c.cv_acc,
        "fold_accs": list(c.fold_accs) if c.fold_accs is not None else None,
        "test_acc": c.test_acc,
    }
    if include_timing:
        doc["fit_seconds"] = c.fit_seconds
    return doc


def report_to_dict(report: SelectionReport, include_timing=True):
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "selection",
        "method": report.method,
        "dataset": report.dataset_name,
        "seed": report.seed,
        "acc_gate_delta": report.acc_gate_delta,
        "k": report.k,
        "mode": report.mode,
        "candidates": [_candidate_to_dict(c, include_timing) for c in report.candidates],
        "top3": [s.to_dict() for s in report.top3],
        "mean_top3_test_acc": report.mean_top3_test_acc,
        "fewer_than_three": report.fewer_than_three,
    }
    if include_timing:
        doc["wall_seconds"] = report.wall_seconds
    return doc


CSV_COLUMNS = [
    "method", "family", "max_depth", "min_samples_leaf", "criterion",
    "max_features", "n_trees", "learning_rate", "n_rounds", "bootstrap",
    "train_acc", "cv_acc", "explain_cv", "test_acc", "fit_seconds",
]


def _candidate_row(method, c: CandidateResult):
    s = c.spec
    vals = [
        method, s.family, s.cart.max_depth, s.cart.min_samples_leaf,
        s.cart.criterion, s.cart.max_features, s.n_trees, s.learning_rate,
        s.n_rounds, s.bootstrap, c.train_acc, c.cv_acc, c.explain_cv,
        c.test_acc, c.fit_seconds,
    ]
    return ["" if v is None else v for v in vals]


def report_to_csv(report: SelectionReport, path):
    """Flat per-candidate CSV for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for c in report.candidates:
            writer.writerow(_candidate_row(report.method, c))


def comparison_to_csv(record, path):
    """One row per candidate per method, over all repetitions."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rep"] + CSV_COLUMNS)
        for r, rep in enumerate(record["reps"]):
            for method in ("cv", "fe"):
                for c in rep[method].candidates:
                    writer.writerow([r] + _candidate_row(method, c))


def comparison_to_dict(record, include_timing=True):
    doc = {key: val for key, val in record.items() if key != "reps"}
    if not include_timing:
        for key in ("cv_wall_seconds", "fe_wall_seconds", "speedup_ratio"):
            doc.pop(key, None)
    doc["reps"] = [
        {
            "split_seed": rep["split_seed"],
            "cv": report_to_dict(rep["cv"], include_timing),
            "fe": report_to_dict(rep["fe"], include_timing),
        }
        for rep in record["reps"]
    ]
    return doc


def save_json(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
