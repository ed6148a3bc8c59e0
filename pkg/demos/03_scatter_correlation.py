"""Does a low explain_cv predict a high test accuracy?

Among candidates whose training accuracy is near the best (the same gate the
FE selector uses), a more even spread of feature reliance tends to go with
better generalization. This script runs one FE selection per bundled dataset,
writes the gated (explain_cv, test_acc) pairs through the scatter emitter,
and reports the Spearman rank correlation — negative means the tendency holds.
Scatter CSVs and SVG plots land in ./scatter_out/.
"""

import csv
import os

from treexplain import select_by_fe, train_test_split
from treexplain.bundled import load_bundled
from treexplain.cli import emit_scatter
from treexplain.rng import derive_seed
from treexplain.select import HyperGrid

RUNS = {
    "iris": HyperGrid("random_forest", {
        "n_trees": [15], "max_depth": [3, 5, None], "min_samples_leaf": [1, 3],
        "max_features": [2, None], "criterion": ["gini"]}),
    "wine": HyperGrid("extra_trees", {
        "n_trees": [15], "max_depth": [3, 5, 8, None],
        "min_samples_leaf": [1, 3, 5], "criterion": ["gini", "entropy"]}),
    "breast_cancer": HyperGrid("decision_tree", {
        "max_depth": [2, 3, 4, 6, 8, None], "min_samples_leaf": [1, 3, 5],
        "criterion": ["gini", "entropy"]}),
    "indian_diabetes": HyperGrid("decision_tree", {
        "max_depth": [2, 3, 4], "min_samples_leaf": [10, 20, 40],
        "criterion": ["gini", "entropy"]}),
    "bank_loan": HyperGrid("decision_tree", {
        "max_depth": [2, 3, 4], "min_samples_leaf": [10, 20, 40],
        "criterion": ["gini", "entropy"]}),
}
GATE_DELTA = 0.02


def main():
    out_dir = "scatter_out"
    os.makedirs(out_dir, exist_ok=True)
    negatives = 0
    for name, grid in RUNS.items():
        ds = load_bundled(name)
        seed = derive_seed(9, "scatter2", name)
        split = train_test_split(ds, 0.7, seed)
        report = select_by_fe(ds, split, grid, seed=seed, gate_delta=GATE_DELTA)

        max_train = max(c.train_acc for c in report.candidates)
        gated = [c for c in report.candidates
                 if c.explain_cv is not None
                 and c.train_acc >= max_train - GATE_DELTA]

        src = os.path.join(out_dir, f"{name}_gated.csv")
        with open(src, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["explain_cv", "test_acc"])
            for c in gated:
                writer.writerow([c.explain_cv, c.test_acc])

        rho = emit_scatter(src, "explain_cv", "test_acc",
                           os.path.join(out_dir, f"{name}_scatter.csv"),
                           svg=os.path.join(out_dir, f"{name}_scatter.svg"))
        negatives += rho is not None and rho < 0
        shown = "undefined" if rho is None else f"{rho:+.3f}"
        print(f"{ds.name:<16} {grid.family:<18} gated n={len(gated):<3} "
              f"spearman={shown}")

    print(f"\n{negatives}/{len(RUNS)} runs show the negative correlation; "
          f"plots are in {out_dir}/")


if __name__ == "__main__":
    main()
