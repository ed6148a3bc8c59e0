"""Regenerate the bundled dataset fixtures under src/treexplain/datasets/.

Iris, Wine and Breast Cancer (Wisconsin diagnostic) come from
scikit-learn's bundled copies. The Indian-diabetes and bank-loan files
are synthetic stand-ins generated here with fixed seeds: tabular binary
problems sized like the originals (768x8 and 5000x10) with enough label
noise that tuned tree models land in the mid-70s accuracy range.
"""

import csv
import pathlib

import numpy as np
from sklearn.datasets import load_breast_cancer, load_iris, load_wine

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "treexplain" / "datasets"


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def from_sklearn(bunch, fname, label_name, feature_names=None, class_names=None):
    names = feature_names or [n.replace(" ", "_") for n in bunch.feature_names]
    classes = class_names or list(bunch.target_names)
    rows = [
        [repr(float(v)) for v in x] + [classes[y]]
        for x, y in zip(bunch.data, bunch.target)
    ]
    write_csv(OUT / fname, names + [label_name], rows)


def synthetic_binary(n, d, seed, noise, pos_rate, feature_prefix):
    """Noisy nonlinear binary problem: label from a threshold on a sparse
    combination of features, then a fraction of labels flipped."""
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 1.0, size=(n, d))
    # a few informative features with axis-aligned structure (tree-friendly)
    score = (
        1.2 * (X[:, 0] > 0.3)
        + 0.9 * (X[:, 1] < -0.2)
        + 0.8 * (X[:, 2] > 0.8)
        + 0.5 * (X[:, 3] * X[:, 0] > 0.4)
        + rng.normal(0.0, 0.35, size=n)
    )
    cut = np.quantile(score, 1.0 - pos_rate)
    y = (score > cut).astype(int)
    flip = rng.random(n) < noise
    y[flip] = 1 - y[flip]
    header = [f"{feature_prefix}{i}" for i in range(d)]
    return X, y, header


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    from_sklearn(load_iris(), "iris.csv", "species")
    from_sklearn(load_wine(), "wine.csv", "class")
    from_sklearn(load_breast_cancer(), "breast_cancer.csv", "diagnosis")

    X, y, header = synthetic_binary(768, 8, seed=20260823, noise=0.18,
                                    pos_rate=0.35, feature_prefix="f")
    rows = [[repr(float(v)) for v in x] + [("pos" if t else "neg")] for x, t in zip(X, y)]
    write_csv(OUT / "indian_diabetes.csv", header + ["outcome"], rows)

    X, y, header = synthetic_binary(5000, 10, seed=57, noise=0.2,
                                    pos_rate=0.1, feature_prefix="f")
    rows = [[repr(float(v)) for v in x] + [("yes" if t else "no")] for x, t in zip(X, y)]
    write_csv(OUT / "bank_loan.csv", header + ["loan"], rows)


if __name__ == "__main__":
    main()
