"""Access to the dataset fixtures and grid definitions shipped in-package."""

import json
from importlib import resources

from .data import load_csv
from .select import HyperGrid

# name -> (resource file, label column)
DATASETS = {
    "iris": ("iris.csv", "species"),
    "wine": ("wine.csv", "class"),
    "breast_cancer": ("breast_cancer.csv", "diagnosis"),
    "indian_diabetes": ("indian_diabetes.csv", "outcome"),
    "bank_loan": ("bank_loan.csv", "loan"),
}


def dataset_path(name):
    if name not in DATASETS:
        raise KeyError(f"no bundled dataset named {name!r}")
    return resources.files("treexplain") / "datasets" / DATASETS[name][0]


def load_bundled(name):
    fname, label = DATASETS[name]
    with resources.as_file(dataset_path(name)) as path:
        return load_csv(path, label, name=name)


def grid_names():
    root = resources.files("treexplain") / "grids"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_grid(name) -> HyperGrid:
    path = resources.files("treexplain") / "grids" / f"{name}.json"
    doc = json.loads(path.read_text(encoding="utf-8"))
    return HyperGrid(family=doc["family"], axes=doc["axes"])
