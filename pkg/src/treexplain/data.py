"""Dataset ingestion, train/test splitting, and stratified k-fold plans."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSplitError,
    EmptyFileError,
    MissingColumnError,
    NonNumericCellError,
    SingleClassError,
    TooManyFoldsError,
)
from .rng import stream


@dataclass(frozen=True)
class Dataset:
    """An in-memory classification dataset.

    features is an (n, d) float matrix, labels a length-n vector of class
    indices in [0, C). All values are finite; every class occurs at least
    once.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    class_names: tuple
    name: str

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        n, d = feats.shape
        if n < 2 or d < 1:
            raise ValueError("dataset needs n >= 2 rows and d >= 1 features")
        if not np.all(np.isfinite(feats)):
            raise ValueError("non-finite feature values")
        c = len(self.class_names)
        if c < 2:
            raise SingleClassError(f"dataset {self.name!r} has fewer than 2 classes")
        counts = np.bincount(labs, minlength=c)
        if labs.min() < 0 or labs.max() >= c or np.any(counts == 0):
            raise ValueError("labels must cover every class index in [0, C)")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint train/test index lists covering 0..n-1 exactly."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    train_fraction: float


@dataclass(frozen=True)
class FoldPlan:
    """k pairwise-disjoint stratified folds partitioning an index set."""

    folds: tuple
    k: int
    seed: int


def load_csv(path, label_column, name=None):
    """Load a headered CSV into a Dataset.

    The label column is selected by name; its distinct values are encoded
    as class indices in first-appearance order. Every other cell must
    parse as a finite real.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"empty file: {path}")
        if label_column not in header:
            raise MissingColumnError(label_column)
        label_pos = header.index(label_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != label_pos)

        rows = []
        raw_labels = []
        for r, record in enumerate(reader, start=1):
            vals = []
            for i, cell in enumerate(record):
                if i == label_pos:
                    raw_labels.append(cell)
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCellError(r, header[i], cell)
                if not np.isfinite(v):
                    raise NonNumericCellError(r, header[i], cell)
                vals.append(v)
            rows.append(vals)

    if not rows:
        raise EmptyFileError(f"no data rows in: {path}")

    class_names = list(dict.fromkeys(raw_labels))
    if len(class_names) < 2:
        raise SingleClassError(f"label column {label_column!r} has a single class")
    encoding = {c: i for i, c in enumerate(class_names)}
    labels = np.array([encoding[c] for c in raw_labels], dtype=np.int64)
    if name is None:
        name = str(path)
    return Dataset(
        features=np.array(rows, dtype=np.float64),
        labels=labels,
        feature_names=feature_names,
        class_names=tuple(class_names),
        name=name,
    )


def train_test_split(ds: Dataset, train_fraction: float, seed: int) -> SplitPlan:
    """Stratified deterministic train/test split.

    |train| = round(train_fraction * n); each class's train count is
    floor or ceil of its ideal share, assigned by largest remainder.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = ds.n
    target_total = int(round(train_fraction * n))
    rng = stream(seed, "train_test_split")

    per_class = []
    for c in range(ds.n_classes):
        idx = np.flatnonzero(ds.labels == c)
        idx = idx[rng.permutation(len(idx))]
        ideal = train_fraction * len(idx)
        per_class.append([idx, int(np.floor(ideal)), ideal - np.floor(ideal)])

    remaining = target_total - sum(p[1] for p in per_class)
    # hand out the leftover slots to the largest fractional remainders
    order = sorted(range(ds.n_classes), key=lambda c: (-per_class[c][2], c))
    for c in order[: max(remaining, 0)]:
        per_class[c][1] += 1

    train, test = [], []
    for c in range(ds.n_classes):
        idx, take, _ = per_class[c]
        if take < 1:
            raise DegenerateSplitError(
                f"class {ds.class_names[c]!r} would be absent from the train set"
            )
        train.append(idx[:take])
        test.append(idx[take:])
    return SplitPlan(
        train_indices=np.sort(np.concatenate(train)),
        test_indices=np.sort(np.concatenate(test)),
        seed=seed,
        train_fraction=train_fraction,
    )


def stratified_kfold(indices, labels, k: int, seed: int) -> FoldPlan:
    """Partition an index set into k stratified folds.

    Per class the indices are shuffled, then dealt round-robin into the
    folds with a dealing position carried across classes, so fold sizes
    differ by at most one globally and per class.
    """
    indices = np.asarray(indices, dtype=np.int64)
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    sub_labels = labels[indices]
    counts = np.bincount(sub_labels)
    smallest = counts[counts > 0].min()
    if k > smallest:
        raise TooManyFoldsError(
            f"k={k} exceeds smallest class count {smallest} in the index set"
        )

    rng = stream(seed, "stratified_kfold")
    folds = [[] for _ in range(k)]
    pos = 0
    for c in np.unique(sub_labels):
        idx = indices[sub_labels == c]
        idx = idx[rng.permutation(len(idx))]
        for j in idx:
            folds[pos % k].append(int(j))
            pos += 1
    return FoldPlan(
        folds=tuple(np.sort(np.array(f, dtype=np.int64)) for f in folds),
        k=k,
        seed=seed,
    )
