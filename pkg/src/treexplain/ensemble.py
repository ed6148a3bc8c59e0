"""Tree-ensemble learners sharing one additive per-class score.

Families: single CART tree, random forest, extra trees, and first-order
gradient boosting with softmax multiclass loss. Each exposes class_score,
an additive scalar per class — leaf probability (trees/forests) or raw
margin (boosting) — which is the quantity the explain module decomposes.
"""

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .data import Dataset
from .errors import (
    BadClassError,
    DimensionMismatchError,
    EmptyIndexSetError,
    InvalidSpecError,
    SingleClassTrainSetError,
)
from .rng import derive_seed, stream
from .tree import CartConfig, TreeNode, fit_cart, predict_value, used_features

FAMILIES = ("decision_tree", "random_forest", "extra_trees", "gradient_boosting")

# instrumentation: how many model fits have run (used by timing/count tests)
_fit_count = 0


def fit_count():
    return _fit_count


def reset_fit_count():
    global _fit_count
    _fit_count = 0


@dataclass(frozen=True)
class ModelSpec:
    family: str
    cart: CartConfig = field(default_factory=CartConfig)
    n_trees: Optional[int] = None
    learning_rate: Optional[float] = None
    n_rounds: Optional[int] = None
    bootstrap: Optional[bool] = None
    seed: int = 0

    def validate(self):
        if self.family not in FAMILIES:
            raise InvalidSpecError(f"unknown family: {self.family!r}")
        bagged = self.family in ("random_forest", "extra_trees")
        boosted = self.family == "gradient_boosting"
        if bagged:
            if self.n_trees is None or self.n_trees < 1:
                raise InvalidSpecError(f"{self.family} requires n_trees >= 1")
        elif self.n_trees is not None:
            raise InvalidSpecError(f"n_trees is not valid for {self.family}")
        if boosted:
            if self.n_rounds is None or self.n_rounds < 1:
                raise InvalidSpecError("gradient_boosting requires n_rounds >= 1")
            if self.learning_rate is None or not 0.0 < self.learning_rate <= 1.0:
                raise InvalidSpecError("gradient_boosting requires learning_rate in (0, 1]")
        elif self.learning_rate is not None or self.n_rounds is not None:
            raise InvalidSpecError(f"boosting fields are not valid for {self.family}")
        if self.bootstrap is not None and not bagged:
            raise InvalidSpecError(f"bootstrap is not valid for {self.family}")

    def effective_bootstrap(self):
        # forests bootstrap by default, extra trees do not
        if self.bootstrap is not None:
            return self.bootstrap
        return self.family == "random_forest"

    def to_dict(self):
        return {
            "family": self.family,
            "cart": {
                "max_depth": self.cart.max_depth,
                "min_samples_leaf": self.cart.min_samples_leaf,
                "criterion": self.cart.criterion,
                "max_features": self.cart.max_features,
                "random_thresholds": self.cart.random_thresholds,
            },
            "n_trees": self.n_trees,
            "learning_rate": self.learning_rate,
            "n_rounds": self.n_rounds,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc):
        cart = doc.get("cart", {})
        return cls(
            family=doc["family"],
            cart=CartConfig(
                max_depth=cart.get("max_depth"),
                min_samples_leaf=cart.get("min_samples_leaf", 1),
                criterion=cart.get("criterion", "gini"),
                max_features=cart.get("max_features"),
                random_thresholds=cart.get("random_thresholds", False),
            ),
            n_trees=doc.get("n_trees"),
            learning_rate=doc.get("learning_rate"),
            n_rounds=doc.get("n_rounds"),
            bootstrap=doc.get("bootstrap"),
            seed=doc.get("seed", 0),
        )


@dataclass(frozen=True)
class FittedModel:
    spec: ModelSpec
    n_features: int
    n_classes: int
    tree: Optional[TreeNode] = None  # decision_tree
    trees: Optional[tuple] = None  # random_forest / extra_trees
    base_scores: Optional[np.ndarray] = None  # gradient_boosting: class log-priors
    stages: Optional[tuple] = None  # n_rounds tuples of C regression trees

    @property
    def is_boosted(self):
        return self.stages is not None

    def member_trees(self):
        """All constituent TreeNodes, flattened."""
        if self.tree is not None:
            return [self.tree]
        if self.trees is not None:
            return list(self.trees)
        return [t for stage in self.stages for t in stage]

    def used_feature_set(self):
        out = set()
        for t in self.member_trees():
            out |= used_features(t)
        return out


def _softmax(margins):
    z = margins - margins.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _newton_leaf_pass(tree, X, residual, curvature, n_classes):
    """Replace regression-tree values with Newton leaf updates.

    Leaves get gamma = ((C-1)/C) * sum(residual) / sum(curvature) over
    their samples; internal values are recomputed as sample-count
    weighted means of their children so the parent/child consistency
    invariant still holds.
    """
    scale = (n_classes - 1) / n_classes

    def visit(node, rows):
        if node.is_leaf:
            den = curvature[rows].sum()
            gamma = scale * residual[rows].sum() / den if den > 1e-150 else 0.0
            node.value = np.array([gamma])
            return len(rows)
        mask = X[rows, node.feature_index] <= node.threshold
        nl = visit(node.left, rows[mask])
        nr = visit(node.right, rows[~mask])
        node.value = (nl * node.left.value + nr * node.right.value) / (nl + nr)
        return nl + nr

    visit(tree, np.arange(X.shape[0]))


def _predict_batch(tree, X):
    """Leaf values for every row of X, shape (n, len(value))."""
    out = np.empty((X.shape[0], tree.value.shape[0]))

    def visit(node, rows):
        if node.is_leaf:
            out[rows] = node.value
            return
        mask = X[rows, node.feature_index] <= node.threshold
        visit(node.left, rows[mask])
        visit(node.right, rows[~mask])

    visit(tree, np.arange(X.shape[0]))
    return out


def _fit_boosted(ds, indices, spec):
    n = len(indices)
    C = ds.n_classes
    y = ds.labels[indices]
    X = ds.features[indices]
    counts = np.bincount(y, minlength=C)
    base = np.log(counts / n)
    onehot = np.zeros((n, C))
    onehot[np.arange(n), y] = 1.0

    margins = np.tile(base, (n, 1))
    lr = spec.learning_rate
    reg_cfg = replace(spec.cart, criterion="gini")  # criterion unused in regression mode
    stages = []
    for m in range(spec.n_rounds):
        p = _softmax(margins)
        stage = []
        for c in range(C):
            residual = onehot[:, c] - p[:, c]
            curvature = p[:, c] * (1.0 - p[:, c])
            cfg = replace(reg_cfg, feature_subsample_seed=derive_seed(spec.seed, "stage", m, c))
            t = fit_cart(ds, indices, cfg, targets_override=residual)
            _newton_leaf_pass(t, X, residual, curvature, C)
            margins[:, c] += lr * _predict_batch(t, X)[:, 0]
            stage.append(t)
        stages.append(tuple(stage))
    return base, tuple(stages)


def fit_model(ds: Dataset, indices, spec: ModelSpec) -> FittedModel:
    """Train one model of the requested family on the selected rows."""
    global _fit_count
    spec.validate()
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise EmptyIndexSetError("cannot fit on an empty index set")
    if len(np.unique(ds.labels[indices])) < 2:
        raise SingleClassTrainSetError("training subset contains a single class")
    _fit_count += 1

    if spec.family == "decision_tree":
        cfg = replace(spec.cart, feature_subsample_seed=derive_seed(spec.seed, "tree", 0))
        return FittedModel(spec=spec, n_features=ds.d, n_classes=ds.n_classes,
                           tree=fit_cart(ds, indices, cfg))

    if spec.family in ("random_forest", "extra_trees"):
        random_thr = spec.family == "extra_trees" or spec.cart.random_thresholds
        trees = []
        for t in range(spec.n_trees):
            tree_seed = derive_seed(spec.seed, "tree", t)
            if spec.effective_bootstrap():
                rows = stream(tree_seed, "bootstrap").integers(0, len(indices), len(indices))
                idx = indices[rows]
            else:
                idx = indices
            cfg = replace(spec.cart, feature_subsample_seed=tree_seed,
                          random_thresholds=random_thr)
            trees.append(fit_cart(ds, idx, cfg))
        return FittedModel(spec=spec, n_features=ds.d, n_classes=ds.n_classes,
                           trees=tuple(trees))

    base, stages = _fit_boosted(ds, indices, spec)
    return FittedModel(spec=spec, n_features=ds.d, n_classes=ds.n_classes,
                       base_scores=base, stages=stages)


def _check_x(model, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise DimensionMismatchError(model.n_features, x.shape)
    return x


def class_score(model: FittedModel, x, class_index: int) -> float:
    """The additive scalar for one class: probability (trees/forests) or
    raw pre-softmax margin (boosting)."""
    x = _check_x(model, x)
    if not 0 <= class_index < model.n_classes:
        raise BadClassError(f"class index {class_index} out of range")
    if model.tree is not None:
        return float(predict_value(model.tree, x)[class_index])
    if model.trees is not None:
        return float(np.mean([predict_value(t, x)[class_index] for t in model.trees]))
    total = model.base_scores[class_index]
    for stage in model.stages:
        total += model.spec.learning_rate * predict_value(stage[class_index], x)[0]
    return float(total)


def _all_class_scores(model, x):
    x = _check_x(model, x)
    if model.tree is not None:
        return np.array(predict_value(model.tree, x))
    if model.trees is not None:
        return np.mean([predict_value(t, x) for t in model.trees], axis=0)
    scores = model.base_scores.copy()
    for stage in model.stages:
        for c in range(model.n_classes):
            scores[c] += model.spec.learning_rate * predict_value(stage[c], x)[0]
    return scores


def predict_class(model: FittedModel, x) -> int:
    """argmax of class_score; ties break to the lowest class index."""
    return int(np.argmax(_all_class_scores(model, x)))


def batch_scores(model: FittedModel, X) -> np.ndarray:
    """(n, C) matrix of class scores for a feature matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.n_features:
        raise DimensionMismatchError(model.n_features, X.shape[1])
    if model.tree is not None:
        return _predict_batch(model.tree, X)
    if model.trees is not None:
        acc = np.zeros((X.shape[0], model.n_classes))
        for t in model.trees:
            acc += _predict_batch(t, X)
        return acc / len(model.trees)
    scores = np.tile(model.base_scores, (X.shape[0], 1))
    for stage in model.stages:
        for c in range(model.n_classes):
            scores[:, c] += model.spec.learning_rate * _predict_batch(stage[c], X)[:, 0]
    return scores


def predict_classes(model: FittedModel, X) -> np.ndarray:
    return np.argmax(batch_scores(model, X), axis=1)


def accuracy(model: FittedModel, ds: Dataset, indices) -> float:
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise EmptyIndexSetError("cannot score an empty index set")
    pred = predict_classes(model, ds.features[indices])
    return float(np.mean(pred == ds.labels[indices]))


# --- persistence ---

FORMAT_TAG = "treexplain-model/1"


def model_to_dict(model: FittedModel):
    doc = {
        "format": FORMAT_TAG,
        "spec": model.spec.to_dict(),
        "n_features": model.n_features,
        "n_classes": model.n_classes,
    }
    if model.tree is not None:
        doc["tree"] = model.tree.to_dict()
    elif model.trees is not None:
        doc["trees"] = [t.to_dict() for t in model.trees]
    else:
        doc["base_scores"] = model.base_scores.tolist()
        doc["stages"] = [[t.to_dict() for t in stage] for stage in model.stages]
    return doc


def model_from_dict(doc) -> FittedModel:
    if doc.get("format") != FORMAT_TAG:
        raise InvalidSpecError(f"unsupported model format: {doc.get('format')!r}")
    spec = ModelSpec.from_dict(doc["spec"])
    kwargs = dict(spec=spec, n_features=doc["n_features"], n_classes=doc["n_classes"])
    if "tree" in doc:
        kwargs["tree"] = TreeNode.from_dict(doc["tree"])
    elif "trees" in doc:
        kwargs["trees"] = tuple(TreeNode.from_dict(t) for t in doc["trees"])
    else:
        kwargs["base_scores"] = np.array(doc["base_scores"])
        kwargs["stages"] = tuple(
            tuple(TreeNode.from_dict(t) for t in stage) for stage in doc["stages"]
        )
    return FittedModel(**kwargs)


def save_model(model: FittedModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
