"""CART learner with value-carrying nodes and decision-path extraction.

Every node, internal or leaf, stores its value vector: the weighted class
distribution of the training samples that reached it (classification), or
the length-1 weighted target mean (regression mode, used by boosting).
Storing values at internal nodes is what makes path-delta attribution
possible downstream.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .errors import DimensionMismatchError, EmptyIndexSetError
from .rng import stream

_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class CartConfig:
    max_depth: Optional[int] = None  # None = unlimited
    min_samples_leaf: int = 1
    criterion: str = "gini"  # gini | entropy
    max_features: Optional[int] = None  # None = all
    feature_subsample_seed: int = 0
    random_thresholds: bool = False  # extra-trees mode

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.criterion not in ("gini", "entropy"):
            raise ValueError(f"unknown criterion: {self.criterion!r}")


class TreeNode:
    """Binary tree node. Leaf iff left is None. Routing: x[f] <= t goes left."""

    __slots__ = ("feature_index", "threshold", "left", "right", "value")

    def __init__(self, value, feature_index=None, threshold=None, left=None, right=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.feature_index = feature_index
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None

    def to_dict(self):
        if self.is_leaf:
            return {"kind": "leaf", "value": self.value.tolist()}
        return {
            "kind": "internal",
            "feature": int(self.feature_index),
            "threshold": float(self.threshold),
            "value": self.value.tolist(),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc):
        if doc["kind"] == "leaf":
            return cls(value=doc["value"])
        return cls(
            value=doc["value"],
            feature_index=doc["feature"],
            threshold=doc["threshold"],
            left=cls.from_dict(doc["left"]),
            right=cls.from_dict(doc["right"]),
        )


@dataclass(frozen=True)
class DecisionPath:
    """Internal nodes traversed for one instance, with before/after values."""

    steps: tuple  # of (feature_index, parent_value, child_value)
    leaf_value: np.ndarray


def _impurity_classification(counts, total, criterion):
    # counts: (..., C) weighted class counts; total: (...) row sums
    p = counts / np.maximum(total, 1e-300)[..., None]
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=-1)
    logp = np.where(p > 0, np.log2(np.maximum(p, 1e-300)), 0.0)
    return -np.sum(p * logp, axis=-1)


class _Builder:
    def __init__(self, X, y, w, n_classes, cfg: CartConfig):
        self.X = X
        self.y = y  # int labels (classification) or float targets (regression)
        self.w = w
        self.n_classes = n_classes  # None => regression
        self.cfg = cfg
        self.node_counter = 0
        self.d = X.shape[1]

    # --- node statistics ---

    def node_value(self, rows):
        if self.n_classes is None:
            return np.array([np.average(self.y[rows], weights=self.w[rows])])
        counts = np.bincount(self.y[rows], weights=self.w[rows], minlength=self.n_classes)
        return counts / counts.sum()

    def node_impurity(self, rows):
        if self.n_classes is None:
            return float(np.average(
                (self.y[rows] - np.average(self.y[rows], weights=self.w[rows])) ** 2,
                weights=self.w[rows]))
        counts = np.bincount(self.y[rows], weights=self.w[rows], minlength=self.n_classes)
        return float(_impurity_classification(counts, counts.sum(), self.cfg.criterion))

    # --- split search ---

    def candidate_features(self):
        if self.cfg.max_features is None or self.cfg.max_features >= self.d:
            return np.arange(self.d)
        rng = stream(self.cfg.feature_subsample_seed, "node_features", self.node_counter)
        return np.sort(rng.choice(self.d, size=self.cfg.max_features, replace=False))

    def best_split(self, rows, parent_impurity):
        """Best (feature, threshold, gain) or None. Ties: lowest feature,
        then lowest threshold (ensured by ascending scan order)."""
        best = None
        best_gain = _GAIN_EPS
        min_leaf = self.cfg.min_samples_leaf
        thr_rng = None
        if self.cfg.random_thresholds:
            thr_rng = stream(self.cfg.feature_subsample_seed, "node_thresholds",
                             self.node_counter)
        for f in self.candidate_features():
            v = self.X[rows, f]
            if self.cfg.random_thresholds:
                lo, hi = v.min(), v.max()
                if lo == hi:
                    continue
                thr = float(thr_rng.uniform(lo, hi))
                gain = self._gain_at(rows, v, thr, parent_impurity, min_leaf)
                if gain is not None and gain > best_gain:
                    best_gain, best = gain, (int(f), thr)
            else:
                found = self._scan_feature(rows, v, parent_impurity, min_leaf)
                if found is not None and found[1] > best_gain:
                    best_gain, best = found[1], (int(f), found[0])
        if best is None:
            return None
        return best[0], best[1], best_gain

    def _gain_at(self, rows, v, thr, parent_impurity, min_leaf):
        mask = v <= thr
        nl = int(mask.sum())
        if nl < min_leaf or len(rows) - nl < min_leaf:
            return None
        return self._weighted_gain(rows[mask], rows[~mask], parent_impurity)

    def _weighted_gain(self, left_rows, right_rows, parent_impurity):
        wl = self.w[left_rows].sum()
        wr = self.w[right_rows].sum()
        child = (wl * self.node_impurity(left_rows) + wr * self.node_impurity(right_rows)) / (wl + wr)
        return parent_impurity - child

    def _scan_feature(self, rows, v, parent_impurity, min_leaf):
        """Vectorized scan over midpoint thresholds for one feature.

        Returns (threshold, gain) of the best valid split, or None.
        np.argmax picks the first maximum, so equal gains resolve to the
        lowest threshold.
        """
        order = np.argsort(v, kind="stable")
        sv = v[order]
        boundaries = np.flatnonzero(sv[:-1] < sv[1:])  # split after position i
        if boundaries.size == 0:
            return None
        n = len(rows)
        left_n = boundaries + 1
        valid = (left_n >= min_leaf) & (n - left_n >= min_leaf)
        boundaries = boundaries[valid]
        if boundaries.size == 0:
            return None
        sw = self.w[rows][order]
        cw = np.cumsum(sw)
        total_w = cw[-1]
        wl = cw[boundaries]
        wr = total_w - wl

        if self.n_classes is None:
            sy = self.y[rows][order]
            cs = np.cumsum(sw * sy)
            cs2 = np.cumsum(sw * sy * sy)
            sl, sl2 = cs[boundaries], cs2[boundaries]
            sr, sr2 = cs[-1] - sl, cs2[-1] - sl2
            imp_l = sl2 / wl - (sl / wl) ** 2
            imp_r = sr2 / wr - (sr / wr) ** 2
            # guard tiny negatives from cancellation
            imp_l = np.maximum(imp_l, 0.0)
            imp_r = np.maximum(imp_r, 0.0)
        else:
            sy = self.y[rows][order]
            onehot = np.zeros((n, self.n_classes))
            onehot[np.arange(n), sy] = 1.0
            ccounts = np.cumsum(sw[:, None] * onehot, axis=0)
            cl = ccounts[boundaries]
            cr = ccounts[-1] - cl
            imp_l = _impurity_classification(cl, wl, self.cfg.criterion)
            imp_r = _impurity_classification(cr, wr, self.cfg.criterion)

        gains = parent_impurity - (wl * imp_l + wr * imp_r) / total_w
        best = int(np.argmax(gains))
        if gains[best] <= _GAIN_EPS:
            return None
        b = boundaries[best]
        threshold = float((sv[b] + sv[b + 1]) / 2.0)
        return threshold, float(gains[best])

    # --- recursion ---

    def build(self, rows, depth):
        self.node_counter += 1
        value = self.node_value(rows)
        cfg = self.cfg
        if (cfg.max_depth is not None and depth >= cfg.max_depth) or \
                len(rows) < 2 * cfg.min_samples_leaf:
            return TreeNode(value)
        parent_impurity = self.node_impurity(rows)
        if parent_impurity <= _GAIN_EPS:
            return TreeNode(value)
        found = self.best_split(rows, parent_impurity)
        if found is None:
            return TreeNode(value)
        f, thr, _ = found
        mask = self.X[rows, f] <= thr
        left = self.build(rows[mask], depth + 1)
        right = self.build(rows[~mask], depth + 1)
        return TreeNode(value, feature_index=f, threshold=thr, left=left, right=right)


def fit_cart(ds: Dataset, indices, cfg: CartConfig, sample_weights=None,
             targets_override=None) -> TreeNode:
    """Fit a CART tree on the rows of ``ds`` selected by ``indices``.

    sample_weights and targets_override align one-to-one with ``indices``.
    With targets_override the tree is a variance-reducing regression tree
    on those reals (boosting support); otherwise a classification tree on
    the dataset labels.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise EmptyIndexSetError("cannot fit a tree on an empty index set")
    if cfg.max_features is not None and not 1 <= cfg.max_features <= ds.d:
        raise ValueError(f"max_features must be in [1, {ds.d}]")

    X = ds.features[indices]
    if sample_weights is None:
        w = np.ones(len(indices))
    else:
        w = np.asarray(sample_weights, dtype=np.float64)
    if targets_override is not None:
        y = np.asarray(targets_override, dtype=np.float64)
        n_classes = None
    else:
        y = ds.labels[indices]
        n_classes = ds.n_classes

    builder = _Builder(X, y, w, n_classes, cfg)
    return builder.build(np.arange(len(indices)), depth=0)


def predict_value(tree: TreeNode, x) -> np.ndarray:
    """Route x to its leaf and return the leaf value vector."""
    x = np.asarray(x, dtype=np.float64)
    node = tree
    while not node.is_leaf:
        if node.feature_index >= x.shape[0]:
            raise DimensionMismatchError(node.feature_index + 1, x.shape[0])
        node = node.left if x[node.feature_index] <= node.threshold else node.right
    return node.value


def decision_path(tree: TreeNode, x) -> DecisionPath:
    """The sequence of internal-node moves taken by x, with value deltas."""
    x = np.asarray(x, dtype=np.float64)
    steps = []
    node = tree
    while not node.is_leaf:
        if node.feature_index >= x.shape[0]:
            raise DimensionMismatchError(node.feature_index + 1, x.shape[0])
        child = node.left if x[node.feature_index] <= node.threshold else node.right
        steps.append((node.feature_index, node.value, child.value))
        node = child
    return DecisionPath(steps=tuple(steps), leaf_value=node.value)


def used_features(tree: TreeNode) -> set:
    """Feature indices appearing in any internal node."""
    out = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if not node.is_leaf:
            out.add(int(node.feature_index))
            stack.append(node.left)
            stack.append(node.right)
    return out
