"""Decision-path attribution and the dispersion-based explanation score.

A fitted model's scalar score for its predicted class decomposes into a
base value plus one additive contribution per feature, accumulated from
node-value deltas along decision paths. Feature weights derived from the
decomposition feed a coefficient-of-variation style dispersion score:
low dispersion means the model spreads its reliance evenly over the
features it uses.

Two weight modes exist because the literal weight definition
(c_full + contrib_k) / f(x) only sums to one when the base value is zero;
normalized mode divides by the actual sum instead. Both are kept and
neither is privileged beyond literal being the default.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .ensemble import FittedModel, _all_class_scores
from .errors import (
    AllInstancesSkippedError,
    NearZeroDenominatorError,
    NoFeaturesUsedError,
)
from .tree import decision_path

DENOM_EPS = 1e-12

MODES = ("literal", "normalized")


@dataclass(frozen=True)
class ContributionBreakdown:
    """Additive decomposition f_x = c_full + sum(contrib) for one instance."""

    c_full: float
    contrib: dict  # feature_index -> contribution
    f_x: float
    target_class: int
    instance_id: int


@dataclass(frozen=True)
class WeightVector:
    weights: dict  # feature_index -> weight
    mode: str
    mean_weight: float


@dataclass(frozen=True)
class ExplainScore:
    per_instance: tuple  # of (instance_id, value)
    aggregate: float
    K: int
    mode: str
    skipped: int


def _tree_breakdown(tree, x, class_index):
    """(root_value, {feature: delta_sum}) along x's path, for one class."""
    path = decision_path(tree, x)
    contrib = {}
    for feature, parent, child in path.steps:
        contrib[feature] = contrib.get(feature, 0.0) + float(
            child[class_index] - parent[class_index]
        )
    return float(tree.value[class_index]), contrib


def contributions(model: FittedModel, ds: Dataset, instance: int) -> ContributionBreakdown:
    """Decompose the model's predicted-class score for one dataset row.

    Trees: base is the root value, contributions are path-step deltas.
    Forests: arithmetic mean of member-tree breakdowns. Boosting: base is
    the class log-prior plus the learning-rate-scaled stage-tree root
    values, contributions the lr-scaled stage path deltas; pulling the
    stage roots into the base keeps the decomposition exactly additive.
    """
    x = ds.features[instance]
    scores = _all_class_scores(model, x)
    target = int(np.argmax(scores))
    f_x = float(scores[target])

    if model.tree is not None:
        c_full, contrib = _tree_breakdown(model.tree, x, target)
    elif model.trees is not None:
        roots = []
        contrib = {}
        for t in model.trees:
            root, tc = _tree_breakdown(t, x, target)
            roots.append(root)
            for k, v in tc.items():
                contrib[k] = contrib.get(k, 0.0) + v
        m = len(model.trees)
        c_full = float(np.mean(roots))
        contrib = {k: v / m for k, v in contrib.items()}
    else:
        lr = model.spec.learning_rate
        c_full = float(model.base_scores[target])
        contrib = {}
        for stage in model.stages:
            root, tc = _tree_breakdown(stage[target], x, 0)
            c_full += lr * root
            for k, v in tc.items():
                contrib[k] = contrib.get(k, 0.0) + lr * v

    return ContributionBreakdown(
        c_full=c_full,
        contrib=contrib,
        f_x=f_x,
        target_class=target,
        instance_id=int(instance),
    )


def feature_weights(b: ContributionBreakdown, model_used_features, mode="literal") -> WeightVector:
    """Per-feature weights over the model's used-feature set.

    Used features with no contribution on this instance's paths count as
    contribution zero, so their weight reduces to c_full / denominator.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode!r}")
    feats = sorted(model_used_features)
    if not feats:
        raise NoFeaturesUsedError("model has no internal splits")

    per_feature = {k: b.c_full + b.contrib.get(k, 0.0) for k in feats}
    if mode == "literal":
        denom = b.f_x
    else:
        denom = sum(per_feature.values())
    if abs(denom) < DENOM_EPS:
        raise NearZeroDenominatorError(
            f"instance {b.instance_id}: |denominator| < {DENOM_EPS}"
        )
    weights = {k: v / denom for k, v in per_feature.items()}
    return WeightVector(
        weights=weights,
        mode=mode,
        mean_weight=sum(weights.values()) / len(weights),
    )


def explain_cv_instance(w: WeightVector, K: int) -> float:
    """Dispersion of one instance's feature weights.

    Literal mode is sum((w_k - 1/K)^2). Normalized mode evaluates the
    coefficient-of-variation form sum((w_k - wbar)^2) / (K * wbar),
    which coincides with the literal form whenever the weights sum to 1.
    """
    if K < 1 or len(w.weights) != K:
        raise ValueError(f"weight vector must cover exactly K={K} features")
    vals = np.array([w.weights[k] for k in sorted(w.weights)])
    if w.mode == "literal":
        return float(np.sum((vals - 1.0 / K) ** 2))
    return float(np.sum((vals - w.mean_weight) ** 2) / (K * w.mean_weight))


def explain_cv_model(model: FittedModel, ds: Dataset, indices, mode="literal") -> ExplainScore:
    """Aggregate the per-instance dispersion score over an index set.

    Instances whose denominator is near zero are skipped and counted;
    the aggregate is the plain mean of the surviving values, summed in
    index order.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise ValueError("indices must be non-empty")
    used = model.used_feature_set()
    if not used:
        raise NoFeaturesUsedError("model has no internal splits")
    K = len(used)

    per_instance = []
    skipped = 0
    for i in indices:
        b = contributions(model, ds, int(i))
        try:
            w = feature_weights(b, used, mode)
        except NearZeroDenominatorError:
            skipped += 1
            continue
        per_instance.append((int(i), explain_cv_instance(w, K)))

    if skipped > len(indices) / 2:
        raise AllInstancesSkippedError(
            f"{skipped} of {len(indices)} instances had near-zero denominators"
        )
    aggregate = float(np.mean([v for _, v in per_instance]))
    return ExplainScore(
        per_instance=tuple(per_instance),
        aggregate=aggregate,
        K=K,
        mode=mode,
        skipped=skipped,
    )
