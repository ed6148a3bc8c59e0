"""Independent brute-force oracles used to cross-check the library.

These deliberately avoid the library's decision_path / contributions /
scipy code paths: they re-traverse trees directly and recompute ranks
from scratch, so agreement is meaningful.
"""

from collections import defaultdict

import numpy as np


def walk_contributions(tree, x, class_index):
    """(c_full, {feature: delta}, leaf_value) by direct traversal."""
    node = tree
    c_full = float(node.value[class_index])
    contrib = defaultdict(float)
    while node.left is not None:
        child = node.left if x[node.feature_index] <= node.threshold else node.right
        contrib[int(node.feature_index)] += float(
            child.value[class_index] - node.value[class_index]
        )
        node = child
    return c_full, dict(contrib), float(node.value[class_index])


def model_contributions(model, x, class_index):
    """Re-derive a full-model breakdown: average over forest members,
    lr-scaled sum over boosting stages (stage roots folded into the base)."""
    if model.tree is not None:
        return walk_contributions(model.tree, x, class_index)
    if model.trees is not None:
        roots, leaves = [], []
        acc = defaultdict(float)
        for t in model.trees:
            r, c, leaf = walk_contributions(t, x, class_index)
            roots.append(r)
            leaves.append(leaf)
            for k, v in c.items():
                acc[k] += v
        m = len(model.trees)
        return (float(np.mean(roots)),
                {k: v / m for k, v in acc.items()},
                float(np.mean(leaves)))
    lr = model.spec.learning_rate
    base = float(model.base_scores[class_index])
    acc = defaultdict(float)
    f_x = base
    for stage in model.stages:
        r, c, leaf = walk_contributions(stage[class_index], x, 0)
        base += lr * r
        f_x += lr * leaf
        for k, v in c.items():
            acc[k] += lr * v
    return base, dict(acc), f_x


def explain_cv_by_hand(weights, K):
    """Eq.-style dispersion computed with plain Python floats."""
    return sum((w - 1.0 / K) ** 2 for w in weights)


def _ranks(values):
    """Average ranks with tie handling, 1-based."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def spearman_by_hand(xs, ys):
    """Pearson correlation of average ranks; None when undefined."""
    if len(xs) < 2:
        return None
    rx, ry = _ranks(list(xs)), _ranks(list(ys))
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    dx = sum((a - mx) ** 2 for a in rx) ** 0.5
    dy = sum((b - my) ** 2 for b in ry) ** 0.5
    if dx == 0 or dy == 0:
        return None
    return num / (dx * dy)


def random_tree(rng, max_depth, n_features, n_classes):
    """A random (not fitted) probability-valued tree for oracle tests."""
    from treexplain.tree import TreeNode

    def dist():
        v = rng.random(n_classes) + 0.05
        return v / v.sum()

    def build(depth):
        if depth >= max_depth or rng.random() < 0.3:
            return TreeNode(dist())
        return TreeNode(
            dist(),
            feature_index=int(rng.integers(0, n_features)),
            threshold=float(rng.uniform(-1.0, 1.0)),
            left=build(depth + 1),
            right=build(depth + 1),
        )

    node = build(0)
    if node.left is None:  # ensure at least one split
        node = random_tree(rng, max_depth, n_features, n_classes)
    return node
