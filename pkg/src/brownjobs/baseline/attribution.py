"""Exact per-feature attributions from a boosted tree ensemble.

For regression-tree ensembles every internal node carries the mean
training target of the samples that reach it, so a root-to-leaf walk
decomposes the leaf value exactly: each split contributes
(child value - node value) to the feature it splits on, scaled by the
stage's learning rate. Summed over stages this is an exact additive
attribution of the ensemble's raw score relative to its base value.
"""

from __future__ import annotations

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier


def tree_path_contributions(
    model: GradientBoostingClassifier, X: np.ndarray
) -> np.ndarray:
    """(n_samples, n_features) additive contributions of the raw score."""
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    contributions = np.zeros((n, d), dtype=np.float64)
    lr = model.learning_rate
    for stage in model.estimators_[:, 0]:  # binary: one tree per stage
        tree = stage.tree_
        left = tree.children_left
        right = tree.children_right
        feature = tree.feature
        value = tree.value[:, 0, 0]
        # node_visits[i, node] is 1 when sample i's path includes node
        node_visits = stage.decision_path(X).toarray().astype(bool)
        for node in range(tree.node_count):
            if left[node] == -1:
                continue  # leaf
            f = feature[node]
            for child in (left[node], right[node]):
                visited = node_visits[:, child]
                if visited.any():
                    contributions[visited, f] += lr * (value[child] - value[node])
    return contributions
