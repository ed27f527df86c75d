"""Random forest of Gini-impurity classification trees on raw features.

Each tree trains on a bootstrap resample and considers floor(sqrt(d))
random candidate features per node. Trees grow until pure or down to
min_leaf samples; the forest probability is the fraction of positive
tree votes. Per-tree seeds derive deterministically from (seed, index).
"""

import math

import numpy as np

from ._split import TreeNode, best_gini_split, tree_to_dict


class RandomForestModel:
    def __init__(self, trees: list[TreeNode]):
        self.trees = trees

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            votes += [tree.predict_one(row) for row in X]
        return votes / len(self.trees)

    def to_params(self) -> dict:
        return {"trees": [tree_to_dict(t) for t in self.trees]}

    @classmethod
    def from_params(cls, params: dict) -> "RandomForestModel":
        return cls([TreeNode.from_dict(t) for t in params["trees"]])


def _majority(y: np.ndarray) -> int:
    pos = int(y.sum())
    # exact ties vote positive, matching the >= 0.5 prediction convention
    return 1 if 2 * pos >= y.size else 0


def _grow_tree(X: np.ndarray, y: np.ndarray, max_features: int, min_leaf: int,
               rng: np.random.Generator) -> TreeNode:
    d = X.shape[1]
    root = TreeNode()
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        y_node = y[idx]
        pos = int(y_node.sum())
        if pos == 0 or pos == y_node.size or y_node.size <= min_leaf:
            node.value = _majority(y_node)
            continue
        candidates = rng.choice(d, size=min(max_features, d), replace=False)
        found = best_gini_split(X[idx], y_node, candidates)
        if found is None:
            node.value = _majority(y_node)
            continue
        feature, threshold, _ = found
        mask = X[idx, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        node.left = TreeNode()
        node.right = TreeNode()
        stack.append((node.right, idx[~mask]))
        stack.append((node.left, idx[mask]))
    return root


def train_random_forest(X: np.ndarray, y: np.ndarray, n_trees: int, min_leaf: int,
                        seed: int, max_features: int | None = None) -> RandomForestModel:
    if max_features is None:
        max_features = max(1, math.floor(math.sqrt(X.shape[1])))
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for tree_seq in children:
        rng = np.random.default_rng(tree_seq)
        bootstrap = rng.integers(0, X.shape[0], size=X.shape[0])
        trees.append(_grow_tree(X[bootstrap], y[bootstrap], max_features, min_leaf, rng))
    return RandomForestModel(trees)
