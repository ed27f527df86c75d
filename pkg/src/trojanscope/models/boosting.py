"""Gradient boosting with logistic loss and depth-bounded regression trees.

Stages fit squared-error trees to the negative gradient (y - p); leaf
values are one-step Newton updates sum(residual) / sum(p*(1-p)) with the
denominator floored, applied with a shrinkage factor. The per-stage mean
training loss is recorded so monotonicity can be asserted.
"""

import numpy as np

from ._split import TreeNode, best_sse_split, tree_to_dict

HESSIAN_FLOOR = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _log_loss(y: np.ndarray, score: np.ndarray) -> float:
    # softplus(score) - y*score, stable for large |score|
    softplus = np.maximum(score, 0.0) + np.log1p(np.exp(-np.abs(score)))
    return float(np.mean(softplus - y * score))


class GradientBoostingModel:
    def __init__(self, init_score: float, learning_rate: float, trees: list[TreeNode],
                 train_losses: list[float] | None = None):
        self.init_score = init_score
        self.learning_rate = learning_rate
        self.trees = trees
        self.train_losses = train_losses or []

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        score = np.full(X.shape[0], self.init_score, dtype=np.float64)
        for tree in self.trees:
            score += self.learning_rate * np.array([tree.predict_one(row) for row in X])
        return score

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_scores(X))

    def to_params(self) -> dict:
        return {"init_score": self.init_score, "learning_rate": self.learning_rate,
                "trees": [tree_to_dict(t) for t in self.trees]}

    @classmethod
    def from_params(cls, params: dict) -> "GradientBoostingModel":
        return cls(init_score=float(params["init_score"]),
                   learning_rate=float(params["learning_rate"]),
                   trees=[TreeNode.from_dict(t) for t in params["trees"]])


def _grow_regression_tree(X: np.ndarray, residual: np.ndarray, hessian: np.ndarray,
                          max_depth: int) -> TreeNode:
    root = TreeNode()
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        found = best_sse_split(X[idx], residual[idx]) if depth < max_depth else None
        if found is None:
            denom = max(float(hessian[idx].sum()), HESSIAN_FLOOR)
            node.value = float(residual[idx].sum()) / denom
            continue
        feature, threshold = found
        mask = X[idx, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        node.left = TreeNode()
        node.right = TreeNode()
        stack.append((node.right, idx[~mask], depth + 1))
        stack.append((node.left, idx[mask], depth + 1))
    return root


def train_gradient_boosting(X: np.ndarray, y: np.ndarray, n_trees: int,
                            learning_rate: float, max_depth: int) -> GradientBoostingModel:
    y = y.astype(np.float64)
    p_pos = float(y.mean())
    init_score = float(np.log(p_pos / (1.0 - p_pos)))
    score = np.full(X.shape[0], init_score, dtype=np.float64)
    trees: list[TreeNode] = []
    losses: list[float] = []
    for _ in range(n_trees):
        p = _sigmoid(score)
        residual = y - p
        hessian = p * (1.0 - p)
        tree = _grow_regression_tree(X, residual, hessian, max_depth)
        score += learning_rate * np.array([tree.predict_one(row) for row in X])
        trees.append(tree)
        losses.append(_log_loss(y, score))
    return GradientBoostingModel(init_score=init_score, learning_rate=learning_rate,
                                 trees=trees, train_losses=losses)
