"""Greedy axis-aligned split search shared by the tree ensembles.

Candidate thresholds are midpoints between consecutive distinct sorted
values. Ties are broken by lowest feature index, then lowest threshold,
so tree growth is fully deterministic. The split rule is x <= threshold
goes left; midpoints that round down onto the lower value still separate
the two sides.
"""

import numpy as np

INF = float("inf")


def best_gini_split(X: np.ndarray, y: np.ndarray, feature_indices) -> tuple[int, float, float] | None:
    """Minimize weighted Gini impurity over the candidate features.

    Returns (feature, threshold, weighted_impurity) or None when no
    candidate feature has two distinct values.
    """
    n = y.size
    total_pos = float(y.sum())
    best_feat = -1
    best_thr = 0.0
    best_score = INF
    for f in sorted(int(f) for f in feature_indices):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        distinct = xs[1:] != xs[:-1]
        if not distinct.any():
            continue
        pos_left = np.cumsum(y[order].astype(np.float64))[:-1]
        n_left = np.arange(1, n, dtype=np.float64)
        n_right = n - n_left
        pos_right = total_pos - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        weighted = (n_left * 2.0 * p_l * (1.0 - p_l) + n_right * 2.0 * p_r * (1.0 - p_r)) / n
        weighted[~distinct] = INF
        i = int(np.argmin(weighted))
        if weighted[i] < best_score:
            best_score = float(weighted[i])
            best_feat = f
            best_thr = 0.5 * (xs[i] + xs[i + 1])
    if best_feat < 0:
        return None
    return best_feat, best_thr, best_score


def best_sse_split(X: np.ndarray, r: np.ndarray) -> tuple[int, float] | None:
    """Minimize left+right sum of squared residual error over all features."""
    n = r.size
    best_feat = -1
    best_thr = 0.0
    best_score = INF
    for f in range(X.shape[1]):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        distinct = xs[1:] != xs[:-1]
        if not distinct.any():
            continue
        rs = r[order]
        csum = np.cumsum(rs)[:-1]
        csq = np.cumsum(rs * rs)[:-1]
        n_left = np.arange(1, n, dtype=np.float64)
        n_right = n - n_left
        sum_total = csum[-1] + rs[-1]
        sq_total = csq[-1] + rs[-1] * rs[-1]
        sse_left = csq - csum * csum / n_left
        sse_right = (sq_total - csq) - (sum_total - csum) ** 2 / n_right
        score = sse_left + sse_right
        score[~distinct] = INF
        i = int(np.argmin(score))
        if score[i] < best_score:
            best_score = float(score[i])
            best_feat = f
            best_thr = 0.5 * (xs[i] + xs[i + 1])
    if best_feat < 0:
        return None
    return best_feat, best_thr


def tree_to_dict(node) -> dict:
    if node.is_leaf:
        return {"leaf": node.value}
    return {"feature": node.feature, "threshold": node.threshold,
            "left": tree_to_dict(node.left), "right": tree_to_dict(node.right)}


class TreeNode:
    """Binary tree node; internal nodes split on x[feature] <= threshold."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature=-1, threshold=0.0, left=None, right=None, value=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def predict_one(self, x: np.ndarray):
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        if "leaf" in data:
            return cls(value=data["leaf"])
        return cls(feature=int(data["feature"]), threshold=float(data["threshold"]),
                   left=cls.from_dict(data["left"]), right=cls.from_dict(data["right"]))
