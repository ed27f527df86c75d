"""Gaussian naive Bayes on standardized features.

Per-class, per-feature Gaussian likelihoods with class priors from
frequencies. Variances are smoothed by a ratio of the largest feature
variance in the (standardized) training matrix.
"""

import numpy as np

from ..features import Standardizer


class GaussianBayesModel:
    def __init__(self, standardizer: Standardizer, priors: np.ndarray,
                 means: np.ndarray, variances: np.ndarray):
        self.standardizer = standardizer
        self.priors = priors          # shape (2,)
        self.means = means            # shape (2, d)
        self.variances = variances    # shape (2, d), smoothed

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform_matrix(X)
        log_joint = np.empty((Z.shape[0], 2))
        for cls in (0, 1):
            diff = Z - self.means[cls]
            log_like = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances[cls])
                                     + diff * diff / self.variances[cls], axis=1)
            log_joint[:, cls] = np.log(self.priors[cls]) + log_like
        # normalized posterior of the positive class via log-sum-exp
        peak = log_joint.max(axis=1, keepdims=True)
        weights = np.exp(log_joint - peak)
        return weights[:, 1] / weights.sum(axis=1)

    def to_params(self) -> dict:
        return {"standardizer": self.standardizer.to_params(),
                "priors": self.priors.tolist(), "means": self.means.tolist(),
                "variances": self.variances.tolist()}

    @classmethod
    def from_params(cls, params: dict) -> "GaussianBayesModel":
        return cls(standardizer=Standardizer.from_params(params["standardizer"]),
                   priors=np.asarray(params["priors"], dtype=np.float64),
                   means=np.asarray(params["means"], dtype=np.float64),
                   variances=np.asarray(params["variances"], dtype=np.float64))


def train_gaussian_bayes(X: np.ndarray, y: np.ndarray, standardizer: Standardizer,
                         var_smoothing_ratio: float) -> GaussianBayesModel:
    Z = standardizer.transform_matrix(X)
    # floor keeps likelihoods finite even if every feature is constant
    smoothing = max(var_smoothing_ratio * float(Z.var(axis=0).max()), 1e-300)
    priors = np.empty(2)
    means = np.empty((2, Z.shape[1]))
    variances = np.empty((2, Z.shape[1]))
    for cls in (0, 1):
        members = Z[y == cls]
        priors[cls] = members.shape[0] / Z.shape[0]
        means[cls] = members.mean(axis=0)
        variances[cls] = members.var(axis=0) + smoothing
    return GaussianBayesModel(standardizer=standardizer, priors=priors,
                              means=means, variances=variances)
