"""One-hidden-layer MLP with ReLU, sigmoid output, Adam, and early stopping.

Loss is mean binary cross-entropy plus 0.5 * l2 * ||W||^2 over the two
weight matrices (biases unregularized). A fraction of the training split
is held out for early stopping on validation accuracy; the best-epoch
weights are restored.
"""

from dataclasses import dataclass

import numpy as np

from ..features import Standardizer

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class MlpParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def copy(self) -> "MlpParams":
        return MlpParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def tensors(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]


def init_params(n_features: int, hidden: int, rng: np.random.Generator) -> MlpParams:
    # Glorot uniform for the weights, zero biases
    lim1 = np.sqrt(6.0 / (n_features + hidden))
    lim2 = np.sqrt(6.0 / (hidden + 1))
    return MlpParams(w1=rng.uniform(-lim1, lim1, size=(n_features, hidden)),
                     b1=np.zeros(hidden),
                     w2=rng.uniform(-lim2, lim2, size=(hidden, 1)),
                     b2=np.zeros(1))


def forward_logits(params: MlpParams, X: np.ndarray) -> np.ndarray:
    hidden = np.maximum(X @ params.w1 + params.b1, 0.0)
    return (hidden @ params.w2 + params.b2)[:, 0]


def loss_and_grads(params: MlpParams, X: np.ndarray, y: np.ndarray,
                   l2: float) -> tuple[float, MlpParams]:
    """Mean BCE + L2 penalty, with analytic gradients for every tensor."""
    n = X.shape[0]
    z1 = X @ params.w1 + params.b1
    a1 = np.maximum(z1, 0.0)
    z2 = (a1 @ params.w2 + params.b2)[:, 0]

    softplus = np.maximum(z2, 0.0) + np.log1p(np.exp(-np.abs(z2)))
    loss = float(np.mean(softplus - y * z2))
    loss += 0.5 * l2 * (float(np.sum(params.w1 ** 2)) + float(np.sum(params.w2 ** 2)))

    dz2 = (_sigmoid(z2) - y)[:, None] / n
    dw2 = a1.T @ dz2 + l2 * params.w2
    db2 = dz2.sum(axis=0)
    da1 = dz2 @ params.w2.T
    dz1 = da1 * (z1 > 0.0)
    dw1 = X.T @ dz1 + l2 * params.w1
    db1 = dz1.sum(axis=0)
    return loss, MlpParams(dw1, db1, dw2, db2)


class _Adam:
    def __init__(self, params: MlpParams, learning_rate: float):
        self.lr = learning_rate
        self.t = 0
        self.m = [np.zeros_like(p) for p in params.tensors()]
        self.v = [np.zeros_like(p) for p in params.tensors()]

    def step(self, params: MlpParams, grads: MlpParams) -> None:
        self.t += 1
        correction1 = 1.0 - ADAM_BETA1 ** self.t
        correction2 = 1.0 - ADAM_BETA2 ** self.t
        for i, (p, g) in enumerate(zip(params.tensors(), grads.tensors())):
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g
            m_hat = self.m[i] / correction1
            v_hat = self.v[i] / correction2
            p -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


class NeuralNetModel:
    def __init__(self, standardizer: Standardizer, params: MlpParams):
        self.standardizer = standardizer
        self.params = params

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform_matrix(X)
        return _sigmoid(forward_logits(self.params, Z))

    def to_params(self) -> dict:
        return {"standardizer": self.standardizer.to_params(),
                "w1": self.params.w1.tolist(), "b1": self.params.b1.tolist(),
                "w2": self.params.w2.tolist(), "b2": self.params.b2.tolist()}

    @classmethod
    def from_params(cls, params: dict) -> "NeuralNetModel":
        weights = MlpParams(w1=np.asarray(params["w1"], dtype=np.float64),
                            b1=np.asarray(params["b1"], dtype=np.float64),
                            w2=np.asarray(params["w2"], dtype=np.float64),
                            b2=np.asarray(params["b2"], dtype=np.float64))
        return cls(standardizer=Standardizer.from_params(params["standardizer"]),
                   params=weights)


def train_neural_net(X: np.ndarray, y: np.ndarray, standardizer: Standardizer, *,
                     hidden: int, learning_rate: float, l2: float, max_epochs: int,
                     batch_size: int, patience: int, val_fraction: float,
                     seed: int) -> NeuralNetModel:
    rng = np.random.default_rng(seed)
    Z = standardizer.transform_matrix(X)
    y = y.astype(np.float64)

    n = Z.shape[0]
    n_val = min(max(1, round(val_fraction * n)), n - 1)
    perm = rng.permutation(n)
    val_idx, fit_idx = perm[:n_val], perm[n_val:]
    Z_fit, y_fit = Z[fit_idx], y[fit_idx]
    Z_val, y_val = Z[val_idx], y[val_idx]

    params = init_params(Z.shape[1], hidden, rng)
    optimizer = _Adam(params, learning_rate)

    best = params.copy()
    best_accuracy = -1.0
    stale_epochs = 0
    for _ in range(max_epochs):
        order = rng.permutation(Z_fit.shape[0])
        for start in range(0, order.size, batch_size):
            batch = order[start : start + batch_size]
            _, grads = loss_and_grads(params, Z_fit[batch], y_fit[batch], l2)
            optimizer.step(params, grads)
        predictions = _sigmoid(forward_logits(params, Z_val)) >= 0.5
        accuracy = float(np.mean(predictions == (y_val == 1.0)))
        if accuracy > best_accuracy:
            best_accuracy = accuracy
            best = params.copy()
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= patience:
                break
    return NeuralNetModel(standardizer=standardizer, params=best)
