"""Logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError
from ..table import LabeledMatrix
from .base import mean_log_loss, require_both_classes, sigmoid, standardizer


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.1
    max_iters: int = 2000
    tol: float = 1e-8
    l2: float = 0.0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0 or self.max_iters < 1 or self.tol <= 0 or self.l2 < 0:
            raise ValueError("learning_rate, max_iters and tol must be positive; l2 non-negative")


def loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray,
                  l2: float = 0.0) -> tuple[float, np.ndarray, float]:
    """Mean log-loss (+ l2/2 |w|^2) and its gradient with respect to (w, b)."""
    z = X @ w + b
    residual = sigmoid(z) - y
    n = y.size
    loss = mean_log_loss(y, z) + 0.5 * l2 * float(w @ w)
    return loss, X.T @ residual / n + l2 * w, float(residual.sum() / n)


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    final_loss: float
    iterations: int
    hp: LogisticConfig
    kind = "lr"
    score_semantics = "probability"

    @property
    def n_features(self) -> int:
        return int(self.weights.size)

    def margins(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights + self.bias

    def scores(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.margins(X))

    def params(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "final_loss": self.final_loss,
            "iterations": self.iterations,
        }

    @classmethod
    def from_params(cls, hp: LogisticConfig, p: dict) -> LogisticModel:
        return cls(np.asarray(p["weights"], dtype=np.float64), float(p["bias"]),
                   float(p["final_loss"]), int(p["iterations"]), hp)


def train_logistic(train: LabeledMatrix, hp: LogisticConfig = LogisticConfig()) -> LogisticModel:
    """Gradient descent on mean log-loss from zero weights.

    Steps are taken in standardised feature coordinates (a fixed diagonal
    preconditioner) and mapped back to raw-feature weights at the end, so the
    learning rate does not have to adapt to each column's units. Stops after
    ``max_iters`` or when one step improves the loss by less than ``tol``.
    """
    # overflow is expected while diverging; it is detected and reported below
    with np.errstate(over="ignore", invalid="ignore"):
        return _train_logistic(train, hp)


def _train_logistic(train: LabeledMatrix, hp: LogisticConfig) -> LogisticModel:
    X, y = train.features, train.labels.astype(np.float64)
    require_both_classes(y, "logistic regression")
    shift, scale = standardizer(X)
    Xs = (X - shift) / scale
    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = loss_and_grad(w, b, Xs, y, hp.l2)
    iterations = 0
    for iterations in range(1, hp.max_iters + 1):
        w = w - hp.learning_rate * gw
        b = b - hp.learning_rate * gb
        new_loss, gw, gb = loss_and_grad(w, b, Xs, y, hp.l2)
        if not np.isfinite(new_loss):
            raise DivergenceError(
                f"logistic regression loss became non-finite at iteration {iterations}; "
                "try a smaller learning_rate"
            )
        improvement = loss - new_loss
        loss = new_loss
        if abs(improvement) < hp.tol:
            break
    weights = w / scale
    bias = float(b - np.sum(w * shift / scale))
    final = mean_log_loss(y, X @ weights + bias)
    return LogisticModel(weights, bias, final, iterations, hp)
