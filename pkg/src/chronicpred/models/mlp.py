"""Single-hidden-layer rectifier network with a sigmoid output."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError, TrainingError
from ..rng import SplitMix64, derive_seed
from ..table import LabeledMatrix
from .base import mean_log_loss, sigmoid, standardizer


@dataclass(frozen=True)
class MlpConfig:
    hidden: int = 32
    learning_rate: float = 0.01
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hidden < 1 or self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("hidden, learning_rate, epochs and batch_size must be positive")


@dataclass(frozen=True)
class Weights:
    w1: np.ndarray  # (d, h)
    b1: np.ndarray  # (h,)
    w2: np.ndarray  # (h,)
    b2: float

    def flat(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2, [self.b2]])

    @classmethod
    def unflat(cls, v: np.ndarray, d: int, h: int) -> Weights:
        a = d * h
        return cls(v[:a].reshape(d, h).copy(), v[a:a + h].copy(), v[a + h:a + 2 * h].copy(), float(v[-1]))


def forward(p: Weights, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pre = X @ p.w1 + p.b1
    hidden = np.maximum(pre, 0.0)
    return pre, hidden, hidden @ p.w2 + p.b2


def loss_and_grad(p: Weights, X: np.ndarray, y: np.ndarray) -> tuple[float, Weights]:
    """Mean log-loss and its exact backpropagated gradient."""
    pre, hidden, z = forward(p, X)
    n = y.size
    dz = (sigmoid(z) - y) / n
    g_w2 = hidden.T @ dz
    g_b2 = float(dz.sum())
    dpre = np.outer(dz, p.w2) * (pre > 0)
    return mean_log_loss(y, z), Weights(X.T @ dpre, dpre.sum(axis=0), g_w2, g_b2)


def glorot(rng: SplitMix64, fan_in: int, fan_out: int, shape: tuple[int, ...]) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    u = rng.random_block(int(np.prod(shape)))
    return ((2.0 * u - 1.0) * limit).reshape(shape)


def init_weights(seed: int, d: int, h: int) -> Weights:
    rng = SplitMix64(derive_seed(seed, "nn.init"))
    return Weights(glorot(rng, d, h, (d, h)), np.zeros(h), glorot(rng, h, 1, (h,)), 0.0)


@dataclass(frozen=True)
class MlpModel:
    weights: Weights
    shift: np.ndarray
    scale: np.ndarray
    final_loss: float
    hp: MlpConfig
    kind = "nn"
    score_semantics = "probability"

    @property
    def n_features(self) -> int:
        return int(self.shift.size)

    def scores(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(forward(self.weights, (X - self.shift) / self.scale)[2])

    def params(self) -> dict:
        w = self.weights
        return {
            "w1": w.w1.tolist(), "b1": w.b1.tolist(), "w2": w.w2.tolist(), "b2": w.b2,
            "shift": self.shift.tolist(), "scale": self.scale.tolist(),
            "final_loss": self.final_loss,
        }

    @classmethod
    def from_params(cls, hp: MlpConfig, p: dict) -> MlpModel:
        shift = np.asarray(p["shift"], dtype=np.float64)
        h = len(p["b1"])
        w = Weights(np.asarray(p["w1"], dtype=np.float64).reshape(shift.size, h),
                    np.asarray(p["b1"], dtype=np.float64),
                    np.asarray(p["w2"], dtype=np.float64), float(p["b2"]))
        return cls(w, shift, np.asarray(p["scale"], dtype=np.float64), float(p["final_loss"]), hp)


def train_mlp(train: LabeledMatrix, hp: MlpConfig = MlpConfig()) -> MlpModel:
    """Mini-batch SGD on standardised inputs.

    Each epoch visits the rows in a fresh permutation drawn from the seed, so
    the fitted weights depend only on (data, hp).
    """
    # overflow is expected while diverging; it is detected and reported below
    with np.errstate(over="ignore", invalid="ignore"):
        return _train_mlp(train, hp)


def _train_mlp(train: LabeledMatrix, hp: MlpConfig) -> MlpModel:
    X, y = train.features, train.labels.astype(np.float64)
    if y.size == 0:
        raise TrainingError("neural network: training set is empty")
    shift, scale = standardizer(X)
    Xs = (X - shift) / scale
    p = init_weights(hp.seed, train.d, hp.hidden)
    order_rng = SplitMix64(derive_seed(hp.seed, "nn.shuffle"))
    n = y.size
    for epoch in range(hp.epochs):
        order = order_rng.permutation(n)
        for start in range(0, n, hp.batch_size):
            rows = order[start:start + hp.batch_size]
            _, g = loss_and_grad(p, Xs[rows], y[rows])
            lr = hp.learning_rate
            p = Weights(p.w1 - lr * g.w1, p.b1 - lr * g.b1, p.w2 - lr * g.w2, p.b2 - lr * g.b2)
        if not np.all(np.isfinite(p.flat())):
            raise DivergenceError(f"neural network weights became non-finite in epoch {epoch + 1}; "
                                  "try a smaller learning_rate")
    loss = loss_and_grad(p, Xs, y)[0]
    if not math.isfinite(loss):
        raise DivergenceError("neural network loss is non-finite; try a smaller learning_rate")
    return MlpModel(p, shift, scale, loss, hp)
