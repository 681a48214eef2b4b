"""Gradient-boosted regression trees for binary log-loss."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..table import LabeledMatrix
from .base import mean_log_loss, require_both_classes, sigmoid
from .tree import Tree, grow_tree

HESSIAN_FLOOR = 1e-12


@dataclass(frozen=True)
class BoostingConfig:
    n_trees: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_leaf: int = 1

    def __post_init__(self) -> None:
        if self.n_trees < 0 or self.learning_rate <= 0 or self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError("invalid boosting hyperparameters")


@dataclass(frozen=True)
class BoostingModel:
    base_score: float
    trees: tuple[Tree, ...]
    learning_rate: float
    hp: BoostingConfig
    loss_trace: tuple[float, ...] = ()
    raw: bool = False
    kind = "gbt"

    @property
    def score_semantics(self) -> str:
        return "margin" if self.raw else "probability"

    n_inputs: int = 0

    @property
    def n_features(self) -> int:
        return self.n_inputs

    def margins(self, X: np.ndarray) -> np.ndarray:
        f = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            f += self.learning_rate * tree.predict(X)
        return f

    def scores(self, X: np.ndarray) -> np.ndarray:
        f = self.margins(X)
        return f if self.raw else sigmoid(f)

    def as_margin(self) -> BoostingModel:
        return replace(self, raw=True)

    def params(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees],
            "loss_trace": list(self.loss_trace),
            "raw": self.raw,
            "n_features": self.n_features,
        }

    @classmethod
    def from_params(cls, hp: BoostingConfig, p: dict) -> BoostingModel:
        return cls(
            float(p["base_score"]),
            tuple(Tree.from_dict(t) for t in p["trees"]),
            float(p["learning_rate"]),
            hp,
            tuple(float(v) for v in p["loss_trace"]),
            bool(p["raw"]),
            int(p["n_features"]),
        )


def train_gbt(train: LabeledMatrix, hp: BoostingConfig = BoostingConfig()) -> BoostingModel:
    """Logistic boosting from the base-rate log-odds.

    Each round fits a variance-reduction regression tree to the residuals
    ``y - sigmoid(F)`` and sets every leaf to one Newton step,
    ``sum(residual) / sum(p * (1 - p))`` over the leaf's rows.
    """
    X, y = train.features, train.labels.astype(np.float64)
    require_both_classes(y, "gradient boosting")
    rate = float(y.mean())
    base = math.log(rate / (1.0 - rate))
    margin = np.full(y.size, base)
    trace = [mean_log_loss(y, margin)]
    trees = []
    for _ in range(hp.n_trees):
        p = sigmoid(margin)
        residual = y - p
        hess = p * (1.0 - p)

        def newton(idx: np.ndarray, r=residual, h=hess) -> float:
            return float(r[idx].sum() / max(h[idx].sum(), HESSIAN_FLOOR))

        tree, _ = grow_tree(X, residual, hp.max_depth, hp.min_samples_leaf, newton)
        trees.append(tree)
        margin = margin + hp.learning_rate * tree.predict(X)
        trace.append(mean_log_loss(y, margin))
    return BoostingModel(base, tuple(trees), hp.learning_rate, hp, tuple(trace), False, train.d)
