"""Model families behind one scoring interface.

Every fitted model exposes ``kind``, ``score_semantics``, ``n_features``,
``scores(X)``, ``params()`` and ``from_params(hp, params)``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, Callable

import numpy as np

from ..table import LabeledMatrix
from .base import as_features, sigmoid
from .bayes import BayesConfig, BayesModel, train_naive_bayes
from .boosting import BoostingConfig, BoostingModel, train_gbt
from .forest import ForestConfig, ForestModel, train_forest
from .logistic import LogisticConfig, LogisticModel, train_logistic
from .mlp import MlpConfig, MlpModel, train_mlp
from .tree import TreeConfig, TreeModel, train_tree

KINDS = ("lr", "dt", "rf", "gbt", "nb", "nn")
DISPLAY_NAMES = {"lr": "LR", "dt": "DT", "rf": "RF", "gbt": "GBT", "nb": "NB", "nn": "NN"}


@dataclass(frozen=True)
class Family:
    config: type
    model: type
    train: Callable[..., Any]


REGISTRY = {
    "lr": Family(LogisticConfig, LogisticModel, train_logistic),
    "dt": Family(TreeConfig, TreeModel, train_tree),
    "rf": Family(ForestConfig, ForestModel, train_forest),
    "gbt": Family(BoostingConfig, BoostingModel, train_gbt),
    "nb": Family(BayesConfig, BayesModel, train_naive_bayes),
    "nn": Family(MlpConfig, MlpModel, train_mlp),
}


def family(kind: str) -> Family:
    try:
        return REGISTRY[kind]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}; valid kinds: {', '.join(KINDS)}") from None


def make_config(kind: str, values: dict | None = None):
    """Build the hyperparameter record for ``kind``, rejecting unknown names."""
    cfg = family(kind).config
    values = dict(values or {})
    known = {f.name for f in fields(cfg)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"unknown {kind} hyperparameters: {unknown}; valid: {sorted(known)}")
    return cfg(**values)


def config_values(hp) -> dict:
    out = {}
    for f in fields(hp):
        v = getattr(hp, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def train_model(kind: str, train: LabeledMatrix, hp=None, workers: int = 1):
    fam = family(kind)
    hp = fam.config() if hp is None else hp
    if kind == "rf":
        return fam.train(train, hp, workers=workers)
    return fam.train(train, hp)


def predict_scores(model, m: LabeledMatrix | np.ndarray) -> np.ndarray:
    """Score every row of ``m``; raises DimensionError on a feature-count mismatch."""
    return model.scores(as_features(m, model.n_features))


__all__ = [
    "KINDS", "DISPLAY_NAMES", "REGISTRY", "Family", "family", "make_config", "config_values",
    "train_model", "predict_scores", "sigmoid",
    "BayesConfig", "BayesModel", "train_naive_bayes",
    "BoostingConfig", "BoostingModel", "train_gbt",
    "ForestConfig", "ForestModel", "train_forest",
    "LogisticConfig", "LogisticModel", "train_logistic",
    "MlpConfig", "MlpModel", "train_mlp",
    "TreeConfig", "TreeModel", "train_tree",
]
