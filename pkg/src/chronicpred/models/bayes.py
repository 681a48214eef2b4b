"""Naive Bayes over mixed Gaussian and categorical-code features."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..table import LabeledMatrix
from .base import require_both_classes

LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class BayesConfig:
    alpha: float = 1.0
    var_floor: float = 1e-9
    categorical: tuple[int, ...] = ()  # matrix columns holding encoded category codes

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.var_floor <= 0:
            raise ValueError("alpha must be >= 0 and var_floor > 0")
        object.__setattr__(self, "categorical", tuple(sorted(set(int(c) for c in self.categorical))))


@dataclass(frozen=True)
class CategoricalTable:
    """Smoothed per-class frequencies over known codes plus one slot for unseen codes."""

    codes: tuple[float, ...]
    probs: np.ndarray  # shape (2, len(codes) + 1); each row sums to 1

    def log_prob(self, x: np.ndarray) -> np.ndarray:
        """(n, 2) log-likelihood of each row's code under each class."""
        slot = np.full(x.size, len(self.codes), dtype=np.int64)
        for k, code in enumerate(self.codes):
            slot[x == code] = k
        return np.log(np.maximum(self.probs[:, slot].T, LOG_FLOOR))


@dataclass(frozen=True)
class BayesModel:
    log_prior: np.ndarray  # (2,)
    means: np.ndarray  # (2, d); unused for categorical columns
    variances: np.ndarray  # (2, d)
    tables: dict[int, CategoricalTable]
    hp: BayesConfig
    kind = "nb"
    score_semantics = "probability"

    @property
    def n_features(self) -> int:
        return int(self.means.shape[1])

    @property
    def priors(self) -> np.ndarray:
        return np.exp(self.log_prior)

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        jll = np.tile(self.log_prior, (X.shape[0], 1))
        for j in range(self.n_features):
            if j in self.tables:
                jll += self.tables[j].log_prob(X[:, j])
            else:
                var = self.variances[:, j]
                diff = X[:, j, None] - self.means[None, :, j]
                jll += -0.5 * (np.log(2.0 * math.pi * var) + diff * diff / var)
        return jll

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """(n, 2) posterior over classes (0, 1)."""
        jll = self.joint_log_likelihood(X)
        norm = np.logaddexp(jll[:, 0], jll[:, 1])
        return np.exp(jll - norm[:, None])

    def scores(self, X: np.ndarray) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        # 1 / (1 + exp(l0 - l1)), written to stay finite when both are tiny
        return np.exp(jll[:, 1] - np.logaddexp(jll[:, 0], jll[:, 1]))

    def params(self) -> dict:
        return {
            "log_prior": self.log_prior.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "tables": [
                {"column": j, "codes": list(t.codes), "probs": t.probs.tolist()}
                for j, t in sorted(self.tables.items())
            ],
        }

    @classmethod
    def from_params(cls, hp: BayesConfig, p: dict) -> BayesModel:
        tables = {
            int(t["column"]): CategoricalTable(tuple(float(c) for c in t["codes"]),
                                               np.asarray(t["probs"], dtype=np.float64))
            for t in p["tables"]
        }
        return cls(
            np.asarray(p["log_prior"], dtype=np.float64),
            np.asarray(p["means"], dtype=np.float64).reshape(2, -1),
            np.asarray(p["variances"], dtype=np.float64).reshape(2, -1),
            tables,
            hp,
        )


def train_naive_bayes(train: LabeledMatrix, hp: BayesConfig = BayesConfig()) -> BayesModel:
    X, y = train.features, train.labels
    require_both_classes(y, "naive Bayes")
    bad = [c for c in hp.categorical if not 0 <= c < train.d]
    if bad:
        raise ValueError(f"categorical column indices out of range for d={train.d}: {bad}")
    n = y.size
    groups = [X[y == 0], X[y == 1]]
    log_prior = np.array([math.log(g.shape[0] / n) for g in groups])
    means = np.zeros((2, train.d))
    variances = np.ones((2, train.d))
    tables = {}
    for j in range(train.d):
        if j in hp.categorical:
            codes = tuple(float(v) for v in np.unique(X[:, j]))
            probs = np.empty((2, len(codes) + 1))
            for c, g in enumerate(groups):
                counts = np.array([np.count_nonzero(g[:, j] == code) for code in codes] + [0], dtype=np.float64)
                denom = g.shape[0] + hp.alpha * (len(codes) + 1)
                probs[c] = (counts + hp.alpha) / denom
            tables[j] = CategoricalTable(codes, probs)
            continue
        for c, g in enumerate(groups):
            col = g[:, j].tolist()
            mu = math.fsum(col) / len(col)
            var = math.fsum((v - mu) ** 2 for v in col) / len(col)
            means[c, j] = mu
            variances[c, j] = max(var, hp.var_floor)
    return BayesModel(log_prior, means, variances, tables, hp)
