"""Random forest of Gini CART trees."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..rng import SplitMix64, derive_seed
from ..table import LabeledMatrix
from .tree import Tree, grow_tree, make_feature_sampler, positive_fraction


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    m_try: int | None = None  # None: ceil(sqrt(d))
    max_depth: int = 12
    min_samples_leaf: int = 1
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self) -> None:
        if self.n_trees < 1 or self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError("n_trees, max_depth and min_samples_leaf must be positive")
        if self.m_try is not None and self.m_try < 1:
            raise ValueError("m_try must be positive")

    def resolved_m_try(self, d: int) -> int:
        m = self.m_try if self.m_try is not None else math.ceil(math.sqrt(d))
        return max(1, min(m, d))


def tree_seed(master: int, index: int) -> int:
    return derive_seed(master, f"rf.tree.{index}")


def _grow_one(X: np.ndarray, y: np.ndarray, hp: ForestConfig, index: int) -> tuple[Tree, np.ndarray]:
    rng = SplitMix64(tree_seed(hp.seed, index))
    n, d = X.shape
    if hp.bootstrap:
        rows = rng.below_block(n, n)
        Xb, yb = X[rows], y[rows]
    else:
        Xb, yb = X, y
    sampler = make_feature_sampler(rng, hp.resolved_m_try(d))
    return grow_tree(Xb, yb, hp.max_depth, hp.min_samples_leaf, positive_fraction(yb), sampler, 2.0)


def _grow_chunk(args) -> list[tuple[Tree, np.ndarray]]:
    X, y, hp, indices = args
    return [_grow_one(X, y, hp, i) for i in indices]


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[Tree, ...]
    seeds: tuple[int, ...]
    m_try: int
    importances: np.ndarray
    hp: ForestConfig
    kind = "rf"
    score_semantics = "probability"

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def scores(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def params(self) -> dict:
        return {
            "trees": [t.to_dict() for t in self.trees],
            "seeds": list(self.seeds),
            "m_try": self.m_try,
            "importances": self.importances.tolist(),
        }

    @classmethod
    def from_params(cls, hp: ForestConfig, p: dict) -> ForestModel:
        return cls(
            tuple(Tree.from_dict(t) for t in p["trees"]),
            tuple(int(s) for s in p["seeds"]),
            int(p["m_try"]),
            np.asarray(p["importances"], dtype=np.float64),
            hp,
        )


def train_forest(train: LabeledMatrix, hp: ForestConfig = ForestConfig(), workers: int = 1) -> ForestModel:
    """Bagged CART trees with per-split feature subsampling.

    Tree ``i`` draws its bootstrap rows and split features from its own
    stream seeded by ``derive_seed(seed, "rf.tree.i")``, so the fitted forest
    does not depend on ``workers``.
    """
    if train.n == 0:
        raise ValueError("training set is empty")
    X, y = train.features, train.labels.astype(np.float64)
    indices = list(range(hp.n_trees))
    if workers > 1 and hp.n_trees > 1:
        chunks = [indices[k::workers] for k in range(workers) if indices[k::workers]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_grow_chunk, [(X, y, hp, c) for c in chunks]))
        by_index = {}
        for chunk, grown in zip(chunks, parts):
            by_index.update(zip(chunk, grown))
        results = [by_index[i] for i in indices]
    else:
        results = [_grow_one(X, y, hp, i) for i in indices]

    importance = np.zeros(train.d)
    for _, imp in results:
        importance += imp
    total = importance.sum()
    importance = importance / total if total > 0 else np.full(train.d, 1.0 / train.d)
    return ForestModel(
        tuple(t for t, _ in results),
        tuple(tree_seed(hp.seed, i) for i in indices),
        hp.resolved_m_try(train.d),
        importance,
        hp,
    )
