"""Binary CART trees: exact midpoint split search, flat-array storage.

Classification (Gini) and regression (variance) splits share one search:
for 0/1 targets the weighted Gini decrease of a split equals twice the
squared-sum gain ``S_L^2/n_L + S_R^2/n_R - S^2/n``, so both criteria maximise
the same quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..rng import SplitMix64
from ..table import LabeledMatrix

LEAF = -1


@dataclass(frozen=True)
class Tree:
    """Nodes in creation (pre-)order; node 0 is the root.

    ``feature[i] == -1`` marks a leaf. Rows with ``x[feature] <= threshold``
    go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max()) if depths.size else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Tree:
        return cls(
            np.asarray(data["feature"], dtype=np.int64),
            np.asarray(data["threshold"], dtype=np.float64),
            np.asarray(data["left"], dtype=np.int64),
            np.asarray(data["right"], dtype=np.int64),
            np.asarray(data["value"], dtype=np.float64),
            int(data["n_features"]),
        )


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float  # S_L^2/n_L + S_R^2/n_R - S^2/n


def gini(labels: np.ndarray) -> float:
    n = labels.size
    if n == 0:
        return 0.0
    p = float(np.sum(labels)) / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def best_split_on_feature(x: np.ndarray, t: np.ndarray, min_leaf: int) -> tuple[float, float] | None:
    """(gain, threshold) of the best midpoint split of one feature, or None.

    Ties go to the lowest threshold.
    """
    n = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cs = np.cumsum(t[order])
    total = cs[-1]
    left_n = np.arange(1, n)
    ok = xs[1:] > xs[:-1]
    ok &= (left_n >= min_leaf) & (n - left_n >= min_leaf)
    if not ok.any():
        return None
    cand = np.flatnonzero(ok)
    nl = left_n[cand].astype(np.float64)
    sl = cs[cand]
    sr = total - sl
    gain = sl * sl / nl + sr * sr / (n - nl) - total * total / n
    top = gain.max()
    tol = 1e-12 * max(1.0, abs(top), total * total / n)
    k = int(np.flatnonzero(gain >= top - tol)[0])
    pick = cand[k]
    lo, hi = xs[pick], xs[pick + 1]
    mid = 0.5 * (lo + hi)
    if not lo <= mid < hi:
        mid = lo
    return float(gain[k]), float(mid)


def best_split(X: np.ndarray, t: np.ndarray, features: np.ndarray, min_leaf: int) -> Split | None:
    """Best split over ``features`` (ascending); ties to the lowest feature index."""
    best: Split | None = None
    for f in features:
        found = best_split_on_feature(X[:, f], t, min_leaf)
        if found is None:
            continue
        gain, thr = found
        tol = 1e-12 * max(1.0, abs(gain))
        if best is None or gain > best.gain + tol:
            best = Split(int(f), thr, gain)
    return best


LeafValue = Callable[[np.ndarray], float]
FeatureSampler = Callable[[int], np.ndarray]


class _Builder:
    def __init__(self, X, target, max_depth, min_leaf, leaf_value, sampler, importance_scale):
        self.X = X
        self.t = target
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.leaf_value = leaf_value
        self.sampler = sampler
        self.scale = importance_scale
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.importance = np.zeros(X.shape[1], dtype=np.float64)

    def _new(self, idx: np.ndarray) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(self.leaf_value(idx)))
        return len(self.feature) - 1

    def grow(self, idx: np.ndarray, depth: int) -> int:
        node = self._new(idx)
        t = self.t[idx]
        if depth >= self.max_depth or idx.size < 2 * self.min_leaf or np.all(t == t[0]):
            return node
        d = self.X.shape[1]
        features = self.sampler(d) if self.sampler is not None else np.arange(d)
        split = best_split(self.X[idx], t, features, self.min_leaf)
        if split is None:
            return node
        go_left = self.X[idx, split.feature] <= split.threshold
        self.importance[split.feature] += self.scale * max(split.gain, 0.0)
        self.feature[node] = split.feature
        self.threshold[node] = split.threshold
        self.left[node] = self.grow(idx[go_left], depth + 1)
        self.right[node] = self.grow(idx[~go_left], depth + 1)
        return node

    def tree(self) -> Tree:
        return Tree(
            np.asarray(self.feature, dtype=np.int64),
            np.asarray(self.threshold, dtype=np.float64),
            np.asarray(self.left, dtype=np.int64),
            np.asarray(self.right, dtype=np.int64),
            np.asarray(self.value, dtype=np.float64),
            self.X.shape[1],
        )


def grow_tree(
    X: np.ndarray,
    target: np.ndarray,
    max_depth: int,
    min_samples_leaf: int,
    leaf_value: LeafValue,
    sampler: FeatureSampler | None = None,
    importance_scale: float = 1.0,
) -> tuple[Tree, np.ndarray]:
    """Grow one tree; returns it with unnormalised per-feature gain totals."""
    X = np.asarray(X, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    builder = _Builder(X, target, max_depth, min_samples_leaf, leaf_value, sampler, importance_scale)
    if X.shape[0]:
        builder.grow(np.arange(X.shape[0]), 0)
    else:
        builder.value.append(0.0)
        builder.feature.append(LEAF)
        builder.threshold.append(0.0)
        builder.left.append(LEAF)
        builder.right.append(LEAF)
    return builder.tree(), builder.importance


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 8
    min_samples_leaf: int = 5

    def __post_init__(self) -> None:
        if self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError("max_depth and min_samples_leaf must be positive")


@dataclass(frozen=True)
class TreeModel:
    tree: Tree
    hp: TreeConfig
    kind = "dt"
    score_semantics = "probability"

    @property
    def n_features(self) -> int:
        return self.tree.n_features

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict(X)

    def params(self) -> dict:
        return {"tree": self.tree.to_dict()}

    @classmethod
    def from_params(cls, hp: TreeConfig, params: dict) -> TreeModel:
        return cls(Tree.from_dict(params["tree"]), hp)


def positive_fraction(labels: np.ndarray) -> LeafValue:
    labels = np.asarray(labels, dtype=np.float64)
    return lambda idx: float(labels[idx].mean()) if idx.size else 0.0


def train_tree(train: LabeledMatrix, hp: TreeConfig = TreeConfig()) -> TreeModel:
    """Gini CART classifier; leaves hold the positive-class fraction."""
    if train.n == 0:
        raise ValueError("training set is empty")
    y = train.labels.astype(np.float64)
    tree, _ = grow_tree(train.features, y, hp.max_depth, hp.min_samples_leaf, positive_fraction(y))
    return TreeModel(tree, hp)


def make_feature_sampler(rng: SplitMix64, m_try: int) -> FeatureSampler:
    def sample(d: int) -> np.ndarray:
        if m_try >= d:
            return np.arange(d)
        return rng.sample_without_replacement(d, m_try)

    return sample
