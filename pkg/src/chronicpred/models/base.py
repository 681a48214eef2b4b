"""Numerical helpers shared by the model families."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from ..table import LabeledMatrix


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Logistic function without overflow for large |z|."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def mean_log_loss(y: np.ndarray, z: np.ndarray) -> float:
    """Mean binary cross-entropy of labels ``y`` given margins ``z``."""
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def as_features(m: LabeledMatrix | np.ndarray, d: int) -> np.ndarray:
    X = m.features if isinstance(m, LabeledMatrix) else np.asarray(m, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == d else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != d:
        got = X.shape[1] if X.ndim == 2 else X.shape
        raise DimensionError(f"model expects {d} features, got {got}")
    return X


def standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and standard deviations (1 where a column is constant)."""
    shift = X.mean(axis=0) if X.shape[0] else np.zeros(X.shape[1])
    scale = X.std(axis=0) if X.shape[0] else np.ones(X.shape[1])
    scale = np.where(scale > 0, scale, 1.0)
    return shift, scale


def require_both_classes(y: np.ndarray, what: str) -> None:
    from ..errors import TrainingError

    if y.size == 0:
        raise TrainingError(f"{what}: training set is empty")
    if np.all(y == y[0]):
        raise TrainingError(f"{what}: training labels contain a single class")
