"""Confusion counts, threshold metrics, ROC curves and threshold selection.

A row is predicted positive when its score is >= the threshold. Metrics with a
zero denominator are ``None`` rather than 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
import numpy as np

from .errors import DegenerateLabelsError, EvaluationError
from .table import LabeledMatrix


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    def swapped(self) -> ConfusionCounts:
        """Counts with the roles of the two classes exchanged."""
        return ConfusionCounts(self.tn, self.fn, self.fp, self.tp)

    def scaled(self, k: int) -> ConfusionCounts:
        return ConfusionCounts(k * self.tp, k * self.fp, k * self.fn, k * self.tn)


@dataclass(frozen=True)
class MetricBundle:
    precision: float | None
    recall: float | None
    accuracy: float
    f1: float | None
    auc: float | None = None


@dataclass(frozen=True)
class RocCurve:
    thresholds: tuple[float, ...]  # +inf first, then distinct scores descending
    fpr: tuple[float, ...]
    tpr: tuple[float, ...]

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))


@dataclass(frozen=True)
class ThresholdChoice:
    threshold: float
    criterion: str  # max_f1 | max_youden | fixed
    value: float | None  # criterion value achieved (None for fixed)


CRITERIA = ("max_f1", "max_youden", "fixed")


def _check(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.size != y.size:
        raise EvaluationError(f"scores and labels differ in length ({s.size} vs {y.size})")
    if s.size == 0:
        raise EvaluationError("cannot evaluate an empty score vector")
    if np.isnan(s).any():
        raise EvaluationError("scores contain NaN")
    if not np.isin(y, (0, 1)).all():
        raise EvaluationError("labels must be 0/1")
    return s, y.astype(np.int64)


def confusion_at(scores, labels, threshold: float) -> ConfusionCounts:
    s, y = _check(scores, labels)
    pred = s >= threshold
    tp = int(np.count_nonzero(pred & (y == 1)))
    fp = int(np.count_nonzero(pred & (y == 0)))
    pos = int(np.count_nonzero(y == 1))
    return ConfusionCounts(tp, fp, pos - tp, (y.size - pos) - fp)


def metrics_from_counts(c: ConfusionCounts) -> MetricBundle:
    if c.total == 0:
        raise EvaluationError("empty evaluation: all confusion counts are zero")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else None
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else None
    f1 = None
    if precision is not None and recall is not None and (precision or recall):
        f1 = 2 * c.tp / (2 * c.tp + c.fp + c.fn)
    return MetricBundle(precision, recall, (c.tp + c.tn) / c.total, f1)


def averaged_metrics(c: ConfusionCounts, average: str) -> MetricBundle:
    """Macro or support-weighted average of both classes' precision, recall and F1.

    Only for reconciling tables that appear to report averaged figures; the
    binary positive-class metrics are the default everywhere else.
    """
    if average not in ("macro", "weighted"):
        raise ValueError("average must be 'macro' or 'weighted'")
    per_class = [metrics_from_counts(c), metrics_from_counts(c.swapped())]
    weights = [c.positives, c.negatives] if average == "weighted" else [1, 1]

    def combine(name: str) -> float | None:
        values = [getattr(m, name) for m in per_class]
        if any(v is None for v in values):
            return None
        return math.fsum(w * v for w, v in zip(weights, values)) / sum(weights)

    return MetricBundle(combine("precision"), combine("recall"), per_class[0].accuracy, combine("f1"))


def _sweep(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    """Thresholds (+inf, then distinct scores descending) with cumulative tp/fp counts."""
    s, y = _check(scores, labels)
    pos = int(y.sum())
    neg = y.size - pos
    if pos == 0 or neg == 0:
        raise DegenerateLabelsError("ROC analysis needs both classes in the labels")
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    last_of_group = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tps = np.cumsum(y_sorted)[last_of_group]
    fps = (last_of_group + 1) - tps
    thresholds = np.r_[np.inf, s_sorted[last_of_group]]
    return thresholds, np.r_[0, tps], np.r_[0, fps], pos, neg


def roc_points(scores, labels) -> RocCurve:
    thresholds, tps, fps, pos, neg = _sweep(scores, labels)
    return RocCurve(tuple(thresholds.tolist()), tuple((fps / neg).tolist()), tuple((tps / pos).tolist()))


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the ROC point list."""
    fpr = np.asarray(curve.fpr)
    tpr = np.asarray(curve.tpr)
    area = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1])) / 2.0)
    return min(max(area, 0.0), 1.0)


def mann_whitney_auc(scores, labels) -> float:
    """Pair-counting AUC: (ordered pairs + half the tied pairs) / (P * N)."""
    s, y = _check(scores, labels)
    pos, neg = s[y == 1], s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise DegenerateLabelsError("AUC needs both classes in the labels")
    greater = sum(int(np.count_nonzero(p > neg)) for p in pos)
    ties = sum(int(np.count_nonzero(p == neg)) for p in pos)
    return (greater + 0.5 * ties) / (pos.size * neg.size)


def parse_criterion(text: str) -> tuple[str, float | None]:
    """``max_f1``, ``max_youden``, ``fixed(0.5)`` or ``fixed:0.5``."""
    text = text.strip()
    if text in ("max_f1", "max_youden"):
        return text, None
    for prefix, suffix in (("fixed(", ")"), ("fixed:", "")):
        if text.startswith(prefix) and text.endswith(suffix):
            raw = text[len(prefix): len(text) - len(suffix)]
            try:
                return "fixed", float(raw)
            except ValueError:
                break
    raise ValueError(f"unknown threshold criterion {text!r}; use max_f1, max_youden or fixed(<value>)")


def optimal_threshold(scores, labels, criterion: str = "max_f1", fixed: float | None = None) -> ThresholdChoice:
    """Best threshold among the ROC candidates; ties go to the smallest threshold."""
    if criterion == "fixed":
        if fixed is None:
            raise ValueError("fixed criterion needs a threshold value")
        return ThresholdChoice(float(fixed), "fixed", None)
    if criterion not in CRITERIA:
        raise ValueError(f"unknown threshold criterion {criterion!r}")
    thresholds, tps, fps, pos, neg = _sweep(scores, labels)
    best_i, best = -1, None
    # exact rational comparison so equal criterion values tie cleanly
    for i in range(thresholds.size - 1, -1, -1):
        tp, fp = int(tps[i]), int(fps[i])
        if criterion == "max_f1":
            if tp == 0:
                continue
            value = Fraction(2 * tp, 2 * tp + fp + (pos - tp))
        else:
            value = Fraction(tp * neg - fp * pos, pos * neg)
        if best is None or value > best:
            best_i, best = i, value
    return ThresholdChoice(float(thresholds[best_i]), criterion, float(best))


@dataclass(frozen=True)
class Evaluation:
    scores: np.ndarray
    counts: ConfusionCounts
    metrics: MetricBundle
    roc: RocCurve
    choice: ThresholdChoice


def evaluate_scores(scores, labels, criterion: str = "max_f1", fixed: float | None = None) -> Evaluation:
    s, y = _check(scores, labels)
    choice = optimal_threshold(s, y, criterion, fixed)
    counts = confusion_at(s, y, choice.threshold)
    curve = roc_points(s, y)
    metrics = replace(metrics_from_counts(counts), auc=auc(curve))
    return Evaluation(s, counts, metrics, curve, choice)


def evaluate(model, test: LabeledMatrix, criterion: str = "max_f1", fixed: float | None = None) -> Evaluation:
    """Score ``test``, pick the threshold on it, and compute every metric.

    Margin-scored models are mapped through the sigmoid first, so thresholds
    always live on the probability scale.
    """
    from .models import predict_scores, sigmoid

    scores = predict_scores(model, test)
    if getattr(model, "score_semantics", "probability") == "margin":
        scores = sigmoid(scores)
    return evaluate_scores(scores, test.labels, criterion, fixed)


def roc_csv(curve: RocCurve) -> str:
    lines = ["threshold,fpr,tpr"]
    lines += [f"{t!r},{f!r},{p!r}" for t, f, p in zip(curve.thresholds, curve.fpr, curve.tpr)]
    return "\n".join(lines) + "\n"

