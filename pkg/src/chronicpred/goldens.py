"""Published confusion matrices and the metric rows they must reproduce.

Gating cases decide the exit status of ``chronicpred goldens``. Reconciliation
cases compare averaged (macro or weighted) metrics against rows whose
averaging convention is unknown; they are reported as INFO and never gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .evaluation import ConfusionCounts, MetricBundle, averaged_metrics, metrics_from_counts

METRICS = ("precision", "recall", "f1", "accuracy")


@dataclass(frozen=True)
class GoldenCase:
    name: str
    counts: ConfusionCounts
    expected: dict[str, float]
    tolerance: float
    average: str = "binary"  # binary | macro | weighted
    gating: bool = True
    note: str = ""


def _c(tp: int, fp: int, fn: int, tn: int) -> ConfusionCounts:
    return ConfusionCounts(tp, fp, fn, tn)


def _row(precision: float, recall: float, f1: float, accuracy: float) -> dict[str, float]:
    return {"precision": precision, "recall": recall, "f1": f1, "accuracy": accuracy}


HEART_LR = _c(112, 16, 15, 59)
HEART_FOREST = _c(425, 31, 22, 714)  # random forest and boosted trees share these counts
CKD_NB = _c(6078, 2657, 1111, 6938)
CKD_PERFECT = _c(1418, 0, 0, 1939)

CASES: tuple[GoldenCase, ...] = (
    GoldenCase("thyroid-lr", _c(120, 34, 148, 2416), _row(0.7792, 0.4478, 0.5687, 0.9330), 0.005),
    GoldenCase("thyroid-dt", _c(222, 21, 46, 2429), _row(0.9136, 0.8284, 0.8689, 0.9753), 0.005),
    GoldenCase("thyroid-rf", _c(178, 20, 90, 2430), _row(0.8990, 0.6642, 0.7639, 0.9595), 0.005),
    GoldenCase("thyroid-gbt", _c(231, 23, 37, 2427), _row(0.9094, 0.8619, 0.8851, 0.9779), 0.005),
    GoldenCase("thyroid-nn", _c(90, 18, 178, 2432), {}, 0.0, gating=False,
               note="no published metric row; computed values only"),
    GoldenCase("ckd-nb", CKD_NB, _row(0.70, 0.85, 0.76, 0.78), 0.01, note="whole-percent table row"),
    GoldenCase("ckd-nb-text", CKD_NB, {"precision": 0.6958, "recall": 0.8456, "accuracy": 0.7754}, 0.005),
    GoldenCase("ckd-lr", CKD_PERFECT, _row(1.0, 1.0, 1.0, 1.0), 0.005),
    GoldenCase("ckd-rf", CKD_PERFECT, _row(1.0, 1.0, 1.0, 1.0), 0.005),
    GoldenCase("heart-lr", HEART_LR, {"accuracy": 0.85}, 0.01),
    GoldenCase("heart-rf", HEART_FOREST, {"accuracy": 0.96}, 0.01),
    GoldenCase("heart-gbt", HEART_FOREST, {"accuracy": 0.96}, 0.01),
    GoldenCase("heart-lr-macro", HEART_LR, _row(0.85, 0.83, 0.84, 0.85), 0.01, "macro", False),
    GoldenCase("heart-lr-weighted", HEART_LR, _row(0.85, 0.83, 0.84, 0.85), 0.01, "weighted", False),
    GoldenCase("heart-rf-macro", HEART_FOREST, _row(0.96, 0.95, 0.95, 0.96), 0.01, "macro", False),
    GoldenCase("heart-rf-weighted", HEART_FOREST, _row(0.96, 0.95, 0.95, 0.96), 0.01, "weighted", False),
)


@dataclass(frozen=True)
class GoldenResult:
    case: GoldenCase
    computed: MetricBundle
    diffs: dict[str, float] = field(default_factory=dict)  # metric -> computed - expected, failures only

    @property
    def passed(self) -> bool:
        return not self.diffs

    @property
    def status(self) -> str:
        if not self.case.gating:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


def check_case(case: GoldenCase) -> GoldenResult:
    if case.average == "binary":
        computed = metrics_from_counts(case.counts)
    else:
        computed = averaged_metrics(case.counts, case.average)
    diffs = {}
    for metric, want in case.expected.items():
        got = getattr(computed, metric)
        if got is None or abs(got - want) > case.tolerance + 1e-12:
            diffs[metric] = float("nan") if got is None else got - want
    return GoldenResult(case, computed, diffs)


def perturbed(cases: tuple[GoldenCase, ...] = CASES) -> tuple[GoldenCase, ...]:
    """Dev mode: shift the first case's true positives so it must fail."""
    first = cases[0]
    c = first.counts
    return (replace(first, name=first.name + "-perturbed", counts=_c(c.tp + 25, c.fp, c.fn, c.tn)),) + cases[1:]


def run_goldens(cases: tuple[GoldenCase, ...] = CASES) -> list[GoldenResult]:
    return [check_case(c) for c in cases]


def _fmt(x: float | None) -> str:
    return "undefined" if x is None else f"{x:.4f}"


def format_result(r: GoldenResult) -> str:
    c = r.case.counts
    head = f"{r.status} {r.case.name} (tp={c.tp} fp={c.fp} fn={c.fn} tn={c.tn}"
    head += "" if r.case.average == "binary" else f", {r.case.average} average"
    head += ")"
    parts = []
    for metric in METRICS:
        got = getattr(r.computed, metric)
        if metric in r.case.expected:
            want = r.case.expected[metric]
            mark = " DIFF %+.4f" % r.diffs[metric] if metric in r.diffs else ""
            parts.append(f"{metric} {_fmt(got)} vs {want:.4f}{mark}")
        else:
            parts.append(f"{metric} {_fmt(got)}")
    line = head + ": " + ", ".join(parts)
    return line + (f" [{r.case.note}]" if r.case.note else "")


def summary(results: list[GoldenResult]) -> tuple[int, int]:
    gating = [r for r in results if r.case.gating]
    return sum(r.passed for r in gating), len(gating)


def _pub(precision=None, recall=None, f1=None, accuracy=None, auc=None) -> dict[str, float]:
    row = {"precision": precision, "recall": recall, "f1": f1, "accuracy": accuracy, "auc": auc}
    return {k: v for k, v in row.items() if v is not None}


# Published per-model figures for the real datasets, used only for the
# non-gating side-by-side comparison when a run uses real data.
PUBLISHED: dict[str, dict[str, dict[str, float]]] = {
    "heart": {
        "lr": _pub(0.85, 0.83, 0.84, 0.85, 0.89),
        "rf": _pub(0.96, 0.95, 0.95, 0.96, 0.99),
        "gbt": _pub(0.96, 0.95, 0.95, 0.96, 0.99),
    },
    "thyroid": {
        "lr": _pub(0.7792, 0.4478, 0.5687, 0.9330, 0.7169),
        "dt": _pub(0.9136, 0.8284, 0.8689, 0.9753, 0.9099),
        "rf": _pub(0.8990, 0.6642, 0.7639, 0.9595, 0.8280),
        "gbt": _pub(0.9094, 0.8619, 0.8851, 0.9779, 0.9263),
        "nn": _pub(auc=0.95),
    },
    "diabetes": {
        "lr": _pub(0.9640, 0.9660, 0.9640, 0.9660, 0.9660),
        "rf": _pub(0.9701, 0.9709, 0.9690, 0.9709, 0.9709),
        "gbt": _pub(0.9750, 0.9740, 0.9720, 0.9740, 0.9740),
    },
    "ckd": {
        "lr": _pub(1.0, 1.0, 1.0, 1.0),
        "nb": _pub(0.70, 0.85, 0.76, 0.78),
        "rf": _pub(1.0, 1.0, 1.0, 1.0),
    },
}
