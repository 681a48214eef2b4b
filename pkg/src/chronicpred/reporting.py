"""Comparison tables, confusion grids and ROC plots."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

from .evaluation import ConfusionCounts, MetricBundle, RocCurve, ThresholdChoice

UNDEFINED = "—"
METRIC_COLUMNS = ("auc", "precision", "recall", "f1", "accuracy")
HEADERS = {"auc": "AUC", "precision": "Precision", "recall": "Recall", "f1": "F1", "accuracy": "Accuracy"}


@dataclass(frozen=True)
class ReportRow:
    model: str
    metrics: MetricBundle
    choice: ThresholdChoice | None = None
    counts: ConfusionCounts | None = None


@dataclass(frozen=True)
class ComparisonReport:
    experiment: str
    rows: tuple[ReportRow, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        shapes = {(r.counts.total, r.counts.positives) for r in self.rows if r.counts is not None}
        if len(shapes) > 1:
            raise ValueError(f"report rows come from different test partitions: {sorted(shapes)}")


def round_half_up(x: float, places: int) -> Decimal:
    return Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def format_percent(x: float | None) -> str:
    return UNDEFINED if x is None else f"{round_half_up(x * 100.0, 2)}%"


def format_auc(x: float | None) -> str:
    return UNDEFINED if x is None else str(round_half_up(x, 4))


def _cells(m: MetricBundle) -> list[str]:
    return [format_auc(m.auc)] + [format_percent(getattr(m, k)) for k in METRIC_COLUMNS[1:]]


def render_text(report: ComparisonReport) -> str:
    out = [f"Experiment: {report.experiment}"]
    out += [f"{k}: {v}" for k, v in report.provenance.items()]
    out.append("")
    out.append(" | ".join(["Model"] + [HEADERS[k] for k in METRIC_COLUMNS]))
    out += [" | ".join([r.model] + _cells(r.metrics)) for r in report.rows]
    detailed = [r for r in report.rows if r.choice is not None or r.counts is not None]
    for r in detailed:
        out.append("")
        if r.choice is not None:
            out.append(f"{r.model} threshold: {r.choice.threshold!r} ({r.choice.criterion})")
        if r.counts is not None:
            out.append(render_confusion(r.counts).rstrip("\n"))
    return "\n".join(out) + "\n"


CSV_FIELDS = ["model", *METRIC_COLUMNS, "threshold", "criterion", "tp", "fp", "fn", "tn"]


def render_csv(report: ComparisonReport) -> str:
    """Full-precision values; undefined metrics and absent fields are empty."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_FIELDS)
    for r in report.rows:
        m = r.metrics
        metrics = ["" if getattr(m, k) is None else repr(getattr(m, k)) for k in METRIC_COLUMNS]
        choice = [repr(r.choice.threshold), r.choice.criterion] if r.choice else ["", ""]
        counts = [r.counts.tp, r.counts.fp, r.counts.fn, r.counts.tn] if r.counts else [""] * 4
        writer.writerow([r.model, *metrics, *choice, *counts])
    return buf.getvalue()


def parse_csv_report(text: str) -> list[ReportRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text, newline="")):
        def num(key: str) -> float | None:
            return float(rec[key]) if rec[key] != "" else None

        m = MetricBundle(num("precision"), num("recall"), float(rec["accuracy"]), num("f1"), num("auc"))
        choice = ThresholdChoice(float(rec["threshold"]), rec["criterion"], None) if rec["threshold"] else None
        counts = (ConfusionCounts(*(int(rec[k]) for k in ("tp", "fp", "fn", "tn"))) if rec["tp"] else None)
        rows.append(ReportRow(rec["model"], m, choice, counts))
    return rows


def render_comparison(report: ComparisonReport, fmt: str = "text") -> str:
    if not report.rows:
        raise ValueError("report has no rows")
    if fmt == "text":
        return render_text(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown report format {fmt!r}; use text or csv")


def render_confusion(c: ConfusionCounts) -> str:
    """Rows are actual classes, columns predicted classes, positive first."""
    cells = [["", "Predicted Positive", "Predicted Negative"],
             ["Actual Positive", str(c.tp), str(c.fn)],
             ["Actual Negative", str(c.fp), str(c.tn)]]
    widths = [max(len(row[j]) for row in cells) for j in range(3)]
    return "".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n" for row in cells)


# SVG geometry: unit square mapped to a PLOT x PLOT box at (MARGIN, MARGIN)
PLOT = 400
MARGIN = 50
COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _xy(fpr: float, tpr: float) -> str:
    return f"{MARGIN + fpr * PLOT:.3f},{MARGIN + (1.0 - tpr) * PLOT:.3f}"


def render_roc_svg(curves: Sequence[tuple[str, RocCurve, float]]) -> str:
    if not curves:
        raise ValueError("at least one ROC curve is required")
    size = PLOT + 2 * MARGIN
    lo, hi = MARGIN, MARGIN + PLOT
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 200}" height="{size}" '
        f'viewBox="0 0 {size + 200} {size}">',
        f'<rect x="{lo}" y="{lo}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>',
        f'<line class="baseline" x1="{lo}" y1="{hi}" x2="{hi}" y2="{lo}" stroke="gray" '
        f'stroke-dasharray="6,4"/>',
        f'<text x="{lo + PLOT / 2:.0f}" y="{size - 10}" text-anchor="middle">False Positive Rate</text>',
        f'<text x="15" y="{lo + PLOT / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {lo + PLOT / 2:.0f})">True Positive Rate</text>',
    ]
    for tick in range(0, 11, 2):
        v = tick / 10
        parts.append(f'<text x="{MARGIN + v * PLOT:.0f}" y="{hi + 15}" text-anchor="middle">{v:.1f}</text>')
        parts.append(f'<text x="{lo - 5}" y="{MARGIN + (1 - v) * PLOT + 4:.0f}" text-anchor="end">{v:.1f}</text>')
    for i, (name, curve, area) in enumerate(curves):
        color = COLORS[i % len(COLORS)]
        points = " ".join(_xy(f, t) for f, t in zip(curve.fpr, curve.tpr))
        parts.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="2" points="{points}"/>')
        y = lo + 20 + 20 * i
        parts.append(f'<line x1="{hi + 15}" y1="{y - 4}" x2="{hi + 35}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        label = f"{name} (AUC = {round_half_up(area, 2)})"
        parts.append(f'<text class="legend" x="{hi + 40}" y="{y}">{_escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def plot_roc(curves: Sequence[tuple[str, RocCurve, float]], out: str | Path) -> Path:
    out = Path(out)
    out.write_text(render_roc_svg(curves), encoding="utf-8")
    return out


def render_published_deltas(rows: Sequence[tuple[str, MetricBundle]], published: dict[str, dict[str, float]]) -> str:
    """Side-by-side ``ours / published (delta)`` per metric, for models with a published row."""
    out = [" | ".join(["Model"] + [HEADERS[k] for k in METRIC_COLUMNS])]
    for kind, m in rows:
        ref = published.get(kind)
        if ref is None:
            continue
        cells = [kind.upper()]
        for k in METRIC_COLUMNS:
            ours = getattr(m, k)
            if k not in ref:
                cells.append("n/a")
            elif ours is None:
                cells.append(f"{UNDEFINED} / {ref[k]:.4f}")
            else:
                cells.append(f"{ours:.4f} / {ref[k]:.4f} ({ours - ref[k]:+.4f})")
        out.append(" | ".join(cells))
    return "\n".join(out) + "\n"
