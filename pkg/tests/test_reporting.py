from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronicpred.evaluation import ConfusionCounts, MetricBundle, RocCurve, ThresholdChoice, roc_points
from chronicpred.reporting import (
    ComparisonReport,
    ReportRow,
    format_auc,
    format_percent,
    parse_csv_report,
    render_comparison,
    render_confusion,
    render_roc_svg,
)

GBT = MetricBundle(precision=0.9094, recall=0.8619, accuracy=0.9779, f1=0.8851, auc=0.9263)


def test_text_row_format():
    text = render_comparison(ComparisonReport("demo", (ReportRow("GBT", GBT),)))
    assert "Model | AUC | Precision | Recall | F1 | Accuracy" in text
    assert "GBT | 0.9263 | 90.94% | 86.19% | 88.51% | 97.79%" in text


def test_undefined_metrics():
    m = MetricBundle(None, 0.0, 0.7, None, 0.5)
    text = render_comparison(ComparisonReport("demo", (ReportRow("LR", m),)))
    assert "LR | 0.5000 | — | 0.00% | — | 70.00%" in text
    assert format_percent(None) == "—" and format_auc(None) == "—"
    csv_text = render_comparison(ComparisonReport("demo", (ReportRow("LR", m),)), "csv")
    assert csv_text.splitlines()[1].startswith("LR,0.5,,0.0,,0.7")


def test_rounding_is_half_up():
    assert format_percent(0.12345) == "12.35%"
    assert format_auc(0.00005) == "0.0001"


def test_confusion_grid():
    grid = render_confusion(ConfusionCounts(112, 16, 15, 59)).splitlines()
    assert grid[0].split() == ["Predicted", "Positive", "Predicted", "Negative"]
    assert grid[1].split() == ["Actual", "Positive", "112", "15"]
    assert grid[2].split() == ["Actual", "Negative", "16", "59"]


def test_rows_must_share_test_partition():
    a = ReportRow("A", GBT, counts=ConfusionCounts(1, 1, 1, 1))
    b = ReportRow("B", GBT, counts=ConfusionCounts(1, 1, 1, 2))
    with pytest.raises(ValueError):
        ComparisonReport("x", (a, b))


fractions = st.none() | st.floats(0, 1)


@settings(max_examples=100)
@given(st.lists(st.tuples(fractions, fractions, st.floats(0, 1), fractions, fractions), min_size=1, max_size=5),
       st.floats(0, 1))
def test_csv_round_trip(rows, thr):
    report = ComparisonReport("x", tuple(
        ReportRow(f"M{i}", MetricBundle(*r), ThresholdChoice(thr, "max_f1", None), ConfusionCounts(3, 2, 1, 4))
        for i, r in enumerate(rows)))
    back = parse_csv_report(render_comparison(report, "csv"))
    assert [r.metrics for r in back] == [r.metrics for r in report.rows]
    assert [r.counts for r in back] == [r.counts for r in report.rows]
    assert [r.choice.threshold for r in back] == [thr] * len(rows)


def test_svg():
    curves = [("LR", roc_points([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]), 0.75),
              ("R&D", RocCurve((float("inf"), 0.5), (0.0, 1.0), (0.0, 1.0)), 0.5)]
    svg = render_roc_svg(curves)
    assert svg == render_roc_svg(curves)
    assert svg.count('<polyline class="curve"') == 2
    assert svg.count('class="baseline"') == 1 and 'stroke-dasharray="6,4"' in svg
    assert re.findall(r'<text class="legend"[^>]*>([^<]*)</text>', svg) == ["LR (AUC = 0.75)", "R&amp;D (AUC = 0.50)"]
    assert "False Positive Rate" in svg and "True Positive Rate" in svg
    with pytest.raises(ValueError):
        render_roc_svg([])
