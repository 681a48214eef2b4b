"""Run a configured experiment end to end and write its outputs."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from .config import PipelineConfig, format_config
from .evaluation import ConfusionCounts, Evaluation, MetricBundle, RocCurve, ThresholdChoice, evaluate, parse_criterion, roc_csv
from .goldens import PUBLISHED
from .models import DISPLAY_NAMES, train_model
from .pipeline import Bundle, Prepared, load_table, model_hyperparams, prepare, save_bundle
from .reporting import ComparisonReport, ReportRow, render_comparison, render_confusion, render_published_deltas, render_roc_svg

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelOutcome:
    kind: str
    evaluation: Evaluation
    bundle: Bundle
    artifact: bytes


@dataclass(frozen=True)
class ExperimentResult:
    config: PipelineConfig
    prepared: Prepared
    outcomes: tuple[ModelOutcome, ...]
    report: ComparisonReport


def provenance(cfg: PipelineConfig, prepared: Prepared) -> dict[str, str]:
    if cfg.data == "synth":
        s = cfg.synth_spec()
        source = (f"synthetic {cfg.disease.value} n={s.n_rows} seed={s.seed} signal={s.signal_strength!r} "
                  f"missing_rate={s.missing_rate!r}")
    else:
        source = f"file {cfg.data}"
    test = prepared.test
    return {
        "data": source,
        "split": f"train_fraction={cfg.train_fraction!r} stratified={str(cfg.stratified).lower()} "
                 f"seed={cfg.split_seed()}",
        "test rows": f"{test.n} ({int(test.labels.sum())} positive)",
        "threshold": cfg.threshold,
    }


def run_experiment(cfg: PipelineConfig) -> ExperimentResult:
    prepared = prepare(load_table(cfg), cfg)
    criterion, fixed = parse_criterion(cfg.threshold)
    outcomes = []
    for kind in cfg.models:
        hp = model_hyperparams(cfg, kind, prepared)
        log.info("training %s on %d rows", kind, prepared.train.n)
        model = train_model(kind, prepared.train, hp, workers=cfg.workers)
        ev = evaluate(model, prepared.test, criterion, fixed)
        bundle = Bundle(cfg.disease.value, prepared.preprocessor, model, ev.choice.threshold, ev.choice.criterion)
        outcomes.append(ModelOutcome(kind, ev, bundle, save_bundle(bundle)))
    rows = tuple(ReportRow(DISPLAY_NAMES[o.kind], o.evaluation.metrics, o.evaluation.choice, o.evaluation.counts)
                 for o in outcomes)
    report = ComparisonReport(cfg.experiment, rows, provenance(cfg, prepared))
    return ExperimentResult(cfg, prepared, tuple(outcomes), report)


def results_dict(result: ExperimentResult) -> dict:
    rows = []
    for o in result.outcomes:
        ev = o.evaluation
        rows.append({
            "model": DISPLAY_NAMES[o.kind],
            "kind": o.kind,
            "metrics": asdict(ev.metrics),
            "choice": asdict(ev.choice),
            "counts": asdict(ev.counts),
            "roc": {"thresholds": list(ev.roc.thresholds), "fpr": list(ev.roc.fpr), "tpr": list(ev.roc.tpr)},
        })
    val = result.prepared.validation
    return {
        "experiment": result.report.experiment,
        "disease": result.config.disease.value,
        "provenance": result.report.provenance,
        "feature_names": list(result.prepared.full.feature_names),
        "events": result.prepared.events,
        "validation": None if val is None else {
            "null_counts": val.null_counts,
            "non_binary_target": val.non_binary_target,
            "flags": [{"column": f.column, "row": f.row, "value": f.value} for f in val.flags],
        },
        "compare_published": result.config.compare_published and result.config.data != "synth",
        "rows": rows,
    }


@dataclass(frozen=True)
class StoredRow:
    kind: str
    row: ReportRow
    roc: RocCurve


def rows_from_results(data: dict) -> tuple[str, dict, list[StoredRow]]:
    out = []
    for r in data["rows"]:
        m = MetricBundle(**r["metrics"])
        choice = ThresholdChoice(**r["choice"])
        counts = ConfusionCounts(**r["counts"])
        roc = RocCurve(tuple(r["roc"]["thresholds"]), tuple(r["roc"]["fpr"]), tuple(r["roc"]["tpr"]))
        out.append(StoredRow(r["kind"], ReportRow(r["model"], m, choice, counts), roc))
    return data["experiment"], data["provenance"], out


def render_all(data: dict) -> dict[str, str]:
    """Report files derived from a results dictionary (also used by ``report``)."""
    experiment, prov, stored = rows_from_results(data)
    report = ComparisonReport(experiment, tuple(s.row for s in stored), prov)
    text = render_comparison(report, "text")
    if data.get("compare_published"):
        published = PUBLISHED.get(data["disease"], {})
        text += "\nPublished comparison (ours / published (delta)):\n"
        text += render_published_deltas([(s.kind, s.row.metrics) for s in stored], published)
    files = {
        "report.txt": text,
        "report.csv": render_comparison(report, "csv"),
        "roc.svg": render_roc_svg([(s.row.model, s.roc, s.row.metrics.auc) for s in stored]),
    }
    for s in stored:
        files[f"{s.kind}/roc.csv"] = roc_csv(s.roc)
        files[f"{s.kind}/confusion.txt"] = render_confusion(s.row.counts)
    return files


def dump_results(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_outputs(result: ExperimentResult, out: Path) -> list[Path]:
    data = results_dict(result)
    files: dict[str, str | bytes] = dict(render_all(data))
    files["results.json"] = dump_results(data)
    files["config.resolved"] = format_config(result.config)
    for o in result.outcomes:
        files[f"{o.kind}/model.ckpt"] = o.artifact
    written = []
    for rel, content in sorted(files.items()):
        path = out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content, encoding="utf-8", newline="")
        written.append(path)
    return written
