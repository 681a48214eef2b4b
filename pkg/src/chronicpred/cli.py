"""``chronicpred`` command-line entry point.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 golden failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from collections import Counter
from pathlib import Path
from typing import Sequence

from .config import PipelineConfig, load_config, preset
from .errors import (
    ArtifactError,
    ChronicPredError,
    ConfigError,
    ParseError,
    SchemaError,
)
from .experiment import dump_results, render_all, run_experiment, write_outputs
from .goldens import CASES, format_result, perturbed, run_goldens, summary
from .ingest import read_csv_file, to_csv
from .pipeline import check_input, load_bundle
from .schemas import Disease, builtin_schema, format_schema
from .synth import SynthSpec, synthesize

OUT_ENV = "CHRONICPRED_OUT"
EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_GOLDEN = 0, 1, 2, 3

log = logging.getLogger("chronicpred")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems are validation errors (exit 1)
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chronicpred", description="Chronic-disease classification pipelines.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("schema", help="print a built-in dataset schema")
    s.add_argument("disease")

    s = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    s.add_argument("disease")
    s.add_argument("--n", type=_positive_int, required=True, help="number of rows")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--signal", type=float, default=1.0, help="class separation in [0, 1]")
    s.add_argument("--positive-rate", type=float, default=None)
    s.add_argument("--missing-rate", type=float, default=0.0)
    s.add_argument("--out", type=Path, default=None, help="output CSV (default: stdout)")

    s = sub.add_parser("train", help="preprocess, train, evaluate and write bundles")
    s.add_argument("--config", type=Path, help="experiment config file")
    s.add_argument("--preset", choices=("heart", "thyroid", "diabetes", "ckd"),
                   help="use a built-in preset instead of a config file")
    s.add_argument("--data", help="CSV path or 'synth' (overrides the config)")
    s.add_argument("--seed", type=int, help="master seed (overrides the config)")
    s.add_argument("--out", type=Path, help=f"output directory (overrides the config and ${OUT_ENV})")
    s.add_argument("--workers", type=_positive_int, help="worker processes for forest training")

    s = sub.add_parser("predict", help="score a CSV with a trained bundle")
    s.add_argument("--model", type=Path, required=True, help="bundle written by 'train'")
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--output", type=Path, default=None, help="output CSV (default: stdout)")

    s = sub.add_parser("goldens", help="check metric arithmetic against published confusion matrices")
    s.add_argument("--perturb", action="store_true", help="dev mode: corrupt one fixture to see a failure")

    s = sub.add_parser("report", help="re-render reports from a stored results.json")
    s.add_argument("results", type=Path, help="results.json or the directory holding it")
    s.add_argument("--out", type=Path, default=None, help="output directory (default: alongside results)")
    return p


def default_out(cfg: PipelineConfig) -> Path:
    if cfg.out:
        p = Path(cfg.out)
        return p if p.is_absolute() else Path(cfg.base_dir) / p
    base = os.environ.get(OUT_ENV)
    return Path(base or "chronicpred-out") / cfg.experiment


def _sidecar(out: Path, message: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    with (out / "run.log").open("a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


def cmd_schema(args, stdout) -> int:
    stdout.write(format_schema(builtin_schema(Disease.parse(args.disease))))
    return EXIT_OK


def cmd_synth(args, stdout) -> int:
    try:
        spec = SynthSpec(args.n, args.seed, args.signal, args.positive_rate, args.missing_rate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = to_csv(synthesize(Disease.parse(args.disease), spec))
    if args.out is None:
        stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8", newline="")
    return EXIT_OK


def cmd_train(args, stdout) -> int:
    if args.config is None and args.preset is None:
        raise UsageError("train needs --config or --preset")
    cfg = load_config(args.config) if args.config is not None else preset(args.preset)
    if args.data is not None:
        data = args.data if args.data == "synth" else str(Path(args.data).resolve())
        cfg = cfg.with_overrides(data=data)
    cfg = cfg.with_overrides(seed=args.seed, workers=args.workers)
    out = args.out if args.out is not None else default_out(cfg)
    _sidecar(out, f"train start experiment={cfg.experiment} models={','.join(cfg.models)} workers={cfg.workers}")
    result = run_experiment(cfg)
    write_outputs(result, out)
    _sidecar(out, "train done")
    stdout.write((out / "report.txt").read_text(encoding="utf-8"))
    stdout.write(f"outputs written to {out}\n")
    return EXIT_OK


def cmd_predict(args, stdout) -> int:
    if not args.model.is_file():
        raise FileNotFoundError(f"no such model bundle: {args.model}")
    bundle = load_bundle(args.model.read_bytes())
    schema = bundle.input_schema()
    table = read_csv_file(args.input, schema, required=bundle.required_columns())
    check_input(table.names, bundle)
    unseen: Counter = Counter()
    scores, predicted = bundle.predict(table, unseen)
    if unseen:
        log.warning("unseen categories: %s", dict(sorted(unseen.items())))
        sys.stderr.write(f"unseen categories: {dict(sorted(unseen.items()))}\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "score", "predicted"])
    for i, (s, p) in enumerate(zip(scores.tolist(), predicted.tolist())):
        w.writerow([i, repr(s), p])
    if args.output is None:
        stdout.write(buf.getvalue())
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(buf.getvalue(), encoding="utf-8", newline="")
    return EXIT_OK


def cmd_goldens(args, stdout) -> int:
    cases = perturbed() if args.perturb else CASES
    results = run_goldens(cases)
    for r in results:
        stdout.write(format_result(r) + "\n")
    passed, total = summary(results)
    stdout.write(f"{passed}/{total} gating cases passed\n")
    return EXIT_OK if passed == total else EXIT_GOLDEN


def cmd_report(args, stdout) -> int:
    path = args.results / "results.json" if args.results.is_dir() else args.results
    if not path.is_file():
        raise FileNotFoundError(f"no results file at {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        files = render_all(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"malformed results file: {exc!r}", str(path)) from None
    out = args.out if args.out is not None else path.parent
    for rel, content in sorted(files.items()):
        target = out / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8", newline="")
    if args.out is not None and args.out != path.parent:
        (out / "results.json").write_text(dump_results(data), encoding="utf-8", newline="")
    stdout.write(files["report.txt"])
    return EXIT_OK


COMMANDS = {
    "schema": cmd_schema,
    "synth": cmd_synth,
    "train": cmd_train,
    "predict": cmd_predict,
    "goldens": cmd_goldens,
    "report": cmd_report,
}

VALIDATION_ERRORS = (UsageError, ConfigError, SchemaError, ParseError, ArtifactError, FileNotFoundError)


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, stdout)
    except VALIDATION_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except (ChronicPredError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
