"""Training-time preprocessing, the fitted production transform, and bundles."""

from __future__ import annotations

import dataclasses
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .config import FITTED_STEPS, PipelineConfig
from .errors import ConfigError, PreprocessError, SchemaError
from .ingest import read_csv_file
from .models import predict_scores, sigmoid
from .persist import load_payload, model_from_dict, model_to_dict, save_payload
from .preprocess import (
    ENCODED_SUFFIX,
    EncoderMap,
    FittedImputer,
    Rule,
    SplitSpec,
    ValidationReport,
    apply_encoder,
    apply_imputer,
    assemble,
    binarize_target,
    dedupe,
    drop_null_columns,
    drop_unlabeled,
    feature_matrix,
    fit_encoder,
    fit_imputer,
    split_indices,
    validate,
)
from .schemas import builtin_schema, format_schema, parse_schema
from .synth import synthesize
from .table import CATEGORICAL, FEATURE, MISSING, NUMERIC, TARGET, ColumnSpec, LabeledMatrix, Table

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Preprocessor:
    """Everything needed to turn raw rows into the training feature matrix.

    ``fallback`` fills (column mean or mode over the training rows) cover
    cells that no configured step would impute, so production scoring never
    fails on a missing value. It is applied just before encoding, or at the
    end when there is no encode step, and only in :meth:`transform`.
    """

    schema: tuple[ColumnSpec, ...]
    steps: tuple[str, ...]
    imputer: FittedImputer | None
    encoder: EncoderMap | None
    fallback: FittedImputer
    dropped_columns: tuple[str, ...]
    feature_names: tuple[str, ...]

    @property
    def source_columns(self) -> tuple[str, ...]:
        """Raw input columns the feature matrix is built from."""
        encoded = set(self.encoder.mapping) if self.encoder else set()
        out = []
        for name in self.feature_names:
            raw = name[: -len(ENCODED_SUFFIX)] if name.endswith(ENCODED_SUFFIX) else name
            out.append(raw if raw in encoded else name)
        return tuple(out)

    def transform(self, table: Table, unseen: Counter | None = None) -> np.ndarray:
        """Production transform; rows are never dropped or reordered."""
        for step in self.steps:
            if step == "drop_null_columns" and self.dropped_columns:
                keep = [j for j, c in enumerate(table.schema) if c.name not in self.dropped_columns]
                table = Table(tuple(table.schema[j] for j in keep),
                              tuple(tuple(r[j] for j in keep) for r in table.rows))
            elif step == "impute" and self.imputer is not None:
                table = apply_imputer(table, self.imputer)
            elif step == "encode":
                table = apply_imputer(table, _present(self.fallback, table))
                if self.encoder is not None:
                    table = apply_encoder(table, self.encoder, unseen)
        if "encode" not in self.steps:
            table = apply_imputer(table, _present(self.fallback, table))
        return feature_matrix(table, self.feature_names)

    def to_dict(self) -> dict:
        return {
            "schema": format_schema(self.schema),
            "steps": list(self.steps),
            "imputer": self.imputer.to_dict() if self.imputer else None,
            "encoder": self.encoder.to_dict() if self.encoder else None,
            "fallback": self.fallback.to_dict(),
            "dropped_columns": list(self.dropped_columns),
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Preprocessor:
        return cls(
            parse_schema(d["schema"]),
            tuple(d["steps"]),
            FittedImputer.from_dict(d["imputer"]) if d["imputer"] else None,
            EncoderMap.from_dict(d["encoder"]) if d["encoder"] else None,
            FittedImputer.from_dict(d["fallback"]),
            tuple(d["dropped_columns"]),
            tuple(d["feature_names"]),
        )


def _present(imp: FittedImputer, table: Table) -> FittedImputer:
    names = set(table.names)
    kinds = {c.name: c.kind for c in table.schema}
    fills = {}
    for k, v in imp.fills.items():
        if k in names and kinds[k] == (NUMERIC if isinstance(v, float) else CATEGORICAL):
            fills[k] = v
    return FittedImputer({k: imp.policy[k] for k in fills}, fills)


def fit_fallback(table: Table) -> FittedImputer:
    policy = {}
    for col in table.schema:
        if col.role != FEATURE or all(c is MISSING for c in table.column(col.name)):
            continue
        policy[col.name] = Rule.MEAN if col.kind == NUMERIC else Rule.MODE
    return fit_imputer(table, policy)


@dataclass(frozen=True)
class Prepared:
    full: LabeledMatrix
    train: LabeledMatrix
    test: LabeledMatrix
    preprocessor: Preprocessor
    train_rows: np.ndarray
    test_rows: np.ndarray
    validation: ValidationReport | None = None
    events: dict = field(default_factory=dict)


def load_table(cfg: PipelineConfig) -> Table:
    if cfg.data == "synth":
        return synthesize(cfg.disease, cfg.synth_spec())
    return read_csv_file(cfg.data_path, builtin_schema(cfg.disease))


def _positives(table: Table, cfg: PipelineConfig) -> frozenset[str]:
    if cfg.binarize_positive:
        return frozenset(cfg.binarize_positive)
    observed = {c for c in table.column(table.target.name) if c is not MISSING}
    return frozenset(observed - set(cfg.binarize_negative))


def _labels(table: Table) -> np.ndarray:
    target = table.target
    if target is None or target.kind != NUMERIC:
        raise ConfigError("fit_on_train_only needs a binary target before the first impute/encode step; "
                          "move binarize earlier", "steps")
    y = np.asarray(table.column(target.name), dtype=np.float64)
    if not np.isin(y, (0.0, 1.0)).all():
        raise PreprocessError("target is not binary; add a binarize step")
    return y.astype(np.int64)


def prepare(table: Table, cfg: PipelineConfig) -> Prepared:
    """Run the configured steps, assemble, and split.

    By default imputers and encoders are fitted on the whole table before the
    split. With ``fit_on_train_only`` the split is drawn when the first fitted
    step is reached and fitting sees only the training rows.
    """
    spec = SplitSpec(cfg.train_fraction, cfg.stratified, cfg.split_seed())
    original_schema = table.schema
    events: dict = {"rows_loaded": table.n_rows}
    table, unlabeled = drop_unlabeled(table)
    events["rows_unlabeled_dropped"] = unlabeled
    imputer = encoder = fallback = None
    dropped: tuple[str, ...] = ()
    report = None
    split_rows = None
    unseen: Counter = Counter()

    def fit_view(t: Table) -> Table:
        return t if split_rows is None else t.select_rows(split_rows[0].tolist())

    for step in cfg.steps:
        if step in FITTED_STEPS and cfg.fit_on_train_only and split_rows is None:
            split_rows = split_indices(_labels(table), spec)
        if step == "dedupe":
            before = table.n_rows
            table = dedupe(table)
            events["rows_duplicate_dropped"] = before - table.n_rows
        elif step == "drop_null_columns":
            result = drop_null_columns(table)
            table, dropped = result.table, result.dropped_columns
            events["columns_dropped"] = list(dropped)
        elif step == "impute":
            policy = {k: v for k, v in cfg.impute_policy(table.schema).items() if k in table.names}
            imputer = fit_imputer(fit_view(table), policy)
            table = apply_imputer(table, imputer)
        elif step == "encode":
            fallback = fit_fallback(fit_view(table))
            columns = cfg.encode_columns
            if columns is None:
                columns = tuple(c.name for c in table.schema if c.role == FEATURE and c.kind == CATEGORICAL)
            encoder = fit_encoder(fit_view(table), columns)
            table = apply_encoder(table, encoder, unseen)
        elif step == "binarize":
            table = binarize_target(table, _positives(table, cfg))
        elif step == "validate":
            report = validate(table, [r for r in cfg.plausibility if r.column in table.names])
    if fallback is None:
        fallback = fit_fallback(fit_view(table))
    if unseen:
        events["unseen_categories"] = dict(sorted(unseen.items()))

    full = assemble(table, cfg.features)
    if split_rows is None:
        split_rows = split_indices(full.labels, spec)
    train_rows, test_rows = split_rows
    pre = Preprocessor(original_schema, cfg.steps, imputer, encoder, fallback, dropped, full.feature_names)
    return Prepared(full, full.take(train_rows), full.take(test_rows), pre, train_rows, test_rows, report, events)


def model_hyperparams(cfg: PipelineConfig, kind: str, prepared: Prepared):
    hp = cfg.model_config(kind)
    if kind == "nb" and not any(k == "nb" and n == "categorical" for k, n, _ in cfg.hyperparams):
        encoded = tuple(i for i, n in enumerate(prepared.full.feature_names) if n.endswith(ENCODED_SUFFIX))
        hp = dataclasses.replace(hp, categorical=encoded)
    return hp


@dataclass(frozen=True)
class Bundle:
    """A fitted model with its preprocessing and decision threshold."""

    disease: str
    preprocessor: Preprocessor
    model: object
    threshold: float
    criterion: str

    def scores(self, table: Table, unseen: Counter | None = None) -> np.ndarray:
        X = self.preprocessor.transform(table, unseen)
        s = predict_scores(self.model, X)
        return sigmoid(s) if self.model.score_semantics == "margin" else s

    def predict(self, table: Table, unseen: Counter | None = None) -> tuple[np.ndarray, np.ndarray]:
        s = self.scores(table, unseen)
        return s, (s >= self.threshold).astype(np.int64)

    def input_schema(self) -> tuple[ColumnSpec, ...]:
        return self.preprocessor.schema

    def required_columns(self) -> tuple[str, ...]:
        return self.preprocessor.source_columns


def save_bundle(b: Bundle) -> bytes:
    return save_payload("bundle", {
        "disease": b.disease,
        "preprocessor": b.preprocessor.to_dict(),
        "model": model_to_dict(b.model),
        "threshold": b.threshold,
        "criterion": b.criterion,
    })


def load_bundle(data: bytes) -> Bundle:
    from .errors import ArtifactFormatError

    p = load_payload(data, "bundle")
    try:
        pre = Preprocessor.from_dict(p["preprocessor"])
        return Bundle(p["disease"], pre, model_from_dict(p["model"]), float(p["threshold"]), p["criterion"])
    except (KeyError, TypeError, ValueError, SchemaError) as exc:
        raise ArtifactFormatError(f"invalid bundle: {exc!r}") from None


def check_input(table_schema_names: tuple[str, ...], bundle: Bundle) -> None:
    missing = [c for c in bundle.required_columns() if c not in table_schema_names]
    if missing:
        raise SchemaError(f"input is missing feature column(s): {missing}")


def target_name(schema: tuple[ColumnSpec, ...]) -> str | None:
    return next((c.name for c in schema if c.role == TARGET), None)
