"""Imputation, cleaning, encoding, validation, assembly and splitting."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    AssemblyError,
    EncodeBeforeImputeError,
    PreprocessError,
    SchemaError,
    SplitError,
    UnfittableColumnError,
)
from .rng import SplitMix64
from .table import (
    CATEGORICAL,
    FEATURE,
    MISSING,
    NUMERIC,
    TARGET,
    ColumnSpec,
    LabeledMatrix,
    Table,
)

log = logging.getLogger(__name__)

ENCODED_SUFFIX = "_index"


class Rule(str, Enum):
    ZERO = "zero"
    MEAN = "mean"
    MODE = "mode"
    NONE = "none"


ImputePolicy = Mapping[str, Rule]


def check_policy(table_or_schema: Table | Sequence[ColumnSpec], policy: ImputePolicy) -> None:
    schema = table_or_schema.schema if isinstance(table_or_schema, Table) else tuple(table_or_schema)
    kinds = {c.name: c.kind for c in schema}
    for name, rule in policy.items():
        rule = Rule(rule)
        if name not in kinds:
            raise SchemaError(f"imputation rule for unknown column {name!r}")
        if rule in (Rule.ZERO, Rule.MEAN) and kinds[name] != NUMERIC:
            raise SchemaError(f"column {name!r}: {rule.value} imputation requires a numeric column")
        if rule is Rule.MODE and kinds[name] != CATEGORICAL:
            raise SchemaError(f"column {name!r}: mode imputation requires a categorical column")


def default_policy(schema: Sequence[ColumnSpec], numeric: Rule, categorical: Rule,
                   overrides: Mapping[str, Rule] | None = None) -> dict[str, Rule]:
    """Per-kind rules for every feature column, then explicit overrides."""
    policy = {}
    for col in schema:
        if col.role != FEATURE:
            continue
        policy[col.name] = Rule(numeric) if col.kind == NUMERIC else Rule(categorical)
    for name, rule in (overrides or {}).items():
        policy[name] = Rule(rule)
    return policy


@dataclass(frozen=True)
class FittedImputer:
    policy: dict[str, Rule]
    fills: dict[str, float | str]

    def to_dict(self) -> dict:
        return {"policy": {k: v.value for k, v in self.policy.items()}, "fills": dict(self.fills)}

    @classmethod
    def from_dict(cls, data: dict) -> FittedImputer:
        return cls({k: Rule(v) for k, v in data["policy"].items()}, dict(data["fills"]))


def _mode(tokens: Iterable[str]) -> str:
    counts = Counter(tokens)
    # highest count, ties to the lexicographically smallest token
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def fit_imputer(table: Table, policy: ImputePolicy) -> FittedImputer:
    check_policy(table, policy)
    fills: dict[str, float | str] = {}
    clean = {name: Rule(rule) for name, rule in policy.items()}
    for name, rule in clean.items():
        if rule is Rule.NONE:
            continue
        if rule is Rule.ZERO:
            fills[name] = 0.0
            continue
        present = [c for c in table.column(name) if c is not MISSING]
        if not present:
            raise UnfittableColumnError(f"column {name!r}: cannot fit {rule.value} imputation, every cell is missing")
        fills[name] = math.fsum(present) / len(present) if rule is Rule.MEAN else _mode(present)
    return FittedImputer(clean, fills)


def apply_imputer(table: Table, imp: FittedImputer) -> Table:
    positions = []
    for name, fill in imp.fills.items():
        try:
            j = table.index_of(name)
        except KeyError:
            raise SchemaError(f"imputer column {name!r} not in table") from None
        expected = NUMERIC if isinstance(fill, float) else CATEGORICAL
        if table.schema[j].kind != expected:
            raise SchemaError(f"imputer column {name!r} is {table.schema[j].kind}, imputer expects {expected}")
        positions.append((j, fill))
    if not positions:
        return table
    rows = []
    for row in table.rows:
        if any(row[j] is MISSING for j, _ in positions):
            row = list(row)
            for j, fill in positions:
                if row[j] is MISSING:
                    row[j] = fill
            row = tuple(row)
        rows.append(row)
    return Table(table.schema, tuple(rows))


def dedupe(table: Table) -> Table:
    """Keep the first occurrence of every fully identical row."""
    seen: set = set()
    kept = []
    for row in table.rows:
        if row not in seen:
            seen.add(row)
            kept.append(row)
    return Table(table.schema, tuple(kept))


class NullDropResult(NamedTuple):
    table: Table
    dropped_columns: tuple[str, ...]
    dropped_rows: int


def drop_null_columns(table: Table) -> NullDropResult:
    """Remove every non-target column holding a missing cell.

    Rows whose target is missing are removed first, so the label column is
    never dropped.
    """
    target = table.target
    rows = table.rows
    dropped_rows = 0
    if target is not None:
        t = table.index_of(target.name)
        rows = tuple(r for r in rows if r[t] is not MISSING)
        dropped_rows = table.n_rows - len(rows)
    keep = [
        j for j, col in enumerate(table.schema)
        if col.role == TARGET or not any(r[j] is MISSING for r in rows)
    ]
    dropped = tuple(c.name for j, c in enumerate(table.schema) if j not in set(keep))
    schema = tuple(table.schema[j] for j in keep)
    return NullDropResult(Table(schema, tuple(tuple(r[j] for j in keep) for r in rows)), dropped, dropped_rows)


def drop_unlabeled(table: Table) -> tuple[Table, int]:
    target = table.target
    if target is None:
        return table, 0
    t = table.index_of(target.name)
    rows = tuple(r for r in table.rows if r[t] is not MISSING)
    return Table(table.schema, rows), table.n_rows - len(rows)


@dataclass(frozen=True)
class EncoderMap:
    """Per column: token -> dense index, most frequent first, ties lexicographic."""

    mapping: dict[str, dict[str, int]]

    def unseen_index(self, column: str) -> int:
        return len(self.mapping[column])

    def inverse(self, column: str) -> dict[int, str]:
        return {i: tok for tok, i in self.mapping[column].items()}

    def to_dict(self) -> dict:
        return {col: list(m) for col, m in self.mapping.items()}

    @classmethod
    def from_dict(cls, data: dict) -> EncoderMap:
        return cls({col: {tok: i for i, tok in enumerate(tokens)} for col, tokens in data.items()})


def fit_encoder(table: Table, columns: Sequence[str]) -> EncoderMap:
    mapping = {}
    for name in columns:
        if table.spec(name).kind != CATEGORICAL:
            raise SchemaError(f"column {name!r} is not categorical")
        cells = table.column(name)
        if any(c is MISSING for c in cells):
            raise EncodeBeforeImputeError(f"column {name!r} has missing cells; impute before encoding")
        counts = Counter(cells)
        order = sorted(counts, key=lambda tok: (-counts[tok], tok))
        mapping[name] = {tok: i for i, tok in enumerate(order)}
    return EncoderMap(mapping)


def encoded_name(column: str) -> str:
    return column + ENCODED_SUFFIX


def apply_encoder(table: Table, enc: EncoderMap, unseen: Counter | None = None) -> Table:
    """Replace each encoded column ``c`` by numeric ``c_index``.

    Tokens not seen at fit time map to one past the largest index; their
    number per column is added to ``unseen`` when given.
    """
    schema = list(table.schema)
    targets = {}
    for name, m in enc.mapping.items():
        j = table.index_of(name)
        col = schema[j]
        schema[j] = ColumnSpec(encoded_name(name), NUMERIC, col.role, col.description)
        targets[j] = (name, m, float(len(m)))
    counts: Counter = Counter()
    rows = []
    for row in table.rows:
        row = list(row)
        for j, (name, m, k) in targets.items():
            cell = row[j]
            if cell is MISSING:
                continue
            idx = m.get(cell)
            if idx is None:
                counts[name] += 1
                row[j] = k
            else:
                row[j] = float(idx)
        rows.append(tuple(row))
    if counts:
        log.warning("unseen categories mapped to reserved index: %s", dict(counts))
        if unseen is not None:
            unseen.update(counts)
    return Table(tuple(schema), tuple(rows))


def binarize_target(table: Table, positive_labels: Iterable[str]) -> Table:
    positives = frozenset(positive_labels)
    if not positives:
        raise PreprocessError("binarize_target needs at least one positive label")
    target = table.target
    if target is None:
        raise SchemaError("table has no target column")
    if target.kind != CATEGORICAL:
        raise SchemaError(f"target {target.name!r} is already numeric")
    t = table.index_of(target.name)
    schema = list(table.schema)
    schema[t] = ColumnSpec(target.name, NUMERIC, TARGET, target.description)
    rows = []
    for row in table.rows:
        cell = row[t]
        if cell is not MISSING:
            row = row[:t] + (1.0 if cell in positives else 0.0,) + row[t + 1:]
        rows.append(row)
    return Table(tuple(schema), tuple(rows))


@dataclass(frozen=True)
class PlausibilityRule:
    column: str
    min: float
    max: float


@dataclass(frozen=True)
class PlausibilityFlag:
    column: str
    row: int
    value: float
    rule: PlausibilityRule


@dataclass(frozen=True)
class ValidationReport:
    null_counts: dict[str, int]
    non_binary_target: int
    flags: tuple[PlausibilityFlag, ...] = ()

    @property
    def total_nulls(self) -> int:
        return sum(self.null_counts.values())

    @property
    def clean(self) -> bool:
        return self.total_nulls == 0 and self.non_binary_target == 0 and not self.flags


def validate(table: Table, rules: Sequence[PlausibilityRule] = ()) -> ValidationReport:
    """Count problems; never modifies or rejects the table."""
    nulls = {c.name: table.missing_count(c.name) for c in table.schema}
    non_binary = 0
    target = table.target
    if target is not None:
        for cell in table.column(target.name):
            if cell is not MISSING and cell not in (0.0, 1.0):
                non_binary += 1
    flags = []
    for rule in rules:
        if table.spec(rule.column).kind != NUMERIC:
            raise SchemaError(f"plausibility rule on non-numeric column {rule.column!r}")
        for i, cell in enumerate(table.column(rule.column)):
            if cell is not MISSING and not rule.min <= cell <= rule.max:
                flags.append(PlausibilityFlag(rule.column, i, cell, rule))
    return ValidationReport(nulls, non_binary, tuple(flags))


def feature_columns(table: Table, subset: Sequence[str] | None = None) -> list[str]:
    names = [c.name for c in table.schema if c.role == FEATURE]
    if subset is None:
        return names
    chosen = []
    for want in subset:
        for name in (want, encoded_name(want)):
            if name in names:
                chosen.append(name)
                break
        else:
            raise SchemaError(f"feature {want!r} not among assembled columns {names}")
    order = {n: i for i, n in enumerate(names)}
    return sorted(chosen, key=order.__getitem__)


def feature_matrix(table: Table, names: Sequence[str]) -> np.ndarray:
    """Dense float matrix of ``names``; raises naming the first bad cell."""
    cols = [table.index_of(n) for n in names]
    for j, name in zip(cols, names):
        if table.schema[j].kind != NUMERIC:
            raise AssemblyError(f"feature column {name!r} is not numeric; encode it first")
    X = np.empty((table.n_rows, len(cols)), dtype=np.float64)
    for i, row in enumerate(table.rows):
        for k, j in enumerate(cols):
            cell = row[j]
            if cell is MISSING:
                raise AssemblyError(f"missing cell in column {names[k]!r} at row {i}")
            X[i, k] = cell
    return X


def assemble(table: Table, features: Sequence[str] | None = None) -> LabeledMatrix:
    """Feature columns in schema order plus the binary target."""
    target = table.target
    if target is None:
        raise AssemblyError("table has no target column")
    names = feature_columns(table, features)
    X = feature_matrix(table, names)
    if target.kind != NUMERIC:
        raise AssemblyError(f"target {target.name!r} is not numeric; binarize it first")
    y = np.empty(table.n_rows, dtype=np.int64)
    for i, cell in enumerate(table.column(target.name)):
        if cell is MISSING:
            raise AssemblyError(f"missing cell in column {target.name!r} at row {i}")
        if cell not in (0.0, 1.0):
            raise AssemblyError(f"non-binary target {cell!r} in column {target.name!r} at row {i}")
        y[i] = int(cell)
    return LabeledMatrix(X, y, tuple(names))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    stratified: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _train_count(n: int, fraction: float) -> int:
    # round half up; clamped so both sides stay non-empty
    return min(max(int(math.floor(n * fraction + 0.5)), 1), n - 1)


def split_indices(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Train and test row indices, each ascending.

    Stratified: each class is shuffled independently (Fisher-Yates on a
    SplitMix64 stream seeded with ``spec.seed``; negatives first, then
    positives) and its first ``round(n_c * train_fraction)`` rows go to train.
    """
    labels = np.asarray(labels)
    n = labels.size
    rng = SplitMix64(spec.seed)
    if spec.stratified:
        train, test = [], []
        for cls in (0, 1):
            members = np.flatnonzero(labels == cls)
            if members.size < 2:
                raise SplitError(f"class {cls} has {members.size} row(s); stratified split needs at least 2")
            perm = members[rng.permutation(members.size)]
            k = _train_count(members.size, spec.train_fraction)
            train.append(perm[:k])
            test.append(perm[k:])
        return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))
    if n < 2:
        raise SplitError(f"cannot split {n} row(s) into non-empty train and test sets")
    perm = rng.permutation(n)
    k = _train_count(n, spec.train_fraction)
    return np.sort(perm[:k]), np.sort(perm[k:])


def split(m: LabeledMatrix, spec: SplitSpec) -> tuple[LabeledMatrix, LabeledMatrix]:
    train, test = split_indices(m.labels, spec)
    return m.take(train), m.take(test)
