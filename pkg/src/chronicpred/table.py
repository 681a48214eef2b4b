"""In-memory tabular data model: schemas, cells, tables and summaries."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, Union

import numpy as np

from .errors import SchemaError, UnknownColumnError

NUMERIC = "numeric"
CATEGORICAL = "categorical"
KINDS = (NUMERIC, CATEGORICAL)

FEATURE = "feature"
TARGET = "target"
IDENTIFIER = "identifier"
EXCLUDED = "excluded"
ROLES = (FEATURE, TARGET, IDENTIFIER, EXCLUDED)


class _Missing:
    """Singleton marker for a missing cell."""

    _instance: _Missing | None = None

    def __new__(cls) -> _Missing:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __reduce__(self):
        return (_Missing, ())

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()

Cell = Union[float, str, _Missing]


def is_missing(cell: Cell) -> bool:
    return cell is MISSING


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    role: str = FEATURE
    description: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemaError("column name must be non-empty")
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")


def validate_schema(schema: Sequence[ColumnSpec], require_target: bool = True) -> None:
    """Check name uniqueness and the single-target rule."""
    seen: set[str] = set()
    for col in schema:
        if col.name in seen:
            raise SchemaError(f"duplicate column name {col.name!r}")
        seen.add(col.name)
    targets = [c.name for c in schema if c.role == TARGET]
    if len(targets) > 1:
        raise SchemaError(f"schema has {len(targets)} target columns: {targets}")
    if require_target and not targets:
        raise SchemaError("schema has no target column")


def _check_cell(cell: Any, col: ColumnSpec, row: int) -> Cell:
    if cell is MISSING:
        return cell
    if col.kind == NUMERIC:
        if isinstance(cell, (bool, str)) or not isinstance(cell, (int, float, np.integer, np.floating)):
            raise SchemaError(f"row {row}, column {col.name!r}: expected number, got {cell!r}")
        value = float(cell)
        if not math.isfinite(value):
            raise SchemaError(f"row {row}, column {col.name!r}: non-finite value {cell!r}")
        return value
    if not isinstance(cell, str) or not cell:
        raise SchemaError(f"row {row}, column {col.name!r}: expected non-empty token, got {cell!r}")
    return cell


@dataclass(frozen=True)
class Table:
    """Rectangular mixed-type table. Rows are tuples of cells in schema order.

    Construction validates and normalises cells (numeric cells become
    ``float``); use :meth:`from_rows` for untrusted input and the bare
    constructor only when rows are already normalised.
    """

    schema: tuple[ColumnSpec, ...]
    rows: tuple[tuple[Cell, ...], ...] = ()
    _index: dict[str, int] = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        schema = tuple(self.schema)
        validate_schema(schema, require_target=False)
        width = len(schema)
        rows = []
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SchemaError(f"row {i} has {len(row)} cells, schema has {width}")
            rows.append(tuple(_check_cell(c, col, i) for c, col in zip(row, schema)))
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "_index", {c.name: i for i, c in enumerate(schema)})

    @classmethod
    def from_rows(cls, schema: Iterable[ColumnSpec], rows: Iterable[Sequence[Cell]]) -> Table:
        return cls(tuple(schema), tuple(tuple(r) for r in rows))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.schema)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownColumnError(name) from None

    def spec(self, name: str) -> ColumnSpec:
        return self.schema[self.index_of(name)]

    @property
    def target(self) -> ColumnSpec | None:
        for col in self.schema:
            if col.role == TARGET:
                return col
        return None

    def column(self, name: str) -> tuple[Cell, ...]:
        j = self.index_of(name)
        return tuple(row[j] for row in self.rows)

    def with_rows(self, rows: Iterable[Sequence[Cell]]) -> Table:
        return Table(self.schema, tuple(tuple(r) for r in rows))

    def select_rows(self, indices: Iterable[int]) -> Table:
        return Table(self.schema, tuple(self.rows[i] for i in indices))

    def missing_count(self, name: str) -> int:
        return sum(1 for c in self.column(name) if c is MISSING)


def column_view(table: Table, name: str) -> tuple[Cell, ...]:
    """Cells of column ``name`` in row order."""
    return table.column(name)


@dataclass(frozen=True)
class NumericSummary:
    count: int
    missing: int
    mean: float | None = None
    std: float | None = None
    min: float | None = None
    max: float | None = None


@dataclass(frozen=True)
class CategoricalSummary:
    count: int
    missing: int
    frequencies: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class SummaryStats:
    columns: dict[str, NumericSummary | CategoricalSummary]

    def __getitem__(self, name: str) -> NumericSummary | CategoricalSummary:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumnError(name) from None


def _numeric_summary(cells: Sequence[Cell]) -> NumericSummary:
    values = [c for c in cells if c is not MISSING]
    missing = len(cells) - len(values)
    if not values:
        return NumericSummary(count=0, missing=missing)
    n = len(values)
    lo, hi = min(values), max(values)
    # fsum is correctly rounded, so the moments do not depend on row order
    mean = min(max(math.fsum(values) / n, lo), hi)
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return NumericSummary(count=n, missing=missing, mean=mean, std=math.sqrt(var), min=lo, max=hi)


def summarize(table: Table) -> SummaryStats:
    """Per-column statistics over non-missing cells (population std)."""
    out: dict[str, NumericSummary | CategoricalSummary] = {}
    for j, col in enumerate(table.schema):
        cells = [row[j] for row in table.rows]
        if col.kind == NUMERIC:
            out[col.name] = _numeric_summary(cells)
        else:
            tokens = [c for c in cells if c is not MISSING]
            freq = Counter(tokens)
            out[col.name] = CategoricalSummary(
                count=len(tokens),
                missing=len(cells) - len(tokens),
                frequencies=dict(sorted(freq.items())),
            )
    return SummaryStats(out)


@dataclass(frozen=True)
class LabeledMatrix:
    """Dense finite feature matrix with 0/1 labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {X.shape}")
        y = np.asarray(self.labels)
        if y.shape != (X.shape[0],):
            raise ValueError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain non-finite entries")
        if y.size and not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        names = tuple(self.feature_names)
        if len(names) != X.shape[1]:
            raise ValueError(f"{len(names)} feature names for {X.shape[1]} columns")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y.astype(np.int64))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def take(self, indices: np.ndarray) -> LabeledMatrix:
        return LabeledMatrix(self.features[indices], self.labels[indices], self.feature_names)
