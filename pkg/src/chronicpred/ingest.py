"""CSV parsing and serialisation against a column schema."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable, Sequence, TextIO

from .errors import ParseError, SchemaError
from .schemas import Disease, builtin_schema
from .table import MISSING, NUMERIC, Cell, ColumnSpec, Table, validate_schema

MISSING_TOKENS = frozenset({"", "?", "na", "null"})


@dataclass(frozen=True)
class CsvOptions:
    delimiter: str = ","
    header: bool = True


def _coerce(token: str, col: ColumnSpec) -> Cell:
    token = token.strip()
    if token.lower() in MISSING_TOKENS:
        return MISSING
    if col.kind == NUMERIC:
        try:
            value = float(token)
        except ValueError:
            return MISSING
        return value if math.isfinite(value) else MISSING
    return token


def parse_csv(
    text: str | TextIO,
    schema: Sequence[ColumnSpec],
    options: CsvOptions = CsvOptions(),
    required: Collection[str] | None = None,
) -> Table:
    """Parse CSV text into a :class:`Table` conforming to ``schema``.

    With a header, columns are matched by name and extra columns are ignored
    with a warning. ``required`` limits which schema columns must be present
    (default: all); absent optional columns are filled with missing cells.
    Without a header, every row must have exactly one cell per schema column.
    """
    schema = tuple(schema)
    validate_schema(schema, require_target=False)
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream, delimiter=options.delimiter)
    required = set(c.name for c in schema) if required is None else set(required)

    if options.header:
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError("empty input: header row expected") from None
        positions = {name: i for i, name in reversed(list(enumerate(header)))}
        for col in schema:
            if col.name not in positions and col.name in required:
                raise SchemaError(f"header is missing column {col.name!r}")
        extra = [h for h in header if h not in {c.name for c in schema}]
        if extra:
            warnings.warn(f"ignoring columns not in schema: {extra}", stacklevel=2)
        take = [positions.get(c.name) for c in schema]
        width = len(header)
    else:
        take = list(range(len(schema)))
        width = len(schema)

    rows = []
    for record in reader:
        if not record:
            continue
        if len(record) != width:
            raise ParseError(f"expected {width} fields, found {len(record)}", line=reader.line_num)
        rows.append(tuple(MISSING if j is None else _coerce(record[j], col) for j, col in zip(take, schema)))
    return Table(schema, tuple(rows))


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    if value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def to_csv(table: Table, options: CsvOptions = CsvOptions()) -> str:
    """Serialise ``table``; missing cells become empty fields."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=options.delimiter, lineterminator="\n")
    if options.header:
        writer.writerow(table.names)
    for row in table.rows:
        writer.writerow(
            "" if c is MISSING else format_number(c) if isinstance(c, float) else c for c in row
        )
    return out.getvalue()


def read_csv_file(path: str | Path, schema: Iterable[ColumnSpec], options: CsvOptions = CsvOptions(),
                  required: Collection[str] | None = None) -> Table:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        return parse_csv(fh, tuple(schema), options, required)


def load_disease(disease: str | Disease, path: str | Path, options: CsvOptions = CsvOptions()) -> Table:
    return read_csv_file(path, builtin_schema(disease), options)
