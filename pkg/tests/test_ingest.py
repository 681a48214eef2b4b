from __future__ import annotations

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronicpred.errors import ParseError, SchemaError
from chronicpred.ingest import CsvOptions, load_disease, parse_csv, read_csv_file, to_csv
from chronicpred.schemas import builtin_schema
from chronicpred.synth import SynthSpec, synthesize
from chronicpred.table import CATEGORICAL, MISSING, NUMERIC, TARGET, ColumnSpec, Table

SUBSET = (ColumnSpec("age", NUMERIC), ColumnSpec("target", NUMERIC, TARGET))


def test_basic_parse():
    t = parse_csv("age,target\n63,1\n", SUBSET)
    assert t.rows == ((63.0, 1.0),)


@pytest.mark.parametrize("token", ["?", "", "NA", "na", "NULL", "null", "abc", "inf", "nan"])
def test_missing_tokens_and_unparseable(token):
    t = parse_csv(f"age,target\n{token},1\n", SUBSET)
    assert t.rows[0][0] is MISSING


def test_arity_error_reports_line():
    with pytest.raises(ParseError) as info:
        parse_csv("age,target\n63,1\n63\n", SUBSET)
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        parse_csv("age,target\n63\n", SUBSET)
    assert info.value.line == 2


def test_header_missing_column_named():
    with pytest.raises(SchemaError) as info:
        parse_csv("age\n63\n", SUBSET)
    assert "target" in str(info.value)


def test_extra_columns_warn_and_reorder():
    with pytest.warns(UserWarning):
        t = parse_csv("target,junk,age\n1,x,63\n", SUBSET)
    assert t.rows == ((63.0, 1.0),)


def test_headerless_and_delimiter():
    t = parse_csv("63;1\n", SUBSET, CsvOptions(delimiter=";", header=False))
    assert t.rows == ((63.0, 1.0),)


def test_optional_columns_filled_missing():
    t = parse_csv("age\n63\n", SUBSET, required={"age"})
    assert t.rows == ((63.0, MISSING),)


def test_load_disease(tmp_path):
    path = tmp_path / "heart.csv"
    path.write_text(to_csv(synthesize("heart", SynthSpec(20, seed=1))))
    assert len(load_disease("heart", path).schema) == 14
    text = path.read_text().replace("chol", "cholesterol", 1)
    path.write_text(text)
    with pytest.raises(SchemaError) as info:
        load_disease("heart", path)
    assert "chol" in str(info.value)
    with pytest.raises(FileNotFoundError):
        read_csv_file(tmp_path / "nope.csv", SUBSET)


MIXED = (ColumnSpec("x", NUMERIC), ColumnSpec("c", CATEGORICAL), ColumnSpec("y", NUMERIC, TARGET))
num = st.floats(allow_nan=False, allow_infinity=False, width=64)
tok = st.text(alphabet="abcxyz,\"' ", min_size=1, max_size=6).filter(
    lambda s: s.strip() == s and s.strip().lower() not in {"", "?", "na", "null"})


@settings(max_examples=80)
@given(st.lists(st.tuples(st.one_of(num, st.just(MISSING)), st.one_of(tok, st.just(MISSING)),
                          st.one_of(num, st.just(MISSING))), max_size=15))
def test_csv_round_trip(rows):
    t = Table(MIXED, tuple(rows))
    back = parse_csv(io.StringIO(to_csv(t), newline=""), MIXED)
    assert back == t


def test_builtin_synth_round_trip():
    for d in ("heart", "thyroid", "diabetes", "ckd"):
        t = synthesize(d, SynthSpec(30, seed=2, missing_rate=0.1))
        assert parse_csv(to_csv(t), builtin_schema(d)) == t
