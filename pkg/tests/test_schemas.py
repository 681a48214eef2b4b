from __future__ import annotations

import pytest

from chronicpred.errors import SchemaError
from chronicpred.schemas import Disease, builtin_schema, format_schema, parse_schema
from chronicpred.table import CATEGORICAL, EXCLUDED, FEATURE, IDENTIFIER, NUMERIC, TARGET


def test_heart_schema():
    s = builtin_schema("heart")
    assert len(s) == 14
    assert [c.name for c in s if c.role == TARGET] == ["target"]
    kinds = {c.name: c.kind for c in s}
    assert kinds["thal"] == CATEGORICAL
    assert all(k == NUMERIC for n, k in kinds.items() if n != "thal")
    features = [c.name for c in s if c.role == FEATURE]
    assert features == ["age", "sex", "cp", "trestbps", "chol", "thalach", "oldpeak", "slope", "ca", "thal"]


def test_thyroid_schema():
    s = builtin_schema(Disease.THYROID)
    names = [c.name for c in s]
    assert len(s) == 30
    for lab in ("TSH", "T3", "TT4", "T4U", "FTI", "TBG", "referral_source"):
        assert lab in names
    roles = {c.name: c.role for c in s}
    assert roles["patient_id"] == IDENTIFIER
    assert roles["target"] == TARGET
    assert next(c for c in s if c.name == "target").kind == CATEGORICAL


def test_diabetes_and_ckd_schemas():
    d = builtin_schema("diabetes")
    assert [c.name for c in d] == ["age", "gender", "glucose_level", "hypertension", "heart_disease", "bmi",
                                  "smoking_history", "diabetes"]
    assert d[-1].role == TARGET
    ckd = {c.name: c.role for c in builtin_schema("ckd")}
    assert ckd["patient_id"] == IDENTIFIER
    assert ckd["diagnosis"] == TARGET
    assert ckd["recommended_followup"] == EXCLUDED


def test_unknown_disease_lists_valid_ids():
    with pytest.raises(SchemaError) as info:
        builtin_schema("lung")
    assert "heart" in str(info.value) and "ckd" in str(info.value)


@pytest.mark.parametrize("disease", list(Disease))
def test_schema_text_round_trip(disease):
    s = builtin_schema(disease)
    text = format_schema(s)
    assert len(text.splitlines()) == len(s)
    assert parse_schema(text) == s


def test_parse_schema_rejects_bad_lines():
    with pytest.raises(SchemaError):
        parse_schema("a\tnumeric\n")
    with pytest.raises(SchemaError):
        parse_schema("a\tstring\tfeature\nt\tnumeric\ttarget\n")
