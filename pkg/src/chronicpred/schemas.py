"""Built-in column schemas for the four disease datasets.

The heart, thyroid and diabetes schemas follow the headers of the public
files for those datasets. The CKD column names are snake_case identifiers
chosen for this package; a real CKD file must be renamed to match.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable

from .errors import SchemaError
from .table import (
    CATEGORICAL,
    EXCLUDED,
    FEATURE,
    IDENTIFIER,
    KINDS,
    NUMERIC,
    ROLES,
    TARGET,
    ColumnSpec,
    validate_schema,
)


class Disease(str, Enum):
    HEART = "heart"
    THYROID = "thyroid"
    DIABETES = "diabetes"
    CKD = "ckd"

    @classmethod
    def parse(cls, value: str | Disease) -> Disease:
        if isinstance(value, Disease):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            valid = ", ".join(d.value for d in cls)
            raise SchemaError(f"unknown disease {value!r}; valid ids: {valid}") from None


def _num(name: str, description: str = "", role: str = FEATURE) -> ColumnSpec:
    return ColumnSpec(name, NUMERIC, role, description)


def _cat(name: str, description: str = "", role: str = FEATURE) -> ColumnSpec:
    return ColumnSpec(name, CATEGORICAL, role, description)


# fbs, restecg and exang exist in the public file but are not among the
# attributes the methodology describes; they are carried but not assembled.
_HEART = (
    _num("age", "age of the patient, years"),
    _num("sex", "1 = male, 0 = female"),
    _num("cp", "chest pain type"),
    _num("trestbps", "resting blood pressure, mm Hg"),
    _num("chol", "serum cholesterol, mg/dl"),
    _num("fbs", "fasting blood sugar > 120 mg/dl", EXCLUDED),
    _num("restecg", "resting electrocardiographic result", EXCLUDED),
    _num("thalach", "maximum heart rate achieved, bpm"),
    _num("exang", "exercise induced angina", EXCLUDED),
    _num("oldpeak", "ST depression induced by exercise relative to rest"),
    _num("slope", "slope of the peak exercise ST segment"),
    _num("ca", "number of major vessels (0-3) coloured by fluoroscopy"),
    _cat("thal", "thalassemia level (categorical code)"),
    _num("target", "1 = heart disease present, 0 = absent", TARGET),
)

_THYROID_FLAGS = (
    ("on_thyroxine", "on thyroxine treatment"),
    ("on_antithyroid_meds", "on antithyroid medication"),
    ("sick", "patient reports sickness"),
    ("pregnant", "pregnancy"),
    ("thyroid_surgery", "history of thyroid surgery"),
    ("I131_treatment", "undergoing I131 treatment"),
    ("query_hypothyroid", "suspected hypothyroidism"),
    ("query_hyperthyroid", "suspected hyperthyroidism"),
    ("lithium", "on lithium"),
    ("goitre", "goitre present"),
    ("tumor", "tumor present"),
    ("hypopituitary", "hypopituitarism"),
    ("psych", "psychiatric condition"),
)

_THYROID_LABS = (
    ("TSH", "thyroid stimulating hormone level"),
    ("T3", "triiodothyronine level"),
    ("TT4", "total thyroxine level"),
    ("T4U", "thyroxine uptake"),
    ("FTI", "free thyroxine index"),
    ("TBG", "thyroxine-binding globulin level"),
)


def _thyroid() -> tuple[ColumnSpec, ...]:
    cols = [_num("age", "patient age, years"), _cat("sex", "M or F")]
    cols += [_cat(name, desc + " (t/f)") for name, desc in _THYROID_FLAGS]
    for name, desc in _THYROID_LABS:
        cols.append(_cat(f"{name}_measured", f"whether {name} was measured (t/f)"))
        cols.append(_num(name, desc))
    cols.append(_cat("referral_source", "source of the referral"))
    cols.append(_cat("target", "diagnosis code; '-' means no condition", TARGET))
    cols.append(_num("patient_id", "unique patient identifier", IDENTIFIER))
    return tuple(cols)


_DIABETES = (
    _num("age", "patient age, years"),
    _cat("gender", "patient gender"),
    _num("glucose_level", "blood glucose level, mg/dl"),
    _num("hypertension", "1 = hypertension present"),
    _num("heart_disease", "1 = cardiovascular disease present"),
    _num("bmi", "body mass index, kg/m^2"),
    _cat("smoking_history", "smoking history category"),
    _num("diabetes", "1 = diabetic, 0 = not diabetic", TARGET),
)

_CKD = (
    _num("patient_id", "unique patient identifier", IDENTIFIER),
    _num("age", "patient age, years"),
    _cat("sex", "patient sex"),
    _cat("ethnicity", "ethnic group"),
    _cat("socioeconomic_status", "socioeconomic status"),
    _cat("education_level", "educational attainment"),
    _num("bmi", "body mass index, kg/m^2"),
    _num("smoking", "1 = smoker"),
    _num("alcohol_consumption", "alcohol units per week"),
    _num("physical_activity", "hours of activity per week"),
    _num("diet_quality", "diet quality score 0-10"),
    _num("sleep_quality", "sleep quality score 4-10"),
    _num("family_history_kidney_disease", "1 = family history of kidney disease"),
    _num("family_history_hypertension", "1 = family history of hypertension"),
    _num("family_history_diabetes", "1 = family history of diabetes"),
    _num("systolic_bp", "systolic blood pressure, mm Hg"),
    _num("diastolic_bp", "diastolic blood pressure, mm Hg"),
    _num("fasting_blood_sugar", "fasting blood sugar, mg/dl"),
    _num("hba1c", "glycated haemoglobin, %"),
    _num("serum_creatinine", "serum creatinine, mg/dl"),
    _num("gfr", "glomerular filtration rate, ml/min/1.73m^2"),
    _num("protein_in_urine", "urine protein, g/day"),
    _num("serum_sodium", "serum sodium, mEq/L"),
    _num("serum_potassium", "serum potassium, mEq/L"),
    _num("cholesterol_total", "total cholesterol, mg/dl"),
    _num("ace_inhibitors", "1 = on ACE inhibitors"),
    _num("diuretics", "1 = on diuretics"),
    _num("statins", "1 = on statins"),
    _num("nsaids_use", "anti-inflammatory drug use per week"),
    _num("antidiabetic_medications", "1 = on antidiabetic drugs"),
    _num("edema", "1 = edema present"),
    _num("fatigue_levels", "fatigue score 0-10"),
    _num("nausea_vomiting", "episodes per week"),
    _num("muscle_cramps", "episodes per week"),
    _num("itching", "itching score 0-10"),
    _num("quality_of_life_score", "quality of life 0-100"),
    _num("heavy_metals_exposure", "1 = exposed to heavy metals"),
    _num("chemical_exposure", "1 = occupational chemical exposure"),
    _num("water_quality", "1 = poor drinking water access"),
    _num("medical_checkups_frequency", "visits per year"),
    _num("medication_adherence", "adherence score 0-10"),
    _num("health_literacy", "health literacy score 0-10"),
    _num("diagnosis", "1 = chronic kidney disease, 0 = none", TARGET),
    _cat("recommended_followup", "recommended diagnostics and visits", EXCLUDED),
)

_BUILTIN = {
    Disease.HEART: _HEART,
    Disease.THYROID: _thyroid(),
    Disease.DIABETES: _DIABETES,
    Disease.CKD: _CKD,
}

for _schema in _BUILTIN.values():
    validate_schema(_schema)


def builtin_schema(disease: str | Disease) -> tuple[ColumnSpec, ...]:
    return _BUILTIN[Disease.parse(disease)]


def format_schema(schema: Iterable[ColumnSpec]) -> str:
    """One line per column: ``name<TAB>kind<TAB>role<TAB>description``."""
    return "".join(f"{c.name}\t{c.kind}\t{c.role}\t{c.description}\n" for c in schema)


def parse_schema(text: str) -> tuple[ColumnSpec, ...]:
    cols = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise SchemaError(f"schema line {lineno}: expected name, kind, role")
        name, kind, role = (p.strip() for p in parts[:3])
        if kind not in KINDS or role not in ROLES:
            raise SchemaError(f"schema line {lineno}: bad kind/role {kind!r}/{role!r}")
        description = parts[3].strip() if len(parts) > 3 else ""
        cols.append(ColumnSpec(name, kind, role, description))
    schema = tuple(cols)
    validate_schema(schema)
    return schema
