"""Synthetic datasets shaped like the four disease tables.

Continuous columns are truncated normals on ``[lo, hi]`` whose location is
solved so that the truncated mean hits the target mean; ``std`` defaults to
``(hi - lo) / 6`` when the source statistics do not state one. Sampling uses
the inverse CDF on SplitMix64 uniforms, which draws from exactly the
distribution that resampling-until-in-range would produce.

Class signal: for label y in {0, 1} the location of every continuous feature
is moved by ``(2y - 1) * signal_strength * std``, so each class sits one
``signal_strength * std`` away from the base location; discrete features have
their log-probabilities tilted by ``(y - 1/2) * signal_strength * DISCRETE_TILT
* z_k`` with ``z_k`` the category's rank rescaled to [-1, 1]. With
``signal_strength = 0`` features are independent of the label.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.stats import truncnorm

from .rng import SplitMix64, derive_seed
from .schemas import Disease, builtin_schema
from .table import FEATURE, IDENTIFIER, MISSING, NUMERIC, TARGET, Table

DISCRETE_TILT = 1.0


@dataclass(frozen=True)
class Continuous:
    mean: float
    lo: float
    hi: float
    std: float | None = None
    decimals: int | None = None

    @property
    def sigma(self) -> float:
        return self.std if self.std is not None else (self.hi - self.lo) / 6.0


@dataclass(frozen=True)
class Discrete:
    values: tuple
    weights: tuple[float, ...]


Profile = Union[Continuous, Discrete]


@dataclass(frozen=True)
class SynthSpec:
    n_rows: int
    seed: int = 0
    signal_strength: float = 1.0
    positive_rate: float | None = None
    missing_rate: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.n_rows, int) or self.n_rows <= 0:
            raise ValueError(f"n_rows must be a positive integer, got {self.n_rows!r}")
        if not 0.0 <= self.signal_strength <= 1.0:
            raise ValueError(f"signal_strength must be in [0, 1], got {self.signal_strength}")
        if self.positive_rate is not None and not 0.0 < self.positive_rate < 1.0:
            raise ValueError(f"positive_rate must be in (0, 1), got {self.positive_rate}")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ValueError(f"missing_rate must be in [0, 1), got {self.missing_rate}")


def _flag(p_true: float) -> Discrete:
    return Discrete(("f", "t"), (1.0 - p_true, p_true))


def _binary(p_one: float) -> Discrete:
    return Discrete((0.0, 1.0), (1.0 - p_one, p_one))


_HEART: dict[str, Profile] = {
    "age": Continuous(52.20, 20, 80, decimals=0),
    "sex": _binary(0.68),
    "cp": Discrete((0.0, 1.0, 2.0, 3.0), (0.47, 0.17, 0.28, 0.08)),
    "trestbps": Continuous(140.26, 94, 200, decimals=0),
    "chol": Continuous(274.15, 0, 602, decimals=0),
    "fbs": _binary(0.15),
    "restecg": Discrete((0.0, 1.0, 2.0), (0.48, 0.50, 0.02)),
    "thalach": Continuous(147.62, 71, 202, decimals=0),
    "exang": _binary(0.34),
    "oldpeak": Continuous(1.07, 0.0, 6.2, decimals=1),
    "slope": Discrete((0.0, 1.0, 2.0), (0.07, 0.46, 0.47)),
    "ca": Discrete((0.0, 1.0, 2.0, 3.0, 4.0), (0.56, 0.22, 0.13, 0.07, 0.02)),
    "thal": Discrete(("0", "1", "2", "3"), (0.01, 0.06, 0.53, 0.40)),
}

# Recorded age range includes an entry of 65,526 years; synthesis uses a
# clinical range instead of reproducing the anomaly.
_THYROID: dict[str, Profile] = {
    "age": Continuous(52.0, 1, 97, std=19.0, decimals=0),
    "sex": Discrete(("F", "M"), (0.67, 0.33)),
    "on_thyroxine": _flag(0.13),
    "on_antithyroid_meds": _flag(0.01),
    "sick": _flag(0.04),
    "pregnant": _flag(0.015),
    "thyroid_surgery": _flag(0.015),
    "I131_treatment": _flag(0.02),
    "query_hypothyroid": _flag(0.06),
    "query_hyperthyroid": _flag(0.06),
    "lithium": _flag(0.01),
    "goitre": _flag(0.01),
    "tumor": _flag(0.03),
    "hypopituitary": _flag(0.001),
    "psych": _flag(0.05),
    "TSH_measured": _flag(0.91),
    "TSH": Continuous(5.21, 0.005, 530.0, decimals=3),
    "T3_measured": _flag(0.72),
    "T3": Continuous(1.97, 0.05, 18.0, decimals=2),
    "TT4_measured": _flag(0.95),
    "TT4": Continuous(108.7, 2.0, 600.0, decimals=1),
    "T4U_measured": _flag(0.91),
    "T4U": Continuous(0.98, 0.17, 2.33, decimals=2),
    "FTI_measured": _flag(0.91),
    "FTI": Continuous(113.64, 1.4, 881.0, decimals=1),
    "TBG_measured": _flag(0.04),
    "TBG": Continuous(29.87, 0.1, 200.0, decimals=1),
    "referral_source": Discrete(("other", "SVI", "SVHC", "STMW", "SVHD"), (0.58, 0.25, 0.10, 0.05, 0.02)),
}

_DIABETES: dict[str, Profile] = {
    "age": Continuous(41.9, 1, 80, decimals=0),
    "gender": Discrete(("Female", "Male", "Other"), (0.585, 0.414, 0.001)),
    "glucose_level": Continuous(138.06, 80, 300, decimals=0),
    "hypertension": _binary(0.075),
    "heart_disease": _binary(0.04),
    "bmi": Continuous(27.32, 10.01, 95.69, decimals=2),
    "smoking_history": Discrete(
        ("No Info", "never", "former", "current", "not current", "ever"),
        (0.358, 0.351, 0.093, 0.093, 0.064, 0.041),
    ),
}

_CKD: dict[str, Profile] = {
    "age": Continuous(54.4, 20, 90, decimals=0),
    "sex": Discrete(("Female", "Male"), (0.5, 0.5)),
    "ethnicity": Discrete(("Caucasian", "African American", "Asian", "Other"), (0.6, 0.2, 0.1, 0.1)),
    "socioeconomic_status": Discrete(("Low", "Middle", "High"), (0.3, 0.45, 0.25)),
    "education_level": Discrete(("None", "High School", "Bachelor", "Higher"), (0.1, 0.4, 0.3, 0.2)),
    "bmi": Continuous(27.6, 15, 40, decimals=2),
    "smoking": _binary(0.3),
    "alcohol_consumption": Continuous(9.97, 0, 20, decimals=2),
    "physical_activity": Continuous(5.0, 0, 10, decimals=2),
    "diet_quality": Continuous(5.0, 0, 10, decimals=2),
    "sleep_quality": Continuous(7.0, 4, 10, decimals=2),
    "family_history_kidney_disease": _binary(0.14),
    "family_history_hypertension": _binary(0.3),
    "family_history_diabetes": _binary(0.25),
    "systolic_bp": Continuous(134.0, 90, 180, decimals=0),
    "diastolic_bp": Continuous(89.0, 60, 120, decimals=0),
    "fasting_blood_sugar": Continuous(134.0, 70, 200, decimals=1),
    "hba1c": Continuous(6.98, 4, 10, decimals=2),
    "serum_creatinine": Continuous(2.7, 0.5, 5, decimals=2),
    "gfr": Continuous(68.0, 15, 120, decimals=1),
    "protein_in_urine": Continuous(2.5, 0, 5, decimals=2),
    "serum_sodium": Continuous(140.0, 135, 145, decimals=1),
    "serum_potassium": Continuous(4.5, 3.5, 5.5, decimals=2),
    "cholesterol_total": Continuous(225.0, 150, 300, decimals=1),
    "ace_inhibitors": _binary(0.2),
    "diuretics": _binary(0.1),
    "statins": _binary(0.3),
    "nsaids_use": Continuous(4.9, 0, 10, decimals=2),
    "antidiabetic_medications": _binary(0.2),
    "edema": _binary(0.1),
    "fatigue_levels": Continuous(5.0, 0, 10, decimals=2),
    "nausea_vomiting": Continuous(3.5, 0, 7, decimals=2),
    "muscle_cramps": Continuous(3.5, 0, 7, decimals=2),
    "itching": Continuous(5.0, 0, 10, decimals=2),
    "quality_of_life_score": Continuous(50.0, 0, 100, decimals=2),
    "heavy_metals_exposure": _binary(0.05),
    "chemical_exposure": _binary(0.1),
    "water_quality": _binary(0.2),
    "medical_checkups_frequency": Continuous(2.0, 0, 4, decimals=2),
    "medication_adherence": Continuous(5.0, 0, 10, decimals=2),
    "health_literacy": Continuous(5.0, 0, 10, decimals=2),
    "recommended_followup": Discrete(("routine", "nephrology", "screening"), (0.5, 0.3, 0.2)),
}

PROFILES: dict[Disease, dict[str, Profile]] = {
    Disease.HEART: _HEART,
    Disease.THYROID: _THYROID,
    Disease.DIABETES: _DIABETES,
    Disease.CKD: _CKD,
}

DEFAULT_POSITIVE_RATE = {
    Disease.HEART: 0.5,
    Disease.THYROID: 268 / 2718,
    Disease.DIABETES: 0.085,
    Disease.CKD: 0.42,
}

# Raw thyroid diagnosis codes: A-D hyperthyroid conditions, E-H hypothyroid.
THYROID_POSITIVE_CODES = tuple("ABCDEFGH")
THYROID_NEGATIVE_CODE = "-"

_IDENTIFIER_BASE = {Disease.THYROID: 840801000.0, Disease.CKD: 1.0}


@lru_cache(maxsize=None)
def _solve_location(mean: float, lo: float, hi: float, sigma: float) -> float:
    """Location whose normal truncated to [lo, hi] has the requested mean."""

    def gap(mu: float) -> float:
        return truncnorm.mean((lo - mu) / sigma, (hi - mu) / sigma, loc=mu, scale=sigma) - mean

    return brentq(gap, lo - 40 * sigma, hi + 40 * sigma, xtol=1e-12, rtol=1e-14)


def _continuous(p: Continuous, labels: np.ndarray, signal: float, rng: SplitMix64) -> np.ndarray:
    sigma = p.sigma
    base = _solve_location(p.mean, p.lo, p.hi, sigma)
    loc = base + (2.0 * labels - 1.0) * signal * sigma
    u = rng.random_block(labels.size)
    a = (p.lo - loc) / sigma
    b = (p.hi - loc) / sigma
    x = truncnorm.ppf(u, a, b, loc=loc, scale=sigma)
    if p.decimals is not None:
        x = np.round(x, p.decimals)
    return np.clip(x, p.lo, p.hi)


def _discrete(p: Discrete, labels: np.ndarray, signal: float, rng: SplitMix64) -> list:
    k = len(p.values)
    z = np.linspace(-1.0, 1.0, k) if k > 1 else np.zeros(1)
    logw = np.log(np.asarray(p.weights, dtype=np.float64))
    cdfs = []
    for y in (0, 1):
        w = np.exp(logw + (y - 0.5) * signal * DISCRETE_TILT * z)
        cdfs.append(np.cumsum(w / w.sum()))
    u = rng.random_block(labels.size)
    out = []
    for ui, yi in zip(u, labels):
        idx = int(np.searchsorted(cdfs[int(yi)], ui, side="right"))
        out.append(p.values[min(idx, k - 1)])
    return out


def synthesize(disease: str | Disease, spec: SynthSpec) -> Table:
    """Deterministic synthetic table for ``disease`` (a pure function of its inputs)."""
    disease = Disease.parse(disease)
    schema = builtin_schema(disease)
    profiles = PROFILES[disease]
    rate = spec.positive_rate if spec.positive_rate is not None else DEFAULT_POSITIVE_RATE[disease]
    n = spec.n_rows

    label_rng = SplitMix64(derive_seed(spec.seed, f"synth.{disease.value}.labels"))
    labels = (label_rng.random_block(n) < rate).astype(np.int64)

    columns: list[list] = []
    for col in schema:
        rng = SplitMix64(derive_seed(spec.seed, f"synth.{disease.value}.{col.name}"))
        if col.role == TARGET:
            if col.kind == NUMERIC:
                cells = [float(v) for v in labels]
            else:
                codes = rng.below_block(len(THYROID_POSITIVE_CODES), n)
                cells = [THYROID_POSITIVE_CODES[c] if y else THYROID_NEGATIVE_CODE for c, y in zip(codes, labels)]
        elif col.role == IDENTIFIER:
            start = _IDENTIFIER_BASE.get(disease, 1.0)
            cells = [start + i for i in range(n)]
        else:
            profile = profiles[col.name]
            signal = spec.signal_strength if col.role == FEATURE else 0.0
            if isinstance(profile, Continuous):
                cells = [float(v) for v in _continuous(profile, labels, signal, rng)]
            else:
                cells = _discrete(profile, labels, signal, rng)
            if spec.missing_rate > 0 and col.role == FEATURE:
                holes = rng.random_block(n) < spec.missing_rate
                cells = [MISSING if h else c for c, h in zip(cells, holes)]
        columns.append(cells)

    if disease is Disease.THYROID:
        _blank_unmeasured(schema, columns)

    rows = tuple(zip(*columns)) if columns else ()
    return Table(schema, rows)


def _blank_unmeasured(schema, columns: list[list]) -> None:
    """A lab value is missing whenever its ``*_measured`` flag is 'f'."""
    index = {c.name: j for j, c in enumerate(schema)}
    for name, j in index.items():
        flag = index.get(f"{name}_measured")
        if flag is None:
            continue
        columns[j] = [MISSING if f == "f" else v for v, f in zip(columns[j], columns[flag])]
