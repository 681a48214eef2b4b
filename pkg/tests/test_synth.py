from __future__ import annotations

import pytest

from chronicpred.ingest import to_csv
from chronicpred.preprocess import SplitSpec, apply_encoder, assemble, fit_encoder, split
from chronicpred.models import predict_scores, train_model
from chronicpred.evaluation import auc, roc_points
from chronicpred.synth import DEFAULT_POSITIVE_RATE, SynthSpec, synthesize
from chronicpred.table import MISSING, summarize


def test_heart_age_matches_published_summary():
    t = synthesize("heart", SynthSpec(10_000, seed=11, signal_strength=0.0))
    age = summarize(t)["age"]
    assert abs(age.mean - 52.20) <= 1.0
    assert age.min >= 20 and age.max <= 80


@pytest.mark.parametrize("disease", ["heart", "thyroid", "diabetes", "ckd"])
def test_deterministic(disease):
    spec = SynthSpec(200, seed=9, missing_rate=0.05)
    assert to_csv(synthesize(disease, spec)) == to_csv(synthesize(disease, spec))
    assert to_csv(synthesize(disease, spec)) != to_csv(synthesize(disease, SynthSpec(200, seed=10, missing_rate=0.05)))


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(0)
    with pytest.raises(ValueError):
        SynthSpec(10, signal_strength=1.5)
    with pytest.raises(ValueError):
        SynthSpec(10, positive_rate=1.0)


def test_thyroid_targets_are_raw_codes_at_default_rate():
    t = synthesize("thyroid", SynthSpec(5000, seed=4))
    codes = t.column("target")
    assert set(codes) <= set("-ABCDEFGH")
    rate = sum(c != "-" for c in codes) / len(codes)
    assert abs(rate - DEFAULT_POSITIVE_RATE["thyroid"]) < 0.015


def test_thyroid_unmeasured_labs_are_blank():
    t = synthesize("thyroid", SynthSpec(500, seed=4))
    for flag, value in zip(t.column("TBG_measured"), t.column("TBG")):
        if flag == "f":
            assert value is MISSING


def test_missing_rate_only_touches_features():
    t = synthesize("heart", SynthSpec(2000, seed=1, missing_rate=0.2))
    assert t.missing_count("target") == 0
    assert 300 < t.missing_count("age") < 500


def _heart_auc(signal: float, seed: int) -> float:
    t = synthesize("heart", SynthSpec(1500, seed=seed, signal_strength=signal))
    t = apply_encoder(t, fit_encoder(t, ["thal"]))
    tr, te = split(assemble(t), SplitSpec(seed=seed))
    return auc(roc_points(predict_scores(train_model("lr", tr), te), te.labels))


def test_auc_nondecreasing_in_signal():
    for seed in (1, 2):
        a0, a5, a1 = (_heart_auc(s, seed) for s in (0.0, 0.5, 1.0))
        assert a0 <= a5 <= a1
        assert 0.40 <= a0 <= 0.60
