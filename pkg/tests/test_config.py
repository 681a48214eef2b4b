from __future__ import annotations

import pytest

from chronicpred.config import PRESETS, format_config, load_config, parse_config, preset
from chronicpred.errors import ConfigError
from chronicpred.models import BoostingConfig
from chronicpred.preprocess import Rule
from chronicpred.rng import derive_seed
from chronicpred.schemas import Disease


def test_presets_validate():
    for name in PRESETS:
        cfg = preset(name)
        assert cfg.models
        assert parse_config(f"preset = {name}") == cfg


def test_basic_parse():
    cfg = parse_config(
        """
        # heart experiment
        disease = heart
        seed = 7
        steps = impute, encode
        impute.numeric = zero
        model = lr
        model = gbt
        model.gbt.n_trees = 20
        model.gbt.learning_rate = 0.2
        split.stratified = false
        threshold = fixed(0.5)
        """
    )
    assert cfg.disease is Disease.HEART and cfg.seed == 7
    assert cfg.models == ("lr", "gbt")
    assert cfg.impute_numeric is Rule.ZERO and not cfg.stratified
    assert cfg.model_config("gbt") == BoostingConfig(n_trees=20, learning_rate=0.2)
    assert cfg.model_config("rf").seed == derive_seed(7, "model.rf")


def test_mode_on_numeric_column_names_it():
    with pytest.raises(ConfigError) as info:
        parse_config("disease = heart\nmodel = lr\nimpute.column.chol = mode")
    assert "chol" in str(info.value)
    assert info.value.field == "impute.column.chol"


@pytest.mark.parametrize(
    "text, field",
    [
        ("model = lr", "disease"),
        ("disease = lung\nmodel = lr", "disease"),
        ("disease = heart\nmodel = svm", "model"),
        ("disease = heart\nmodel = lr\nbogus = 1", "bogus"),
        ("disease = heart\nmodel = lr\nmodel.lr.learning_rate = fast", "model.lr.learning_rate"),
        ("disease = heart\nmodel = lr\nmodel.lr.depth = 3", "model.lr.depth"),
        ("disease = heart\nmodel = lr\nsplit.train_fraction = 1.5", "split.train_fraction"),
        ("disease = heart\nmodel = lr\nsteps = impute, fold", "steps"),
        ("disease = heart\nmodel = lr\nthreshold = best", "threshold"),
        ("disease = heart\nmodel = lr\nworkers = 0", "workers"),
        ("disease = heart\nmodel = lr\nsynth.signal = 2", "synth"),
        ("disease = heart\nmodel = lr\nfit_on_train_only = true\nsteps = impute, dedupe", "steps"),
        ("disease = heart\nno equals sign", "line 2"),
    ],
)
def test_errors_carry_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field


def test_format_round_trip(tmp_path):
    cfg = parse_config("preset = thyroid\nseed = 3\nmodel = lr\nmodel.lr.l2 = 0.01\nsynth.n = 500")
    again = parse_config(format_config(cfg))
    assert again == cfg
    path = tmp_path / "exp.cfg"
    path.write_text("preset = heart\ndata = rows.csv\n")
    loaded = load_config(path)
    assert loaded.data_path == tmp_path / "rows.csv"
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")
