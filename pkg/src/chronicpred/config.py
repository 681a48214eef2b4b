"""Line-oriented ``key = value`` experiment configs and the disease presets.

Keys::

    preset = heart                  # start from a built-in preset
    experiment = heart-synth
    disease = heart
    data = synth | <csv path>       # relative paths resolve against the config file
    synth.n / synth.signal / synth.positive_rate / synth.missing_rate / synth.seed
    seed = 42                       # master seed; every component derives its own
    workers = 1
    steps = impute, encode, validate
    impute.numeric = zero|mean|none
    impute.categorical = mode|none
    impute.column.<name> = zero|mean|mode|none
    encode.columns = a, b           # default: every categorical feature
    binarize.positive = A, B        # or binarize.negative = -
    validate.rule.<column> = <min>, <max>
    features = age, sex             # optional subset; default all features
    fit_on_train_only = false
    split.train_fraction / split.stratified
    threshold = max_f1 | max_youden | fixed(0.5)
    model = lr                      # repeat per model, in report order
    model.<kind>.<param> = value
    compare_published = false
    out = results/heart

Repeating a scalar key replaces the earlier value; ``model`` lines accumulate
(a ``model`` line in a file replaces the preset's model list).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, SchemaError
from .evaluation import parse_criterion
from .models import KINDS, make_config
from .preprocess import PlausibilityRule, Rule, check_policy, default_policy
from .rng import derive_seed
from .schemas import Disease, builtin_schema
from .synth import SynthSpec

STEPS = ("dedupe", "drop_null_columns", "impute", "encode", "binarize", "validate")
FITTED_STEPS = ("impute", "encode")
ROW_STEPS = ("dedupe",)


@dataclass(frozen=True)
class PipelineConfig:
    experiment: str
    disease: Disease
    data: str = "synth"
    synth_n: int = 1000
    synth_signal: float = 1.0
    synth_positive_rate: float | None = None
    synth_missing_rate: float = 0.0
    synth_seed: int | None = None
    seed: int = 0
    workers: int = 1
    steps: tuple[str, ...] = ("impute", "encode", "validate")
    impute_numeric: Rule = Rule.MEAN
    impute_categorical: Rule = Rule.MODE
    impute_columns: tuple[tuple[str, Rule], ...] = ()
    encode_columns: tuple[str, ...] | None = None
    binarize_positive: tuple[str, ...] = ()
    binarize_negative: tuple[str, ...] = ()
    plausibility: tuple[PlausibilityRule, ...] = ()
    features: tuple[str, ...] | None = None
    fit_on_train_only: bool = False
    train_fraction: float = 0.8
    stratified: bool = True
    threshold: str = "max_f1"
    models: tuple[str, ...] = ("lr",)
    hyperparams: tuple[tuple[str, str, str], ...] = ()  # (kind, name, raw value)
    compare_published: bool = False
    out: str | None = None
    base_dir: str = "."

    @property
    def data_path(self) -> Path | None:
        if self.data == "synth":
            return None
        p = Path(self.data)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def synth_spec(self) -> SynthSpec:
        seed = self.synth_seed if self.synth_seed is not None else derive_seed(self.seed, "synth")
        return SynthSpec(self.synth_n, seed, self.synth_signal, self.synth_positive_rate, self.synth_missing_rate)

    def split_seed(self) -> int:
        return derive_seed(self.seed, "split")

    def impute_policy(self, schema) -> dict[str, Rule]:
        return default_policy(schema, self.impute_numeric, self.impute_categorical, dict(self.impute_columns))

    def model_config(self, kind: str):
        values = {}
        for k, name, raw in self.hyperparams:
            if k == kind:
                values[name] = _coerce_hp(kind, name, raw)
        cfg_type = make_config(kind).__class__
        names = {f.name for f in dataclasses.fields(cfg_type)}
        if "seed" in names and "seed" not in values:
            values["seed"] = derive_seed(self.seed, f"model.{kind}")
        try:
            return make_config(kind, values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"model.{kind}") from None

    def with_overrides(self, **kw) -> PipelineConfig:
        return dataclasses.replace(self, **{k: v for k, v in kw.items() if v is not None})


def _coerce_hp(kind: str, name: str, raw: str):
    cfg_type = make_config(kind).__class__
    types = {f.name: str(f.type) for f in dataclasses.fields(cfg_type)}
    where = f"model.{kind}.{name}"
    if name not in types:
        raise ConfigError(f"unknown hyperparameter {name!r} for {kind}; valid: {sorted(types)}", where)
    t = types[name]
    try:
        if t.startswith("tuple"):
            return tuple(int(v) for v in _list(raw))
        if "None" in t and raw.strip().lower() in ("none", "auto", ""):
            return None
        if t.startswith("int"):
            return int(raw)
        if t.startswith("float"):
            return float(raw)
        if t.startswith("bool"):
            return _bool(raw, where)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {t}", where) from None
    return raw


def _list(raw: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in raw.split(",") if v.strip())


def _bool(raw: str, where: str) -> bool:
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}", where)


PRESETS: dict[str, dict[str, object]] = {
    "heart": dict(
        experiment="heart", disease=Disease.HEART, synth_n=2000,
        steps=("impute", "encode", "validate"),
        impute_numeric=Rule.ZERO, impute_categorical=Rule.MODE,
        train_fraction=0.8, stratified=True, models=("lr", "rf", "gbt"),
    ),
    "thyroid": dict(
        experiment="thyroid", disease=Disease.THYROID, synth_n=3000,
        steps=("impute", "binarize", "encode", "validate"),
        impute_numeric=Rule.MEAN, impute_categorical=Rule.MODE,
        binarize_negative=("-",),
        plausibility=(PlausibilityRule("age", 0.0, 120.0),),
        train_fraction=0.7, stratified=True, models=("lr", "dt", "rf", "gbt", "nn"),
    ),
    "diabetes": dict(
        experiment="diabetes", disease=Disease.DIABETES, synth_n=5000,
        steps=("dedupe", "impute", "encode", "validate"),
        impute_numeric=Rule.MEAN, impute_categorical=Rule.MODE,
        train_fraction=0.8, stratified=True, models=("lr", "rf", "gbt"),
    ),
    "ckd": dict(
        experiment="ckd", disease=Disease.CKD, synth_n=3000,
        steps=("drop_null_columns", "encode", "validate"),
        train_fraction=0.8, stratified=False, models=("lr", "nb", "rf"),
    ),
}


def preset(name: str) -> PipelineConfig:
    try:
        return PipelineConfig(**PRESETS[name.strip().lower()])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}", "preset") from None


_SCALARS = {
    "experiment": ("experiment", str),
    "data": ("data", str),
    "synth.n": ("synth_n", int),
    "synth.signal": ("synth_signal", float),
    "synth.positive_rate": ("synth_positive_rate", float),
    "synth.missing_rate": ("synth_missing_rate", float),
    "synth.seed": ("synth_seed", int),
    "seed": ("seed", int),
    "workers": ("workers", int),
    "split.train_fraction": ("train_fraction", float),
    "threshold": ("threshold", str),
    "out": ("out", str),
}


def parse_config(text: str, base_dir: str | Path = ".") -> PipelineConfig:
    """Parse config text; every error carries the offending key as ``field``."""
    entries: list[tuple[int, str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'", f"line {lineno}")
        key, value = (s.strip() for s in stripped.split("=", 1))
        entries.append((lineno, key, value))

    keys = [k for _, k, _ in entries]
    if "preset" in keys:
        cfg = preset(next(v for _, k, v in entries if k == "preset"))
    else:
        disease = next((v for _, k, v in entries if k == "disease"), None)
        if disease is None:
            raise ConfigError("config needs 'disease' or 'preset'", "disease")
        try:
            d = Disease.parse(disease)
        except SchemaError as exc:
            raise ConfigError(str(exc), "disease") from None
        cfg = PipelineConfig(experiment=d.value, disease=d)

    updates: dict[str, object] = {"base_dir": str(base_dir)}
    models: list[str] = []
    hps: list[tuple[str, str, str]] = list(cfg.hyperparams)
    impute_cols = dict(cfg.impute_columns)
    rules = {r.column: r for r in cfg.plausibility}
    for lineno, key, value in entries:
        try:
            if key == "preset":
                continue
            if key == "disease":
                updates["disease"] = Disease.parse(value)
            elif key in _SCALARS:
                attr, conv = _SCALARS[key]
                updates[attr] = conv(value)
            elif key == "steps":
                updates["steps"] = _list(value)
            elif key in ("impute.numeric", "impute.categorical"):
                updates["impute_" + key.split(".")[1]] = Rule(value)
            elif key.startswith("impute.column."):
                impute_cols[key[len("impute.column."):]] = Rule(value)
            elif key == "encode.columns":
                updates["encode_columns"] = _list(value)
            elif key == "binarize.positive":
                updates["binarize_positive"] = _list(value)
            elif key == "binarize.negative":
                updates["binarize_negative"] = _list(value)
            elif key.startswith("validate.rule."):
                lo, hi = (float(v) for v in _list(value))
                col = key[len("validate.rule."):]
                rules[col] = PlausibilityRule(col, lo, hi)
            elif key == "features":
                updates["features"] = _list(value) or None
            elif key == "fit_on_train_only":
                updates["fit_on_train_only"] = _bool(value, key)
            elif key == "split.stratified":
                updates["stratified"] = _bool(value, key)
            elif key == "compare_published":
                updates["compare_published"] = _bool(value, key)
            elif key == "model":
                models.append(value.strip().lower())
            elif key.startswith("model.") and key.count(".") == 2:
                _, kind, name = key.split(".")
                hps.append((kind.lower(), name, value))
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}", key)
        except ConfigError:
            raise
        except (ValueError, SchemaError) as exc:
            raise ConfigError(f"line {lineno}: {exc}", key) from None
    if models:
        updates["models"] = tuple(models)
    updates["hyperparams"] = tuple(hps)
    updates["impute_columns"] = tuple(impute_cols.items())
    updates["plausibility"] = tuple(rules.values())
    cfg = dataclasses.replace(cfg, **updates)
    validate_config(cfg)
    return cfg


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", "config")
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


def validate_config(cfg: PipelineConfig) -> None:
    schema = builtin_schema(cfg.disease)
    names = {c.name for c in schema}
    for step in cfg.steps:
        if step not in STEPS:
            raise ConfigError(f"unknown step {step!r}; valid steps: {', '.join(STEPS)}", "steps")
    if len(set(cfg.steps)) != len(cfg.steps):
        raise ConfigError("a step may appear only once", "steps")
    for name, rule in cfg.impute_columns:
        if name not in names:
            raise ConfigError(f"imputation rule for unknown column {name!r}", f"impute.column.{name}")
        try:
            check_policy(schema, {name: rule})
        except SchemaError as exc:
            raise ConfigError(str(exc), f"impute.column.{name}") from None
    if cfg.impute_numeric is Rule.MODE:
        raise ConfigError("mode imputation requires categorical columns", "impute.numeric")
    if cfg.impute_categorical in (Rule.ZERO, Rule.MEAN):
        raise ConfigError(f"{cfg.impute_categorical.value} imputation requires numeric columns",
                          "impute.categorical")
    for rule in cfg.plausibility:
        if rule.column not in names:
            raise ConfigError(f"plausibility rule for unknown column {rule.column!r}", f"validate.rule.{rule.column}")
    if "binarize" in cfg.steps and not (cfg.binarize_positive or cfg.binarize_negative):
        raise ConfigError("binarize step needs binarize.positive or binarize.negative", "binarize")
    if cfg.binarize_positive and cfg.binarize_negative:
        raise ConfigError("give binarize.positive or binarize.negative, not both", "binarize")
    if cfg.fit_on_train_only:
        fitted = [i for i, s in enumerate(cfg.steps) if s in FITTED_STEPS]
        if fitted and any(s in ROW_STEPS for s in cfg.steps[fitted[0]:]):
            raise ConfigError("with fit_on_train_only, row-removing steps must precede impute/encode", "steps")
    if not cfg.models:
        raise ConfigError("at least one model is required", "model")
    for kind in cfg.models:
        if kind not in KINDS:
            raise ConfigError(f"unknown model kind {kind!r}; valid kinds: {', '.join(KINDS)}", "model")
    if len(set(cfg.models)) != len(cfg.models):
        raise ConfigError("each model kind may be listed once", "model")
    for kind, name, _ in cfg.hyperparams:
        if kind not in KINDS:
            raise ConfigError(f"unknown model kind {kind!r}", f"model.{kind}.{name}")
    for kind in cfg.models:
        cfg.model_config(kind)
    try:
        parse_criterion(cfg.threshold)
    except ValueError as exc:
        raise ConfigError(str(exc), "threshold") from None
    if not 0.0 < cfg.train_fraction < 1.0:
        raise ConfigError("must be in (0, 1)", "split.train_fraction")
    if cfg.workers < 1:
        raise ConfigError("must be at least 1", "workers")
    if cfg.data == "synth":
        try:
            cfg.synth_spec()
        except ValueError as exc:
            raise ConfigError(str(exc), "synth") from None


def format_config(cfg: PipelineConfig) -> str:
    """Render a config back to the file format (used to record resolved runs)."""
    lines = [
        f"experiment = {cfg.experiment}",
        f"disease = {cfg.disease.value}",
        f"data = {cfg.data}",
    ]
    if cfg.data == "synth":
        lines += [f"synth.n = {cfg.synth_n}", f"synth.signal = {cfg.synth_signal!r}",
                  f"synth.missing_rate = {cfg.synth_missing_rate!r}"]
        if cfg.synth_positive_rate is not None:
            lines.append(f"synth.positive_rate = {cfg.synth_positive_rate!r}")
        if cfg.synth_seed is not None:
            lines.append(f"synth.seed = {cfg.synth_seed}")
    lines += [f"seed = {cfg.seed}", f"steps = {', '.join(cfg.steps)}",
              f"impute.numeric = {cfg.impute_numeric.value}",
              f"impute.categorical = {cfg.impute_categorical.value}"]
    lines += [f"impute.column.{n} = {r.value}" for n, r in cfg.impute_columns]
    if cfg.encode_columns is not None:
        lines.append(f"encode.columns = {', '.join(cfg.encode_columns)}")
    if cfg.binarize_positive:
        lines.append(f"binarize.positive = {', '.join(cfg.binarize_positive)}")
    if cfg.binarize_negative:
        lines.append(f"binarize.negative = {', '.join(cfg.binarize_negative)}")
    lines += [f"validate.rule.{r.column} = {r.min!r}, {r.max!r}" for r in cfg.plausibility]
    if cfg.features is not None:
        lines.append(f"features = {', '.join(cfg.features)}")
    lines += [f"fit_on_train_only = {str(cfg.fit_on_train_only).lower()}",
              f"split.train_fraction = {cfg.train_fraction!r}",
              f"split.stratified = {str(cfg.stratified).lower()}",
              f"threshold = {cfg.threshold}"]
    lines += [f"model = {k}" for k in cfg.models]
    lines += [f"model.{k}.{n} = {v}" for k, n, v in cfg.hyperparams]
    lines.append(f"compare_published = {str(cfg.compare_published).lower()}")
    return "\n".join(lines) + "\n"
