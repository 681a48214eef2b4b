"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` to get one ``ACCEPTANCE n ...: PASS/FAIL``
line per criterion at the end of the run.
"""

from __future__ import annotations

import io
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronicpred.cli import main
from chronicpred.config import parse_config
from chronicpred.errors import ArtifactChecksumError, ArtifactError, ArtifactTruncatedError, ArtifactVersionError
from chronicpred.evaluation import auc, mann_whitney_auc, roc_points
from chronicpred.experiment import run_experiment, write_outputs
from chronicpred.goldens import CASES, check_case
from chronicpred.models import KINDS, BoostingConfig, TreeConfig, make_config, predict_scores, train_gbt, train_model
from chronicpred.models import logistic, mlp
from chronicpred.models.tree import LEAF, gini
from chronicpred.persist import load_model, save_model
from chronicpred.preprocess import (
    Rule,
    SplitSpec,
    apply_encoder,
    apply_imputer,
    assemble,
    dedupe,
    fit_encoder,
    fit_imputer,
    split_indices,
)
from chronicpred.rng import SplitMix64
from chronicpred.synth import SynthSpec, synthesize
from chronicpred.table import CATEGORICAL, MISSING, NUMERIC, TARGET, ColumnSpec, LabeledMatrix, Table
from conftest import criterion


def _matrix(X, y) -> LabeledMatrix:
    X = np.asarray(X, dtype=np.float64)
    return LabeledMatrix(X, np.asarray(y, dtype=np.int64), tuple(f"x{i}" for i in range(X.shape[1])))


# 1 ------------------------------------------------------------------------

PUBLISHED_ROWS = {
    # name: (counts, expected metric values, tolerance)
    "thyroid-lr": ((120, 34, 148, 2416), dict(precision=0.7792, recall=0.4478, f1=0.5687, accuracy=0.9330), 0.005),
    "thyroid-dt": ((222, 21, 46, 2429), dict(precision=0.9136, recall=0.8284, f1=0.8689, accuracy=0.9753), 0.005),
    "thyroid-rf": ((178, 20, 90, 2430), dict(precision=0.8990, recall=0.6642, f1=0.7639, accuracy=0.9595), 0.005),
    "thyroid-gbt": ((231, 23, 37, 2427), dict(precision=0.9094, recall=0.8619, f1=0.8851, accuracy=0.9779), 0.005),
    "ckd-nb": ((6078, 2657, 1111, 6938), dict(precision=0.70, recall=0.85, accuracy=0.78), 0.01),
    "heart-lr": ((112, 16, 15, 59), dict(accuracy=0.85), 0.01),
}


@criterion("1 golden metric arithmetic")
def test_golden_metric_arithmetic():
    start = time.perf_counter()
    out = io.StringIO()
    code = main(["goldens"], stdout=out)
    elapsed = time.perf_counter() - start
    assert code == 0, out.getvalue()
    assert elapsed < 1.0
    by_name = {c.name: c for c in CASES}
    for name, (counts, expected, tol) in PUBLISHED_ROWS.items():
        case = by_name[name]
        assert (case.counts.tp, case.counts.fp, case.counts.fn, case.counts.tn) == counts
        computed = check_case(case).computed
        for metric, want in expected.items():
            assert abs(getattr(computed, metric) - want) <= tol, (name, metric)
        assert f"PASS {name} " in out.getvalue()


# 2 ------------------------------------------------------------------------

@criterion("2 AUC oracle equivalence")
def test_auc_oracle_equivalence():
    rng = SplitMix64(20240601)
    checked = 0
    while checked < 200:
        n = 2 + int(rng.below(499))
        levels = 1 + int(rng.below(max(2, n // 3)))  # few levels force ties
        scores = rng.below_block(levels, n) / levels
        labels = rng.below_block(2, n)
        if labels.sum() in (0, n):
            continue
        assert abs(auc(roc_points(scores, labels)) - mann_whitney_auc(scores, labels)) <= 1e-12
        checked += 1


# 3 ------------------------------------------------------------------------

def _max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


@criterion("3 gradient checks")
def test_gradient_checks():
    eps = 1e-5
    rng = SplitMix64(99)
    worst_lr = worst_nn = 0.0
    for _ in range(20):
        n, d = 5 + int(rng.below(20)), 1 + int(rng.below(4))
        X = rng.random_block(n * d).reshape(n, d) * 4 - 2
        y = rng.below_block(2, n).astype(np.float64)
        w = rng.random_block(d) - 0.5
        b = float(rng.random() - 0.5)
        _, gw, gb = logistic.loss_and_grad(w, b, X, y)
        theta = np.r_[w, b]

        def f(t):
            return logistic.loss_and_grad(t[:-1], t[-1], X, y)[0]

        numeric = np.array([(f(theta + e) - f(theta - e)) / (2 * eps) for e in np.eye(d + 1) * eps])
        worst_lr = max(worst_lr, _max_relative_error(np.r_[gw, gb], numeric))

        h = 1 + int(rng.below(5))
        p = mlp.init_weights(int(rng.next_u64()), d, h)
        p = mlp.Weights(p.w1, rng.random_block(h) - 0.5, p.w2, float(rng.random() - 0.5))
        _, g = mlp.loss_and_grad(p, X, y)
        v = p.flat()

        def fn(t):
            return mlp.loss_and_grad(mlp.Weights.unflat(t, d, h), X, y)[0]

        numeric = np.array([(fn(v + e) - fn(v - e)) / (2 * eps) for e in np.eye(v.size) * eps])
        worst_nn = max(worst_nn, _max_relative_error(g.flat(), numeric))
    assert worst_lr < 1e-4, worst_lr
    assert worst_nn < 1e-4, worst_nn


# 4 ------------------------------------------------------------------------

def _brute_force_gain(X: np.ndarray, y: np.ndarray) -> float:
    best = 0.0
    n = y.size
    for f in range(X.shape[1]):
        values = np.unique(X[:, f])
        for lo, hi in zip(values, values[1:]):
            left = X[:, f] <= (lo + hi) / 2
            gain = gini(y) - (left.sum() * gini(y[left]) + (~left).sum() * gini(y[~left])) / n
            best = max(best, gain)
    return best


@criterion("4 CART oracle")
def test_cart_oracle():
    rng = SplitMix64(4)
    for _ in range(100):
        n, d = 2 + int(rng.below(29)), 1 + int(rng.below(3))
        X = rng.below_block(6, n * d).reshape(n, d).astype(np.float64)
        y = rng.below_block(2, n)
        tree = train_model("dt", _matrix(X, y), TreeConfig(max_depth=1, min_samples_leaf=1)).tree
        best = _brute_force_gain(X, y.astype(np.float64))
        if tree.feature[0] == LEAF:
            assert best <= 1e-12
            continue
        left = X[:, tree.feature[0]] <= tree.threshold[0]
        yf = y.astype(np.float64)
        gain = gini(yf) - (left.sum() * gini(yf[left]) + (~left).sum() * gini(yf[~left])) / n
        assert gain >= best - 1e-12


# 5 ------------------------------------------------------------------------

@criterion("5 GBT descent")
def test_gbt_descent():
    rng = SplitMix64(5)
    for _ in range(10):
        n, d = 40 + int(rng.below(160)), 1 + int(rng.below(5))
        X = rng.random_block(n * d).reshape(n, d)
        y = (rng.random_block(n) < 0.3 + 0.4 * X[:, 0]).astype(np.int64)
        if y.sum() in (0, n):
            y[0] = 1 - y[0]
        model = train_gbt(_matrix(X, y), BoostingConfig(n_trees=20))
        trace = np.asarray(model.loss_trace)
        assert trace.size == 21
        assert np.all(np.diff(trace) <= 1e-12)


# 6 ------------------------------------------------------------------------

ALL_MODELS = "\n".join(f"model = {k}" for k in KINDS)


@criterion("6 determinism and parallelism invariance")
def test_determinism_and_parallelism(tmp_path):
    text = f"preset = heart\nsynth.n = 600\nsynth.missing_rate = 0.02\nseed = 11\n{ALL_MODELS}\n"
    dirs = []
    for run, workers in enumerate((1, 1, 4)):
        cfg = parse_config(text + f"workers = {workers}\n")
        out = tmp_path / f"run{run}"
        write_outputs(run_experiment(cfg), out)
        dirs.append(out)
    files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    assert {f"{k}/model.ckpt" for k in KINDS} <= {str(f) for f in files}
    for other in dirs[1:]:
        assert sorted(p.relative_to(other) for p in other.rglob("*") if p.is_file()) == files
        for rel in files:
            assert (dirs[0] / rel).read_bytes() == (other / rel).read_bytes(), rel


# 7 ------------------------------------------------------------------------

def _heart_aucs(signal: float, models: tuple[str, ...]) -> dict[str, float]:
    body = "\n".join(f"model = {k}" for k in models)
    cfg = parse_config(f"preset = heart\nsynth.n = 5000\nsynth.signal = {signal}\nseed = 2\nworkers = 4\n{body}\n")
    result = run_experiment(cfg)
    return {o.kind: o.evaluation.metrics.auc for o in result.outcomes}


@criterion("7 end-to-end signal recovery")
def test_signal_recovery():
    strong = _heart_aucs(1.0, ("lr", "rf", "gbt"))
    assert strong["rf"] >= 0.95 and strong["gbt"] >= 0.95 and strong["lr"] >= 0.85, strong
    null = _heart_aucs(0.0, KINDS)
    assert all(0.40 <= v <= 0.60 for v in null.values()), null


# 8 ------------------------------------------------------------------------

_NUM = ColumnSpec("n", NUMERIC)
_CAT = ColumnSpec("c", CATEGORICAL)
_Y = ColumnSpec("y", NUMERIC, TARGET)
_cells = st.tuples(st.sampled_from([0.5, 1.0, 2.0, MISSING]), st.sampled_from(["a", "b", "c", MISSING]),
                   st.sampled_from([0.0, 1.0]))


@settings(max_examples=200, deadline=None)
@given(st.lists(_cells, min_size=1, max_size=40))
def _imputation_leaves_no_missing(rows):
    t = Table((_NUM, _CAT, _Y), tuple(rows))
    policy = {name: rule for name, rule in (("n", Rule.MEAN), ("c", Rule.MODE))
              if t.missing_count(name) < t.n_rows}
    out = apply_imputer(t, fit_imputer(t, policy))
    assert all(out.missing_count(name) == 0 for name in policy)


@settings(max_examples=200, deadline=None)
@given(st.lists(_cells, max_size=40))
def _dedupe_idempotent(rows):
    once = dedupe(Table((_NUM, _CAT, _Y), tuple(rows)))
    assert dedupe(once) == once


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=4, max_size=300), st.floats(0.05, 0.95), st.integers(0, 2**64 - 1))
def _split_partition_and_stratification(labels, fraction, seed):
    y = np.asarray(labels)
    if min(y.sum(), y.size - y.sum()) < 2:
        return
    train, test = split_indices(y, SplitSpec(fraction, True, seed))
    assert np.array_equal(np.sort(np.concatenate([train, test])), np.arange(y.size))
    for cls in (0, 1):
        n_c = int((y == cls).sum())
        assert abs(int((y[train] == cls).sum()) - n_c * fraction) <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.text("abcxyz", min_size=1, max_size=3), min_size=1, max_size=80))
def _encoder_ordering(tokens):
    t = Table((_NUM, _CAT, _Y), tuple((0.0, tok, 0.0) for tok in tokens))
    mapping = fit_encoder(t, ["c"]).mapping["c"]
    counts = {tok: tokens.count(tok) for tok in set(tokens)}
    expected = sorted(counts, key=lambda tok: (-counts[tok], tok))
    assert [tok for tok, _ in sorted(mapping.items(), key=lambda kv: kv[1])] == expected
    assert apply_encoder(t, fit_encoder(t, ["c"])).column("c_index") == tuple(float(mapping[x]) for x in tokens)


@criterion("8 preprocessing invariants")
def test_preprocessing_invariants():
    _imputation_leaves_no_missing()
    _dedupe_idempotent()
    _split_partition_and_stratification()
    _encoder_ordering()


# 9 ------------------------------------------------------------------------

@criterion("9 persistence round-trip")
def test_persistence_round_trip():
    t = synthesize("heart", SynthSpec(300, seed=9))
    t = apply_encoder(t, fit_encoder(t, ["thal"]))
    m = assemble(t)
    probe = LabeledMatrix(m.features[:100], m.labels[:100], m.feature_names)
    small = {"rf": {"n_trees": 20}, "gbt": {"n_trees": 20}, "nn": {"epochs": 10}, "nb": {"categorical": [9]}}
    for kind in KINDS:
        model = train_model(kind, m, make_config(kind, small.get(kind, {})))
        blob = save_model(model)
        restored = load_model(blob)
        assert np.array_equal(predict_scores(restored, probe), predict_scores(model, probe)), kind

        body = blob.index(b"\n") + 1
        mid = body + (len(blob) - body) // 2
        with pytest.raises(ArtifactChecksumError):
            load_model(blob[:mid] + bytes([blob[mid] ^ 0x20]) + blob[mid + 1:])
        with pytest.raises(ArtifactTruncatedError):
            load_model(blob[: len(blob) - 5])
        with pytest.raises(ArtifactVersionError):
            load_model(blob.replace(b" v1 ", b" v7 ", 1))
        rng = SplitMix64(len(blob))
        for _ in range(50):
            i = int(rng.below(len(blob)))
            corrupted = blob[:i] + bytes([blob[i] ^ (1 + int(rng.below(255)))]) + blob[i + 1:]
            with pytest.raises(ArtifactError):
                load_model(corrupted)
