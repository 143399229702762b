import json
import warnings
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phonebench.classifiers import KINDS, ModelSpec
from phonebench.dataset.inventory import PhonemeClass, PhonemeInventory
from phonebench.dsp.features import REPRESENTATIONS
from phonebench.evaluation import (
    BenchmarkReport, CellResult, accuracy, apply_scaler, benchmark_features,
    chance_baseline, confusion_matrix, evaluate_cell, fit_scaler, format_score,
    model_seed, per_class_accuracy, render_table1, render_table2, round_half_up,
    stratified_folds, subgroup_accuracy,
)
from phonebench.evaluation import benchmark as benchmark_module
from phonebench.exceptions import (
    ConfigError, DataError, FormatError, LabelError, RenderError, SmallClassWarning,
)

TINY = {
    "dense_nn": {"hidden": (8,), "epochs": 2},
    "random_forest": {"n_estimators": 3},
    "logreg_l1": {"max_iter": 50},
    "logreg_l2": {"max_iter": 50},
    "logreg_elasticnet": {"max_iter": 50},
}


def tiny_specs(kinds=KINDS):
    return [ModelSpec(k, TINY.get(k, {})) for k in kinds]


@pytest.fixture(scope="module")
def small_inventory():
    return PhonemeInventory([
        PhonemeClass("a", "vowel", "unrounded"),
        PhonemeClass("o", "vowel", "rounded"),
        PhonemeClass("s", "consonant", "fricative"),
        PhonemeClass("SIL", "silence"),
    ])


def toy_problem(n_per=15, d=6, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.repeat(["a", "o", "s", "SIL"], n_per)
    centers = rng.normal(scale=2.0, size=(4, d))
    idx = np.repeat(np.arange(4), n_per)
    return centers[idx] + rng.normal(size=(idx.size, d)), labels


# --- folds ----------------------------------------------------------------

def test_exact_divisibility():
    y = np.array(["A"] * 10 + ["B"] * 5)
    plan = stratified_folds(y, k=5, seed=3)
    for _, test in plan.splits():
        assert Counter(y[test].tolist()) == {"A": 2, "B": 1}


def test_seven_samples_round_robin():
    plan = stratified_folds(np.zeros(7, dtype=int), k=5, seed=1)
    assert sorted(plan.fold_sizes().tolist()) == [1, 1, 1, 2, 2]


def test_small_class_kept_with_warning():
    y = np.array(["A"] * 10 + ["B"] * 3)
    with pytest.warns(SmallClassWarning):
        plan = stratified_folds(y, k=5)
    per_fold = [int(np.sum(y[test] == "B")) for _, test in plan.splits()]
    assert sorted(per_fold) == [0, 0, 1, 1, 1]
    assert plan.small_classes == ("B",)


def test_too_few_samples():
    with pytest.raises(DataError):
        stratified_folds(np.arange(4), k=5)
    with pytest.raises(DataError):
        stratified_folds(np.arange(10), k=1)


@settings(max_examples=60, deadline=None)
@given(counts=st.lists(st.integers(1, 30), min_size=1, max_size=6),
       k=st.integers(2, 7), seed=st.integers(0, 2**63))
def test_fold_partition_property(counts, k, seed):
    y = np.repeat(np.arange(len(counts)), counts)
    if y.size < k:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallClassWarning)
        plan = stratified_folds(y, k=k, seed=seed)
        assert plan == stratified_folds(y, k=k, seed=seed)
    tests = np.concatenate([t for _, t in plan.splits()])
    assert np.array_equal(np.sort(tests), np.arange(y.size))
    for train, test in plan.splits():
        assert np.intersect1d(train, test).size == 0
    for c in range(len(counts)):
        per_fold = np.bincount(plan.assignment[y == c], minlength=k)
        assert per_fold.max() - per_fold.min() <= 1
    assert plan.fold_sizes().max() - plan.fold_sizes().min() <= 1


# --- scaler ---------------------------------------------------------------

def test_scaler_standardizes_training_columns(rng):
    X = rng.normal(loc=[3.0, -7.0, 100.0], scale=[0.5, 4.0, 30.0], size=(200, 3))
    Z = apply_scaler(fit_scaler(X), X)
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(Z.std(axis=0) - 1.0) < 1e-9)


def test_constant_column_maps_to_zero(rng):
    X = np.column_stack([rng.normal(size=50), np.full(50, 0.1)])
    scaler = fit_scaler(X)
    assert scaler.std[1] == 0.0
    assert np.all(apply_scaler(scaler, X)[:, 1] == 0.0)
    assert np.all(apply_scaler(scaler, X + 5.0)[:, 1] == 0.0)


def test_test_rows_use_training_statistics(rng):
    train = rng.normal(loc=2.0, scale=3.0, size=(100, 1))
    scaler = fit_scaler(train)
    shifted = apply_scaler(scaler, train + scaler.std[0])
    assert shifted.mean() == pytest.approx(1.0, abs=1e-12)


def test_no_leakage_into_scaler(monkeypatch):
    X, y = toy_problem()
    plan = stratified_folds(y, k=5, seed=0)
    seen = []
    real = benchmark_module.fit_scaler

    def recording(rows):
        seen.append(np.array(rows))
        return real(rows)

    monkeypatch.setattr(benchmark_module, "fit_scaler", recording)
    evaluate_cell(X, y, ModelSpec("decision_tree"), plan, ["a", "o", "s", "SIL"])
    assert len(seen) == 5
    for rows, (train, test) in zip(seen, plan.splits()):
        assert np.array_equal(rows, X[train])
        # mutating held-out rows must not move the statistics
        mutated = X.copy()
        mutated[test] += 1e6
        again = real(mutated[train])
        assert np.array_equal(again.mean, real(rows).mean)


# --- metrics --------------------------------------------------------------

def test_confusion_and_accuracy():
    cm = confusion_matrix(["a", "b", "b", "c"], ["a", "b", "c", "c"], ["a", "b", "c"])
    assert cm.tolist() == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    assert accuracy(cm) == 0.75
    with pytest.raises(LabelError):
        confusion_matrix(["a"], ["z"], ["a", "b"])
    with pytest.raises(DataError):
        accuracy(np.zeros((2, 2), dtype=int))


def test_identity_confusion_gives_perfect_groups(default_inventory):
    n = len(default_inventory.labels)
    groups = subgroup_accuracy(np.eye(n, dtype=int) * 4, default_inventory)
    assert all(v == 1.0 for v in groups.values())


def test_all_silence_predictions(default_inventory):
    labels = list(default_inventory.labels)
    sil = labels.index(default_inventory.silence_label)
    cm = np.zeros((len(labels), len(labels)), dtype=int)
    cm[:, sil] = 3
    groups = subgroup_accuracy(cm, default_inventory)
    assert groups.pop("silence") == 1.0
    assert all(v == 0.0 for v in groups.values())


def test_hand_built_subgroups(small_inventory):
    # rows: true a, o, s, SIL
    cm = np.array([[8, 1, 1, 0],
                   [2, 5, 0, 3],
                   [0, 0, 9, 1],
                   [1, 0, 0, 4]])
    groups = subgroup_accuracy(cm, small_inventory)
    assert groups["vowel"] == pytest.approx(13 / 20)
    assert groups["vowel/rounded"] == pytest.approx(5 / 10)
    assert groups["vowel/unrounded"] == pytest.approx(8 / 10)
    assert groups["consonant"] == pytest.approx(9 / 10)
    assert groups["consonant/fricative"] == pytest.approx(9 / 10)
    assert groups["consonant/nasal"] is None
    assert groups["silence"] == pytest.approx(4 / 5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 20), min_size=4, max_size=4),
                min_size=4, max_size=4))
def test_weighted_per_class_equals_overall(rows):
    cm = np.array(rows)
    if cm.sum() == 0:
        return
    per_class = per_class_accuracy(cm, ["a", "b", "c", "d"])
    support = cm.sum(axis=1)
    weighted = sum(support[i] * acc for i, acc in enumerate(per_class.values())
                   if acc is not None) / support.sum()
    assert abs(weighted - accuracy(cm)) < 1e-12
    assert accuracy(cm) == np.trace(cm) / cm.sum()


def test_chance_baseline(default_inventory):
    assert chance_baseline(default_inventory.labels) == pytest.approx(0.0303, abs=5e-5)
    assert format_score(chance_baseline(33)) == "0.03"


# --- benchmark ------------------------------------------------------------

class MajorityModel:
    def fit(self, X, y):
        values, counts = np.unique(y, return_counts=True)
        self.label_ = values[np.argmax(counts)]
        return self

    def predict(self, X):
        return np.full(len(X), self.label_, dtype=object)


def test_majority_classifier_scores_majority_fraction(monkeypatch):
    y = np.array(["a"] * 30 + ["o"] * 10 + ["s"] * 10)
    X = np.random.default_rng(0).normal(size=(50, 2))
    monkeypatch.setattr(benchmark_module, "train_classifier",
                        lambda spec, X, y: MajorityModel().fit(X, y))
    report = benchmark_features({"mfcc-frame": X}, y, ["decision_tree"], k=5, seed=0)
    assert report.cell("mfcc-frame", "decision_tree").mean == pytest.approx(0.6)


@pytest.fixture(scope="module")
def full_grid(small_inventory):
    X, y = toy_problem(n_per=10)
    rng = np.random.default_rng(5)
    features = {name: X[:, : 2 + i % 4] + 0.1 * rng.normal(size=(y.size, 2 + i % 4))
                for i, name in enumerate(REPRESENTATIONS)}
    return features, y, benchmark_features(features, y, tiny_specs(), k=5, seed=9,
                                           inventory=small_inventory)


def test_grid_shape(full_grid):
    _, _, report = full_grid
    assert len(report.representations) == 9 and len(report.classifiers) == 8
    assert sum(len(row) for row in report.grid.values()) == 72
    assert report.missing_cells() == []
    assert report.means().shape == (9, 8)


def test_report_invariants(full_grid):
    _, y, report = full_grid
    support = np.array([np.sum(y == c) for c in report.classes])
    for row in report.grid.values():
        for cell in row.values():
            assert len(cell.fold_accs) == 5
            assert abs(cell.mean - sum(cell.fold_accs) / 5) < 1e-12
            assert np.array_equal(cell.confusion.sum(axis=1), support)
            assert cell.overall == np.trace(cell.confusion) / cell.confusion.sum()


def test_same_seed_same_report(full_grid, small_inventory):
    features, y, report = full_grid
    again = benchmark_features(features, y, tiny_specs(), k=5, seed=9,
                               inventory=small_inventory)
    assert again.to_json() == report.to_json()
    assert render_table1(again) == render_table1(report)
    assert render_table2(again, "mfcc-segment:dense_nn") == render_table2(
        report, "mfcc-segment:dense_nn")


def test_report_json_round_trip(full_grid, tmp_path):
    _, _, report = full_grid
    path = tmp_path / "report.json"
    report.save(path)
    loaded = BenchmarkReport.load(path)
    assert loaded.to_json() == report.to_json()
    data = json.loads(path.read_text())
    cell = data["grid"]["mfcc-frame"]["dense_nn"]
    assert {"fold_accs", "mean", "confusion", "per_class", "per_subgroup"} <= set(cell)


def test_report_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        BenchmarkReport.load(path)
    path.write_text(json.dumps({"version": 99}))
    with pytest.raises(FormatError):
        BenchmarkReport.load(path)


def test_cell_errors_carry_context():
    X, y = toy_problem(n_per=5)
    with pytest.raises(DataError) as info:
        benchmark_features({"lpc-frame": X[:-1]}, y, ["decision_tree"])
    assert "lpc-frame" in str(info.value)
    bad = ModelSpec("svm_rbf", {"C": -1.0})
    with pytest.raises(Exception) as info:
        benchmark_features({"lpc-frame": X}, y, [bad])
    assert str(info.value).startswith("[lpc-frame:svm_rbf]")
    assert info.value.cell == ("lpc-frame", "svm_rbf")


def test_model_seed_scheme():
    assert model_seed(0, "mfcc-frame", "dense_nn", 0) == model_seed(0, "mfcc-frame",
                                                                    "dense_nn", 0)
    seeds = {model_seed(s, r, "dense_nn", f) for s in (0, 1, 2**40)
             for r in ("mfcc-frame", "lpc-frame") for f in range(5)}
    assert len(seeds) == 30
    with pytest.raises(ConfigError):
        benchmark_features({"x": np.zeros((10, 1))}, np.arange(10) % 2, ["dense_nn"],
                           seed=-1)


# --- rendering ------------------------------------------------------------

def synthetic_report(means, classes=("a", "o", "s", "SIL")):
    reps = list(means)
    kinds = list(next(iter(means.values())))
    grid = {}
    for r in reps:
        grid[r] = {}
        for c in kinds:
            m = means[r][c]
            grid[r][c] = CellResult([m] * 5, np.eye(len(classes), dtype=np.int64),
                                    {label: 1.0 for label in classes}, {})
    return BenchmarkReport(reps, kinds, list(classes), 5, 0, 1 / len(classes), grid,
                           silence_label="SIL")


def table_cells(text):
    rows = {}
    for line in text.splitlines():
        if line.startswith("| ") and not line.startswith("| ---"):
            parts = [p.strip() for p in line.strip("|").split("|")]
            rows[parts[0]] = parts[1:]
    return rows


def test_global_best_is_bold_and_starred():
    report = synthetic_report({
        "mfcc-frame": {"dense_nn": 0.8, "svm_rbf": 0.70},
        "mfcc-segment": {"dense_nn": 0.86, "svm_rbf": 0.74},
        "ae-small": {"dense_nn": 0.5, "svm_rbf": 0.60},
    })
    rows = table_cells(render_table1(report))
    assert rows["MFCC Segment"] == ["**0.86\\***", "**0.74**"]
    assert rows["MFCC Frame"] == ["0.80", "0.70"]
    assert "**Traditional**" in rows and "**Autoencoder**" in rows


def test_ties_are_all_marked():
    report = synthetic_report({
        "mfcc-frame": {"dense_nn": 0.861, "svm_rbf": 0.70},
        "lpc-frame": {"dense_nn": 0.859, "svm_rbf": 0.70},
        "ae-big": {"dense_nn": 0.2, "svm_rbf": 0.5},
    })
    rows = table_cells(render_table1(report))
    assert rows["MFCC Frame"] == ["**0.86\\***", "**0.70**"]
    assert rows["LPC Frame"] == ["**0.86\\***", "**0.70**"]


def test_incomplete_grid_cannot_render():
    report = synthetic_report({"mfcc-frame": {"dense_nn": 0.5, "svm_rbf": 0.5},
                               "lpc-frame": {"dense_nn": 0.5, "svm_rbf": 0.5}})
    del report.grid["lpc-frame"]["svm_rbf"]
    with pytest.raises(RenderError, match="lpc-frame:svm_rbf"):
        render_table1(report)


def test_chance_footnote():
    report = synthetic_report({"mfcc-frame": {"dense_nn": 0.5}},
                              classes=[f"p{i}" for i in range(32)] + ["SIL"])
    assert "0.03 (1/33)" in render_table1(report)


def test_rounding_half_up():
    assert str(round_half_up(0.125)) == "0.13"
    assert str(round_half_up(0.845)) == "0.85"
    assert str(round_half_up(0.8449999)) == "0.84"
    assert format_score(None) == "n/a"


def test_table2_top_and_bottom_six(small_inventory):
    classes = [f"p{i}" for i in range(10)] + ["SIL"]
    accs = [0.9, 0.1, 0.5, 0.95, 0.3, 0.7, 0.2, 0.6, 0.8, 0.4, 1.0]
    report = synthetic_report({"mfcc-segment": {"dense_nn": 0.5}}, classes=classes)
    cell = report.cell("mfcc-segment", "dense_nn")
    cell.per_class = dict(zip(classes, accs))
    cell.per_subgroup = {"vowel": 0.5, "consonant": 0.25}
    text = render_table2(report)
    lines = text.splitlines()
    top_at = lines.index("| **Highest Phoneme Performances** |  |")
    low_at = lines.index("| **Lowest Phoneme Performances** |  |")
    top = [line.split("|")[1].strip() for line in lines[top_at + 1:top_at + 7]]
    low = [line.split("|")[1].strip() for line in lines[low_at + 1:low_at + 7]]
    assert top == ["p3", "p0", "p8", "p5", "p7", "p2"]
    assert low == ["p1", "p6", "p4", "p9", "p2", "p7"]
    assert "SIL" not in text
    assert "| All Vowels | 0.50 |" in text
    assert "| Trills | n/a |" in text
    with pytest.raises(RenderError):
        render_table2(report, "mfcc-segment:svm_rbf")
    with pytest.raises(RenderError):
        render_table2(report, "no-colon")
