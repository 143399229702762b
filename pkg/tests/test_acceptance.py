"""End-to-end acceptance criteria, one test per criterion.

Each test records a ``PASS`` or ``FAIL`` line; the lines are repeated in
the pytest terminal summary. The full benchmark grid runs twice here, so
this module takes several minutes. Run it on its own with::

    pytest tests/test_acceptance.py -v
"""

import json
import re
import time

import numpy as np
import pytest

from oracles import reference_lpc, reference_mfcc, simulate_ar, stable_ar
from phonebench import cli
from phonebench.classifiers import KINDS, ModelSpec, cart_best_split, smo_solve, train_classifier
from phonebench.classifiers.svm import rbf_kernel
from phonebench.dataset import PhonemeInventory
from phonebench.dsp import (REPRESENTATIONS, autocorrelation, extract_segment_level,
                            frame_segments, levinson_durbin, lpc, mfcc, partition_window)
from phonebench.evaluation import (apply_scaler, chance_baseline, evaluate_cell, fit_scaler,
                                   stratified_folds)
from phonebench.evaluation import benchmark as benchmark_module
from phonebench.neural import (LSTM, Dense, DenseAeArch, Dropout, LstmAeArch, ReLU,
                               RepeatVector, Reshape, Tanh, TrainConfig, train_autoencoder)
from phonebench.neural.gradcheck import check_layer

RESULTS = []

# Autoencoder sizes for the synthetic run. The full-width encoders (2048
# units) do not fit the time budget on one CPU; classifiers keep defaults.
BENCH_TOML = """\
manifest = "data/manifest.tsv"
inventory = "data/inventory.tsv"
k = 5
seed = 0
output_dir = "out"

[autoencoder]
first_width = 256
lstm_hidden = 16
epochs = 5
max_segments = 2000
"""


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 ---------------------------------------------------------------------------

def test_criterion_1_mfcc_oracle():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for n in (441, 110):
        for _ in range(20):
            x = rng.uniform(-1, 1, n)
            got, want = mfcc(x), reference_mfcc(x)
            worst = max(worst, float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-12))))
    elapsed = time.perf_counter() - start
    record(1, "MFCC equals the direct-DFT reference", worst < 1e-6 and elapsed < 5,
           f"max rel err {worst:.2e}, {elapsed:.2f} s")


# 2 ---------------------------------------------------------------------------

def test_criterion_2_lpc_recovery():
    rng = np.random.default_rng(2)
    recovery = 0.0
    for _ in range(5):
        a = stable_ar(rng)
        x = simulate_ar(a, 44100, rng)
        recovery = max(recovery, float(np.max(np.abs(lpc(x) - a))))
    toeplitz = 0.0
    for _ in range(20):
        x = rng.normal(size=441)
        a, _, _ = levinson_durbin(autocorrelation(x, 8))
        toeplitz = max(toeplitz, float(np.max(np.abs(a - reference_lpc(x)))))
    record(2, "AR(8) recovery and Levinson-Durbin vs Toeplitz",
           recovery <= 0.05 and toeplitz <= 1e-8,
           f"max coef err {recovery:.4f}, max solver diff {toeplitz:.1e}")


# 3 ---------------------------------------------------------------------------

def test_criterion_3_geometry():
    rng = np.random.default_rng(3)
    w = rng.uniform(-1, 1, 1102)
    frames = partition_window(w)
    offsets_ok = all(np.array_equal(frames[i], w[o:o + 441])
                     for i, o in enumerate((0, 220, 440, 660)))
    segs = frame_segments(frames)
    worst = 0.0
    for name, fn in (("mfcc-segment", mfcc), ("lpc-segment", lpc)):
        fast = extract_segment_level(w, REPRESENTATIONS[name])
        naive = np.concatenate([
            np.mean([fn(w[o + s:o + s + 110]) for s in range(332)], axis=0)
            for o in (0, 220, 440, 660)])
        worst = max(worst, float(np.max(np.abs(fast - naive))))
    ok = frames.shape == (4, 441) and offsets_ok and segs.shape == (4, 332, 110) and worst <= 1e-9
    record(3, "window geometry and segment averaging", ok,
           f"frames {frames.shape}, segments {segs.shape[:2]}, naive diff {worst:.1e}")


# 4 ---------------------------------------------------------------------------

def test_criterion_4_gradient_checks():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst = {}
    for _ in range(10):
        b, t, i, o = (int(v) for v in rng.integers(1, 6, 4))
        cases = {
            "Dense": (Dense(i, o, rng=rng), rng.normal(size=(b, i)), True),
            "Tanh": (Tanh(), rng.normal(size=(b, i)), True),
            "ReLU": (ReLU(), rng.choice([-1, 1], (b, i)) * rng.uniform(0.1, 2, (b, i)), True),
            "Dropout": (Dropout(0.3, rng), rng.normal(size=(b, i)), False),
            "LSTM(last)": (LSTM(i, o, False, rng=rng), rng.normal(size=(b, t, i)), True),
            "LSTM(seq)": (LSTM(i, o, True, rng=rng), rng.normal(size=(b, t, i)), True),
            "Reshape": (Reshape((t, i)), rng.normal(size=(b, t * i)), True),
            "RepeatVector": (RepeatVector(t), rng.normal(size=(b, i)), True),
        }
        for name, (layer, x, training) in cases.items():
            err = check_layer(layer, x, rng, training=training)
            worst[name] = max(worst.get(name, 0.0), err)
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    record(4, "finite-difference gradient checks, 10 shapes per layer type",
           top < 1e-4 and elapsed < 60, f"worst rel err {top:.1e}, {elapsed:.1f} s")


# 5 ---------------------------------------------------------------------------

def test_criterion_5_autoencoder_sanity():
    rng = np.random.default_rng(5)
    t = np.arange(110)
    segments = 0.5 * np.sin(2 * np.pi * rng.uniform(200, 4000, (200, 1)) * t / 44100
                            + rng.uniform(0, 2 * np.pi, (200, 1)))
    cfg = TrainConfig(epochs=5, batch_size=32, seed=0)
    dense, _ = train_autoencoder(segments, DenseAeArch(bottleneck=8, first_width=64), cfg)
    lstm, _ = train_autoencoder(segments, LstmAeArch(bottleneck=8, hidden=16), cfg)
    decreased = all(e.loss_curve[-1] < e.loss_curve[0] for e in (dense, lstm))
    widths = [DenseAeArch(bottleneck=8).encoder_widths[-1],
              DenseAeArch(bottleneck=16).encoder_widths[-1]]
    halving = all(a == 2 * b for a, b in zip(DenseAeArch(8).encoder_widths,
                                              DenseAeArch(8).encoder_widths[1:]))
    window = rng.uniform(-0.5, 0.5, 1102)
    big, _ = train_autoencoder(segments[:32], DenseAeArch(bottleneck=16, first_width=32),
                               TrainConfig(epochs=1))
    dims = [extract_segment_level(window, per_segment_fn=e.encode_batch).shape[0]
            for e in (dense, big, lstm)]
    expected = [REPRESENTATIONS[r].dim for r in ("ae-small", "ae-big", "lstm-ae-small")]
    dims_ok = dims == expected == [32, 64, 32]
    ok = decreased and widths == [8, 16] and halving and dims_ok
    record(5, "autoencoders train and expose 8/16-wide bottlenecks", ok,
           f"dense MSE {dense.loss_curve[0]:.4f}->{dense.loss_curve[-1]:.4f}, "
           f"LSTM MSE {lstm.loss_curve[0]:.4f}->{lstm.loss_curve[-1]:.4f}, "
           f"segment dims {dims}")


# 6 ---------------------------------------------------------------------------

def brute_force_split(X, y):
    classes = np.unique(y)

    def gini(labels):
        if labels.size == 0:
            return 0.0
        p = np.array([np.mean(labels == c) for c in classes])
        return 1.0 - np.sum(p * p)

    parent, best = gini(y), None
    for f in range(X.shape[1]):
        values = np.unique(X[:, f])
        for lo, hi in zip(values[:-1], values[1:]):
            thr = (lo + hi) / 2
            left, right = y[X[:, f] <= thr], y[X[:, f] > thr]
            gain = parent - (left.size * gini(left) + right.size * gini(right)) / y.size
            if best is None or gain > best[2] + 1e-12:
                best = (f, thr, gain)
    return best


def test_criterion_6_classifier_sanity():
    rng = np.random.default_rng(6)
    # two isotropic Gaussians; a large held-out set keeps one miss from deciding
    X = np.vstack([rng.normal(-3.0, 1.0, (600, 2)), rng.normal(3.0, 1.0, (600, 2))])
    y = np.repeat(["left", "right"], 600)
    separable = bool(np.all((X.sum(axis=1) > 0) == (y == "right")))
    order = rng.permutation(1200)
    train, test = order[:200], order[200:]
    scores = {kind: float(np.mean(train_classifier(ModelSpec(kind), X[train], y[train])
                                  .predict(X[test]) == y[test]))
              for kind in KINDS}
    xor = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    yx = np.array([1.0, 1.0, -1.0, -1.0])
    K = rbf_kernel(xor, xor, 1.0)
    alpha, b, _ = smo_solve(K, yx, C=1.0)
    xor_ok = np.array_equal(np.sign(K @ (alpha * yx) + b), yx)
    balance = abs(float(alpha @ yx))
    cart_ok = 0
    for _ in range(50):
        Xs = rng.integers(0, 5, (int(rng.integers(4, 15)), 3)).astype(float)
        ys = rng.integers(0, 3, Xs.shape[0])
        got, want = cart_best_split(Xs, ys), brute_force_split(Xs, ys)
        cart_ok += (got is None and want is None) or (
            got is not None and want is not None and got[0] == want[0]
            and abs(got[1] - want[1]) < 1e-12 and abs(got[2] - want[2]) < 1e-12)
    worst = min(scores, key=scores.get)
    ok = separable and min(scores.values()) >= 0.99 and xor_ok and balance <= 1e-8 and cart_ok == 50
    record(6, "classifier sanity", ok,
           f"lowest held-out acc {scores[worst]:.3f} ({worst}), XOR ok {xor_ok}, "
           f"sum alpha*y {balance:.1e}, CART {cart_ok}/50")


# 7 ---------------------------------------------------------------------------

def test_criterion_7_protocol(monkeypatch):
    rng = np.random.default_rng(7)
    labels = np.repeat(np.arange(6), [23, 17, 40, 9, 31, 12])
    plan = stratified_folds(labels, k=5, seed=7)
    spread = max(int(np.ptp(np.bincount(plan.assignment[labels == c], minlength=5)))
                 for c in range(6))

    X = rng.normal(size=(labels.size, 4))
    seen = []

    def recording(rows):
        seen.append(np.array(rows))
        return fit_scaler(rows)

    monkeypatch.setattr(benchmark_module, "fit_scaler", recording)
    evaluate_cell(X, labels, ModelSpec("decision_tree"), plan, list(range(6)))
    leak_free = all(np.array_equal(rows, X[train])
                    for rows, (train, _) in zip(seen, plan.splits()))
    scaler = fit_scaler(X[plan.train_indices(0)])
    shifted = apply_scaler(scaler, X[plan.train_indices(0)] + scaler.std)
    leak_free = leak_free and np.allclose(shifted.mean(axis=0), 1.0)

    chance = chance_baseline(PhonemeInventory.default().labels)
    ok = spread <= 1 and leak_free and abs(chance - 1 / 33) < 1e-15 and round(chance, 4) == 0.0303
    record(7, "stratified folds, leakage-free scaling, 1/33 chance", ok,
           f"max per-class fold spread {spread}, scaler on train rows only {leak_free}, "
           f"chance {chance:.4f}")


# 8 and 9 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def synthetic_run(tmp_path_factory):
    work = tmp_path_factory.mktemp("acceptance")
    assert cli.main(["-q", "dataset", "synth", "--spec", "four-class", "--seed", "0",
                     "--out", str(work / "data")]) == 0
    config = work / "run.toml"
    config.write_text(BENCH_TOML)
    start = time.perf_counter()
    code = cli.main(["-q", "bench", "--config", str(config)])
    elapsed = time.perf_counter() - start
    return work, config, code, elapsed


def parse_table1(text):
    rows = []
    for line in text.splitlines():
        if not line.startswith("| ") or line.startswith("| ---") or line.startswith("| Repr"):
            continue
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if cells[0].startswith("**"):
            continue
        rows.append(cells[1:])
    return rows


def test_criterion_8_synthetic_benchmark(synthetic_run):
    work, _, code, elapsed = synthetic_run
    out = work / "out"
    report = json.loads((out / "report.json").read_text())
    n_labels = len(report["classes"])
    cell = report["grid"]["mfcc-segment"]["dense_nn"]
    rows = parse_table1((out / "table1.md").read_text())
    cells = [c for row in rows for c in row]
    numbers = [[float(re.sub(r"[*\\]", "", c)) for c in row] for row in rows]
    columns = list(zip(*rows))
    bolded = all(any(c.startswith("**") for c in col) for col in columns)
    best = max(max(r) for r in numbers)
    starred = [float(re.sub(r"[*\\]", "", c)) for c in cells if "\\*" in c]
    star_ok = bool(starred) and all(v == best for v in starred)
    n_cells = sum(len(r) for r in report["grid"].values())
    ok = (code == 0 and cell["mean"] >= 0.90 and report["chance"] == 0.25 and n_labels == 4
          and elapsed < 15 * 60 and n_cells == 72 and len(cells) == 72 and bolded and star_ok)
    record(8, "synthetic 4-class benchmark", ok,
           f"Dense NN on MFCC segment {cell['mean']:.4f} vs chance {report['chance']:.2f}, "
           f"{n_cells} cells, grid time {elapsed / 60:.1f} min, "
           f"column bests bolded {bolded}, global star {star_ok}")


def test_criterion_9_determinism(synthetic_run):
    work, config, _, _ = synthetic_run
    first = (work / "out" / "report.json").read_bytes()
    code = cli.main(["-q", "bench", "--config", str(config)])
    second = (work / "out" / "report.json").read_bytes()
    record(9, "bench twice gives byte-identical JSON", code == 0 and first == second,
           f"{len(first)} bytes, identical {first == second}")
