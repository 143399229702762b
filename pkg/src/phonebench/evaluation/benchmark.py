"""Cross-validated grid of representations by classifiers."""

import json
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..classifiers.registry import ModelSpec, train_classifier
from ..dataset.inventory import SILENCE
from ..dsp.features import FeatureExtractor, RepresentationSpec
from ..exceptions import ConfigError, DataError, FormatError
from .folds import stratified_folds
from .metrics import (accuracy, chance_baseline, confusion_matrix,
                      per_class_accuracy, subgroup_accuracy)
from .scaling import fit_scaler

REPORT_VERSION = 1
MAX_SEED = 2 ** 64


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) \
            or not 0 <= seed < MAX_SEED:
        raise ConfigError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def model_seed(seed, representation, kind, fold):
    """Seed for one model fit, independent of grid order and schedule."""
    key = [seed % 2 ** 32, seed >> 32, zlib.crc32(representation.encode()),
           zlib.crc32(kind.encode()), fold]
    return int(np.random.SeedSequence(key).generate_state(1, np.uint32)[0])


@dataclass
class CellResult:
    fold_accs: list
    confusion: np.ndarray
    per_class: dict
    per_subgroup: dict
    overall_no_silence: object = None

    @property
    def mean(self):
        return float(np.mean(self.fold_accs))

    @property
    def overall(self):
        return accuracy(self.confusion)

    def to_dict(self):
        return {"fold_accs": [float(a) for a in self.fold_accs],
                "mean": self.mean,
                "overall": self.overall,
                "overall_no_silence": self.overall_no_silence,
                "confusion": self.confusion.tolist(),
                "per_class": self.per_class,
                "per_subgroup": self.per_subgroup}

    @classmethod
    def from_dict(cls, d):
        return cls(list(d["fold_accs"]), np.array(d["confusion"], dtype=np.int64),
                   dict(d["per_class"]), dict(d["per_subgroup"]),
                   d.get("overall_no_silence"))


@dataclass
class BenchmarkReport:
    """Per-cell fold accuracies, pooled confusion and breakdowns.

    ``grid[representation][classifier]`` holds a :class:`CellResult`.
    """

    representations: list
    classifiers: list
    classes: list
    k: int
    seed: int
    chance: float
    grid: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    silence_label: object = None

    def cell(self, representation, classifier):
        try:
            return self.grid[representation][classifier]
        except KeyError:
            raise KeyError(f"no result for {representation}:{classifier}") from None

    def missing_cells(self):
        return [(r, c) for r in self.representations for c in self.classifiers
                if c not in self.grid.get(r, {})]

    def means(self):
        """(n_representations, n_classifiers) array of mean accuracies, NaN if missing."""
        out = np.full((len(self.representations), len(self.classifiers)), np.nan)
        for i, r in enumerate(self.representations):
            for j, c in enumerate(self.classifiers):
                if c in self.grid.get(r, {}):
                    out[i, j] = self.grid[r][c].mean
        return out

    def to_dict(self):
        return {
            "version": REPORT_VERSION,
            "seed": self.seed,
            "k": self.k,
            "classes": list(self.classes),
            "chance": self.chance,
            "silence_label": self.silence_label,
            "representations": list(self.representations),
            "classifiers": list(self.classifiers),
            "config": self.config,
            "grid": {r: {c: cell.to_dict() for c, cell in row.items()}
                     for r, row in self.grid.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != REPORT_VERSION:
            raise FormatError(f"unsupported report version {d.get('version')!r}")
        grid = {r: {c: CellResult.from_dict(v) for c, v in row.items()}
                for r, row in d["grid"].items()}
        return cls(d["representations"], d["classifiers"], d["classes"], d["k"],
                   d["seed"], d["chance"], grid, d.get("config", {}),
                   d.get("silence_label"))

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except ValueError as exc:
            raise FormatError(f"not a JSON report: {exc}", path=path) from None
        try:
            return cls.from_dict(data)
        except KeyError as exc:
            raise FormatError(f"report lacks field {exc.args[0]!r}", path=path) from None


def _with_context(exc, representation, kind):
    exc.cell = (representation, kind)
    msg = str(exc)
    exc.args = (f"[{representation}:{kind}] {msg}",)
    return exc


def evaluate_cell(X, y, spec, plan, classes, inventory=None, representation=""):
    """Cross-validate one classifier spec on one feature matrix."""
    y = np.asarray(y)
    X = np.asarray(X, dtype=np.float64)
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    fold_accs = []
    for fold, (train, test) in enumerate(plan.splits()):
        scaler = fit_scaler(X[train])
        fold_spec = replace(spec, seed=model_seed(plan.seed, representation,
                                                  spec.kind, fold))
        model = train_classifier(fold_spec, scaler.apply(X[train]), y[train])
        pred = model.predict(scaler.apply(X[test]))
        fold_cm = confusion_matrix(y[test], pred, classes)
        fold_accs.append(accuracy(fold_cm))
        confusion += fold_cm
    per_subgroup = {}
    no_silence = None
    if inventory is not None:
        per_subgroup = subgroup_accuracy(confusion, inventory, classes)
        keep = [i for i, c in enumerate(classes)
                if c not in inventory.labels_in(SILENCE)]
        sub = confusion[np.ix_(keep, keep)]
        support = confusion[keep].sum()
        no_silence = float(np.trace(sub) / support) if support else None
    return CellResult(fold_accs, confusion, per_class_accuracy(confusion, classes),
                      per_subgroup, no_silence)


def benchmark_features(features, labels, specs, k=5, seed=0, inventory=None,
                       log=None):
    """Run the grid on precomputed features.

    ``features`` maps representation name to an ``(N, d)`` matrix in a
    fixed order; ``specs`` are :class:`ModelSpec` objects or kind names.
    One fold plan is shared by every cell.
    """
    seed = check_seed(seed)
    labels = np.asarray(labels)
    specs = [ModelSpec(s) if isinstance(s, str) else s for s in specs]
    kinds = [s.kind for s in specs]
    if len(set(kinds)) != len(kinds):
        raise ConfigError("each classifier kind may appear only once")
    if inventory is not None:
        classes = list(inventory.labels)
        unknown = sorted(set(labels.tolist()) - set(classes))
        if unknown:
            raise DataError(f"labels outside the inventory: {', '.join(unknown)}")
    else:
        classes = sorted(set(labels.tolist()))
    plan = stratified_folds(labels, k, seed)
    report = BenchmarkReport(list(features), kinds, classes, k, seed,
                             chance_baseline(classes))
    if inventory is not None:
        report.silence_label = inventory.silence_label
    for rep, X in features.items():
        if np.asarray(X).shape[0] != labels.shape[0]:
            raise DataError(f"{rep}: {np.asarray(X).shape[0]} rows for "
                            f"{labels.shape[0]} labels")
        row = report.grid.setdefault(rep, {})
        for spec in specs:
            try:
                row[spec.kind] = evaluate_cell(X, labels, spec, plan, classes,
                                               inventory, rep)
            except Exception as exc:
                raise _with_context(exc, rep, spec.kind)
            if log:
                log(f"{rep}:{spec.kind} mean accuracy {row[spec.kind].mean:.4f}")
    return report


def extract_features(corpus, representations, encoders=None, log=None):
    """Feature matrix per representation name, each computed once."""
    encoders = encoders or {}
    windows = None
    segments = None
    out = {}
    for name in representations:
        rep = RepresentationSpec.from_name(name)
        ext = FeatureExtractor(name, encoder=encoders.get(name),
                               sample_rate=next(iter(corpus.audio.values())).sample_rate)
        ext.fit()
        if rep.mode == "whole-segment":
            if segments is None:
                segments = corpus.segments()
            out[name] = ext.transform(segments)
        else:
            if windows is None:
                windows = corpus.windows()
            out[name] = ext.transform(windows)
        if log:
            log(f"{name}: extracted {out[name].shape[0]}x{out[name].shape[1]} features")
    return out


def run_benchmark(corpus, representations, specs, k=5, seed=0, encoders=None,
                  log=None):
    """Extract each representation once, then cross-validate every classifier."""
    features = extract_features(corpus, representations, encoders, log)
    return benchmark_features(features, corpus.labels, specs, k, seed,
                              corpus.inventory, log)
