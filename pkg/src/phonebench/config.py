"""Benchmark run configuration read from a TOML file.

Example::

    manifest = "data/manifest.tsv"     # paths are relative to this file
    inventory = "data/inventory.tsv"   # optional; default 33-class inventory
    representations = ["mfcc-frame", "mfcc-segment"]   # default: all nine
    classifiers = ["dense_nn", "svm_rbf"]              # default: all eight
    k = 5
    seed = 0
    output_dir = "out"

    [models]                 # optional trained encoders per representation
    ae-small = "models/ae_small.pbnn"

    [autoencoder]            # used to train missing encoders inside the run
    first_width = 256
    lstm_hidden = 16
    epochs = 5

    [classifier_params.dense_nn]
    epochs = 50

The environment variable ``PHONEBENCH_SEED`` overrides ``seed``.
"""

import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .classifiers.registry import KINDS, ModelSpec
from .dsp.features import REPRESENTATIONS
from .evaluation.benchmark import check_seed
from .exceptions import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SEED_ENV = "PHONEBENCH_SEED"

_TOP_KEYS = {"manifest", "inventory", "audio_dir", "representations", "classifiers",
             "k", "seed", "output_dir", "resample", "models", "autoencoder",
             "classifier_params", "external_seed"}


@dataclass(frozen=True)
class AutoencoderSettings:
    """Training settings for encoders built during a run."""

    first_width: int = 2048
    lstm_hidden: int = 2048
    epochs: int = 30
    batch_size: int = 64
    learning_rate: float = 1e-3
    max_segments: int = 20000
    seed: int | None = None  # None: use the run seed

    def __post_init__(self):
        for name in ("first_width", "lstm_hidden", "epochs", "batch_size",
                     "max_segments"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"autoencoder.{name} must be a positive integer")
        if not self.learning_rate > 0:
            raise ConfigError("autoencoder.learning_rate must be positive")
        if self.seed is not None:
            check_seed(self.seed)


@dataclass(frozen=True)
class RunConfig:
    manifest: Path
    output_dir: Path
    inventory: Path = None
    audio_dir: Path = None
    representations: tuple = tuple(REPRESENTATIONS)
    classifiers: tuple = KINDS
    k: int = 5
    seed: int = 0
    resample: bool = False
    models: dict = field(default_factory=dict)
    autoencoder: AutoencoderSettings = field(default_factory=AutoencoderSettings)
    classifier_params: dict = field(default_factory=dict)
    external_seed: int = 0

    def validate(self):
        if not self.manifest.is_file():
            raise ConfigError(f"manifest not found: {self.manifest}")
        for p in (self.inventory,):
            if p is not None and not p.is_file():
                raise ConfigError(f"inventory not found: {p}")
        if self.audio_dir is not None and not self.audio_dir.is_dir():
            raise ConfigError(f"audio directory not found: {self.audio_dir}")
        unknown = [r for r in self.representations if r not in REPRESENTATIONS]
        if unknown:
            raise ConfigError(f"unknown representations: {', '.join(unknown)}")
        unknown = [c for c in self.classifiers if c not in KINDS]
        if unknown:
            raise ConfigError(f"unknown classifiers: {', '.join(unknown)}")
        for seq, what in ((self.representations, "representations"),
                          (self.classifiers, "classifiers")):
            if not seq or len(set(seq)) != len(seq):
                raise ConfigError(f"{what} must be a non-empty list without repeats")
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise ConfigError("k must be an integer >= 2")
        check_seed(self.seed)
        for name, path in self.models.items():
            if name not in REPRESENTATIONS or not REPRESENTATIONS[name].needs_encoder:
                raise ConfigError(f"[models] entry {name!r} is not an encoder representation")
            if not path.is_file():
                raise ConfigError(f"model for {name} not found: {path}")
        for kind in self.classifier_params:
            if kind not in KINDS:
                raise ConfigError(f"[classifier_params] has unknown classifier {kind!r}")
        return self

    def model_specs(self):
        return [ModelSpec(kind, dict(self.classifier_params.get(kind, {})), self.seed)
                for kind in self.classifiers]

    def resolved(self):
        """JSON-able view with absolute paths, as logged and stored in reports."""
        def path(p):
            return None if p is None else str(p)
        return {
            "manifest": path(self.manifest), "inventory": path(self.inventory),
            "audio_dir": path(self.audio_dir), "output_dir": path(self.output_dir),
            "representations": list(self.representations),
            "classifiers": list(self.classifiers), "k": self.k, "seed": self.seed,
            "resample": self.resample,
            "models": {k: str(v) for k, v in sorted(self.models.items())},
            "autoencoder": asdict(self.autoencoder),
            "classifier_params": {k: dict(v) for k, v in sorted(self.classifier_params.items())},
            "external_seed": self.external_seed,
        }


def _seed_from_env(seed):
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return seed
    try:
        return int(raw.strip(), 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


def load_config(path, output_dir=None):
    """Parse, resolve relative paths against the file's directory, and validate."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {', '.join(unknown)}")
    if "manifest" not in raw:
        raise ConfigError(f"{path}: 'manifest' is required")
    base = path.resolve().parent

    def resolve(value):
        return None if value is None else (base / value).resolve()

    try:
        ae = AutoencoderSettings(**raw.get("autoencoder", {}))
    except TypeError as exc:
        raise ConfigError(f"[autoencoder]: {exc}") from None
    params = raw.get("classifier_params", {})
    if not isinstance(params, dict) or not all(isinstance(v, dict) for v in params.values()):
        raise ConfigError("[classifier_params] must hold one table per classifier")
    cfg = RunConfig(
        manifest=resolve(raw["manifest"]),
        output_dir=Path(output_dir).resolve() if output_dir
        else resolve(raw.get("output_dir", "out")),
        inventory=resolve(raw.get("inventory")),
        audio_dir=resolve(raw.get("audio_dir")),
        representations=tuple(raw.get("representations", tuple(REPRESENTATIONS))),
        classifiers=tuple(raw.get("classifiers", KINDS)),
        k=raw.get("k", 5),
        seed=_seed_from_env(raw.get("seed", 0)),
        resample=bool(raw.get("resample", False)),
        models={k: resolve(v) for k, v in raw.get("models", {}).items()},
        autoencoder=ae,
        classifier_params={k: dict(v) for k, v in params.items()},
        external_seed=raw.get("external_seed", 0),
    )
    return cfg.validate()
