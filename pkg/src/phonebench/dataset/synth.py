"""Synthetic formant/noise corpus used as a stand-in for field recordings.

Vowel-like classes are mixtures of 2-3 sinusoids at formant frequencies with
a glottal-rate amplitude modulation, fricatives are band-passed noise and
plosives are a short closure followed by a noise burst. Every instance
jitters its class parameters so that classes overlap a little.
"""

import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import signal

from ..exceptions import SpecError
from .audio import PCM_SCALE, REFERENCE_RATE, AudioBuffer, to_pcm16, write_wav
from .inventory import (CONSONANT, SILENCE, VOWEL, PhonemeClass,
                        PhonemeInventory)
from .manifest import Annotation, AnnotationSet, write_manifest

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SPEC_VERSION = 1

KINDS = ("vowel", "approximant", "nasal", "trill", "fricative", "plosive",
         "affricate", "silence")

# Default synthesis kind per subgroup.
SUBGROUP_KIND = {
    "rounded": "vowel", "unrounded": "vowel", "affricate": "affricate",
    "approximant": "approximant", "fricative": "fricative", "nasal": "nasal",
    "plosive": "plosive", "trill": "trill", None: "silence",
}

# Share of annotations per subgroup in the reference corpus. The consonant
# subgroups add up to 48% while consonants as a whole are 47%; they are
# rescaled to 47% in default_spec().
SUBGROUP_SHARE = {
    "rounded": 0.08, "unrounded": 0.31,
    "affricate": 0.02, "approximant": 0.08, "fricative": 0.08, "nasal": 0.07,
    "plosive": 0.17, "trill": 0.06,
}
CATEGORY_SHARE = {VOWEL: 0.39, CONSONANT: 0.47, SILENCE: 0.14}

# label -> synthesis parameters for the shipped inventory
_DEFAULT_PARAMS = {
    "i": {"formants": [280, 2250, 2900]},
    "e": {"formants": [400, 2000, 2600]},
    "ɛ": {"formants": [550, 1800, 2500]},
    "a": {"formants": [750, 1300, 2500]},
    "ə": {"formants": [500, 1500, 2500]},
    "ɐ": {"formants": [650, 1200, 2400]},
    "ɪ": {"formants": [390, 1900, 2550]},
    "æ": {"formants": [680, 1700, 2450]},
    "œ": {"formants": [500, 1450, 2300]},
    "u": {"formants": [320, 800, 2250]},
    "tʃ": {"band": [1800, 5000]},
    "j": {"formants": [260, 2100, 3000]},
    "w": {"formants": [300, 650, 2200]},
    "l": {"formants": [360, 1300, 2700]},
    "ʎ": {"formants": [300, 1800, 2800]},
    "ʃ": {"band": [2000, 5000]},
    "s": {"band": [4500, 10000]},
    "z": {"band": [4000, 9000], "voicing": 0.3},
    "m": {"formants": [250, 1100]},
    "ŋ": {"formants": [250, 2300]},
    "ɱ": {"formants": [250, 1500]},
    "p": {"band": [500, 1500]},
    "b": {"band": [400, 1200], "voicing": 0.3},
    "t": {"band": [3000, 6000]},
    "d": {"band": [2800, 5500], "voicing": 0.3},
    "k": {"band": [1500, 3000]},
    "g": {"band": [1400, 2800], "voicing": 0.3},
    "c": {"band": [2200, 4000]},
    "ɟ": {"band": [2000, 3800], "voicing": 0.3},
    "r": {"formants": [450, 1300, 2500], "rate": 25.0},
    "ʀ": {"formants": [550, 1100, 2200], "rate": 30.0},
    "ʙ": {"formants": [300, 900, 2200], "rate": 20.0},
}

# (min, max) instance duration in milliseconds
_DURATION_MS = {
    "vowel": (60, 140), "approximant": (45, 100), "nasal": (45, 100),
    "trill": (50, 110), "fricative": (50, 120), "plosive": (35, 70),
    "affricate": (50, 100), "silence": (40, 160),
}


@dataclass
class ClassSynth:
    label: str
    category: str
    subgroup: str | None
    proportion: float
    kind: str = "vowel"
    formants: list = field(default_factory=list)
    band: list = field(default_factory=list)
    voicing: float = 0.0
    rate: float = 0.0
    amplitude: float = 0.6


@dataclass
class SynthSpec:
    classes: list
    n: int = 2520
    sample_rate: int = REFERENCE_RATE
    phonemes_per_file: int = 40
    version: int = SPEC_VERSION

    def validate(self):
        if self.version != SPEC_VERSION:
            raise SpecError(f"unsupported synth spec version {self.version}")
        if self.n < 1:
            raise SpecError("n must be positive")
        if self.phonemes_per_file < 1:
            raise SpecError("phonemes_per_file must be positive")
        if not self.classes:
            raise SpecError("synth spec names no classes")
        total = math.fsum(c.proportion for c in self.classes)
        if abs(total - 1.0) > 1e-9:
            raise SpecError(f"class proportions sum to {total!r}, not 1")
        for c in self.classes:
            if c.proportion < 0:
                raise SpecError(f"{c.label}: negative proportion")
            if c.kind not in KINDS:
                raise SpecError(f"{c.label}: unknown kind {c.kind!r}")
            if c.kind in ("vowel", "approximant", "nasal", "trill") and len(c.formants) < 2:
                raise SpecError(f"{c.label}: kind {c.kind} needs >= 2 formants")
            if c.kind in ("fricative", "plosive", "affricate") and len(c.band) != 2:
                raise SpecError(f"{c.label}: kind {c.kind} needs a [lo, hi] band")
        self.inventory()
        return self

    def inventory(self):
        try:
            return PhonemeInventory(
                PhonemeClass(c.label, c.category, c.subgroup) for c in self.classes)
        except ValueError as exc:
            raise SpecError(str(exc)) from None

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        raw_classes = data.pop("class", None) or data.pop("classes", None)
        if not raw_classes:
            raise SpecError("synth spec has no [[class]] tables")
        known = {f for f in ClassSynth.__dataclass_fields__}
        classes = []
        for entry in raw_classes:
            unknown = set(entry) - known
            if unknown:
                raise SpecError(f"unknown class keys: {', '.join(sorted(unknown))}")
            entry = dict(entry)
            entry.setdefault("subgroup", None)
            if entry["subgroup"] in ("", "-"):
                entry["subgroup"] = None
            if "kind" not in entry:
                entry["kind"] = SUBGROUP_KIND.get(entry["subgroup"], "vowel")
            try:
                classes.append(ClassSynth(**entry))
            except TypeError as exc:
                raise SpecError(f"bad class entry: {exc}") from None
        unknown = set(data) - {"n", "sample_rate", "phonemes_per_file", "version"}
        if unknown:
            raise SpecError(f"unknown spec keys: {', '.join(sorted(unknown))}")
        return cls(classes=classes, **data).validate()

    @classmethod
    def load(cls, path):
        """Read a TOML synth spec file, or a built-in one by name."""
        if str(path) in BUILTIN_SPECS:
            if path == "default":
                return default_spec()
            ref = resources.files("phonebench.dataset") / "data" / BUILTIN_SPECS[path]
            return cls.from_dict(tomllib.loads(ref.read_text(encoding="utf-8")))
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise SpecError(f"{path}: {exc}") from None
        return cls.from_dict(data)

    def dump(self, path):
        lines = [f"version = {self.version}", f"n = {self.n}",
                 f"sample_rate = {self.sample_rate}",
                 f"phonemes_per_file = {self.phonemes_per_file}"]
        for c in self.classes:
            lines += ["", "[[class]]", f'label = "{c.label}"',
                      f'category = "{c.category}"',
                      f'subgroup = "{c.subgroup or "-"}"',
                      f'kind = "{c.kind}"', f"proportion = {c.proportion!r}",
                      f"amplitude = {c.amplitude!r}"]
            if c.formants:
                lines.append(f"formants = {[float(f) for f in c.formants]!r}")
            if c.band:
                lines.append(f"band = {[float(f) for f in c.band]!r}")
            if c.voicing:
                lines.append(f"voicing = {c.voicing!r}")
            if c.rate:
                lines.append(f"rate = {c.rate!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


BUILTIN_SPECS = {"default": None, "four-class": "synth_four_class.toml"}


def default_spec(n=2520, inventory=None):
    """Spec over the default inventory matching the reference class shares."""
    inventory = inventory or PhonemeInventory.default()
    consonant_total = sum(SUBGROUP_SHARE[s] for s in
                          ("affricate", "approximant", "fricative", "nasal",
                           "plosive", "trill"))
    classes = []
    for c in inventory:
        if c.category == SILENCE:
            share = CATEGORY_SHARE[SILENCE]
        else:
            share = SUBGROUP_SHARE[c.subgroup]
            if c.category == CONSONANT:
                share *= CATEGORY_SHARE[CONSONANT] / consonant_total
            share /= len(inventory.labels_in(c.category, c.subgroup))
        kind = SUBGROUP_KIND[c.subgroup]
        params = _DEFAULT_PARAMS.get(c.label, {})
        if kind != "silence" and not params:
            raise SpecError(f"no default synthesis parameters for {c.label!r}")
        classes.append(ClassSynth(c.label, c.category, c.subgroup, share,
                                  kind=kind, **params))
    # fix rounding so the shares sum to exactly 1
    drift = 1.0 - math.fsum(c.proportion for c in classes)
    classes[-1].proportion += drift
    return SynthSpec(classes=classes, n=n).validate()


def apportion(quotas, total):
    """Integer counts summing to ``total``, each the floor or ceiling of its quota.

    Largest remainders get the extra units; ties go to the lowest index.
    """
    quotas = [float(q) for q in quotas]
    counts = [math.floor(q + 1e-9) for q in quotas]
    short = total - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    if short < 0 or short > len(quotas):
        raise SpecError(f"cannot apportion {total} over quotas summing to {sum(quotas)}")
    for i in order[:short]:
        counts[i] += 1
    return counts


def class_counts(spec):
    """Per-class instance counts, apportioned category -> subgroup -> class.

    Each level stays within one instance of its exact share.
    """
    n = spec.n
    quota = {c.label: c.proportion * n for c in spec.classes}

    def split(groups, total):
        keys = list(groups)
        sizes = apportion([math.fsum(quota[l] for l in groups[k]) for k in keys], total)
        return dict(zip(keys, sizes))

    counts = {}
    by_cat = {}
    for c in spec.classes:
        by_cat.setdefault(c.category, []).append(c)
    cat_sizes = split({k: [c.label for c in v] for k, v in by_cat.items()}, n)
    for cat, members in by_cat.items():
        by_sub = {}
        for c in members:
            by_sub.setdefault(c.subgroup, []).append(c.label)
        sub_sizes = split(by_sub, cat_sizes[cat])
        for sub, labels in by_sub.items():
            sizes = apportion([quota[l] for l in labels], sub_sizes[sub])
            counts.update(zip(labels, sizes))
    return {c.label: counts[c.label] for c in spec.classes}


def _ramp(x, sr, ms=2.0):
    n = min(len(x) // 2, int(sr * ms / 1000))
    if n:
        env = np.linspace(0.0, 1.0, n)
        x[:n] *= env
        x[-n:] *= env[::-1]
    return x


def _band_noise(rng, n, band, sr):
    lo, hi = band
    nyq = sr / 2.0
    hi = min(hi, 0.95 * nyq)
    sos = signal.butter(4, [lo / nyq, hi / nyq], btype="band", output="sos")
    noise = signal.sosfilt(sos, rng.standard_normal(n + 256))[256:]
    peak = np.max(np.abs(noise)) or 1.0
    return noise / peak


def _formant_mix(rng, n, formants, sr):
    t = np.arange(n) / sr
    f0 = rng.uniform(100.0, 220.0)
    weights = [1.0, 0.6, 0.35, 0.2][:len(formants)]
    x = np.zeros(n)
    for w, f in zip(weights, formants):
        f = f * rng.uniform(0.96, 1.04)
        x += w * rng.uniform(0.8, 1.2) * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
    # glottal-rate amplitude modulation
    x *= 1.0 + 0.4 * np.sin(2 * np.pi * f0 * t + rng.uniform(0, 2 * np.pi))
    return x / (np.max(np.abs(x)) or 1.0)


def synthesize_instance(cls, rng, sr):
    """One instance of class ``cls`` as float samples."""
    lo, hi = _DURATION_MS[cls.kind]
    n = int(rng.uniform(lo, hi) * sr / 1000)
    amp = cls.amplitude * rng.uniform(0.6, 1.0)
    kind = cls.kind
    if kind == "silence":
        return rng.normal(0.0, 0.002, n)
    if kind in ("vowel", "approximant", "nasal", "trill"):
        x = _formant_mix(rng, n, cls.formants, sr)
        if kind == "approximant":
            amp *= 0.6
        elif kind == "nasal":
            amp *= 0.45
        elif kind == "trill":
            rate = (cls.rate or 25.0) * rng.uniform(0.9, 1.1)
            t = np.arange(n) / sr
            x *= 0.3 + 0.7 * np.sin(np.pi * rate * t + rng.uniform(0, np.pi)) ** 2
    elif kind == "fricative":
        x = _band_noise(rng, n, cls.band, sr) * 0.7
    else:
        # closure then burst (plosive) or frication (affricate)
        closure = int(rng.uniform(8, 15) * sr / 1000)
        body = n - closure
        x = np.zeros(n)
        burst = _band_noise(rng, body, cls.band, sr)
        if kind == "plosive":
            burst *= np.exp(-np.arange(body) / (rng.uniform(6, 12) * sr / 1000))
        x[closure:] = burst * 0.8
        x[:closure] = rng.normal(0.0, 0.002, closure)
    if cls.voicing:
        t = np.arange(n) / sr
        x += cls.voicing * np.sin(2 * np.pi * rng.uniform(110, 160) * t)
    x = x * amp + rng.normal(0.0, 0.003, n)
    return _ramp(x, sr)


def generate_synthetic_dataset(spec, seed):
    """Render ``spec`` into (audio dict, AnnotationSet).

    Audio is quantized to the 16-bit PCM grid so the buffers equal what
    :func:`write_synthetic_dataset` stores on disk.
    """
    spec.validate()
    rng = np.random.default_rng(seed)
    sr = spec.sample_rate
    by_label = {c.label: c for c in spec.classes}
    counts = class_counts(spec)
    sequence = [label for label, k in counts.items() for _ in range(k)]
    sequence = [sequence[i] for i in rng.permutation(len(sequence))]
    lead = int(0.02 * sr)
    audio, annotations = {}, []
    n_files = math.ceil(len(sequence) / spec.phonemes_per_file)
    width = max(3, len(str(n_files - 1)))
    for f in range(n_files):
        audio_id = f"synth{f:0{width}d}"
        chunk = sequence[f * spec.phonemes_per_file:(f + 1) * spec.phonemes_per_file]
        pieces = [rng.normal(0.0, 0.002, lead)]
        pos = lead
        for label in chunk:
            x = synthesize_instance(by_label[label], rng, sr)
            annotations.append(Annotation(audio_id, pos / sr, (pos + len(x)) / sr, label))
            pieces.append(x)
            pos += len(x)
        pieces.append(rng.normal(0.0, 0.002, int(0.04 * sr)))
        samples = np.clip(np.concatenate(pieces), -1.0, 32767 / PCM_SCALE)
        audio[audio_id] = AudioBuffer(to_pcm16(samples) / PCM_SCALE, sr, source=audio_id)
    return audio, AnnotationSet(annotations, spec.inventory())


def write_synthetic_dataset(out_dir, audio, annotations):
    """Write WAVs, ``manifest.tsv`` and ``inventory.tsv`` under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for audio_id, buf in audio.items():
        write_wav(out_dir / f"{audio_id}.wav", buf)
    write_manifest(out_dir / "manifest.tsv", annotations)
    annotations.inventory.to_tsv(out_dir / "inventory.tsv")
    return out_dir / "manifest.tsv"


def with_n(spec, n):
    return replace(spec, n=int(n)).validate()
