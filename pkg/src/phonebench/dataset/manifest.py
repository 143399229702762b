"""Annotation manifests: time-aligned phoneme labels over audio files."""

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import InventoryError, ParseError, RangeError
from .audio import read_wav, slice_full_segment, slice_window
from .inventory import CONSONANT, SILENCE, VOWEL, PhonemeInventory

MANIFEST_HEADER = ("audio_id", "start_s", "end_s", "label")


@dataclass(frozen=True, order=True)
class Annotation:
    audio_id: str
    start: float
    end: float
    label: str = field(compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise RangeError("annotation times must be finite")
        if self.start < 0:
            raise RangeError(f"start {self.start} is negative")
        if self.end <= self.start:
            raise RangeError(f"end {self.end} is not after start {self.start}")

    @property
    def duration(self):
        return self.end - self.start


@dataclass(frozen=True)
class DatasetStats:
    """Class counts plus category and subgroup fractions.

    Fractions are shares of annotation counts. All fractions are 0 for an
    empty set.
    """
    counts: dict
    category_fractions: dict
    subgroup_fractions: dict

    @classmethod
    def from_labels(cls, labels, inventory):
        tally = Counter(labels)
        counts = {label: tally.get(label, 0) for label in inventory.labels}
        total = sum(counts.values())

        def share(n):
            return n / total if total else 0.0

        category_fractions = {
            cat: share(sum(counts[c.label] for c in inventory if c.category == cat))
            for cat in (VOWEL, CONSONANT, SILENCE)
        }
        subgroup_fractions = {
            f"{cat}/{sub}": share(sum(counts[lab] for lab in inventory.labels_in(cat, sub)))
            for cat, sub in inventory.subgroups()
        }
        subgroup_fractions[SILENCE] = category_fractions[SILENCE]
        return cls(counts, category_fractions, subgroup_fractions)

    @property
    def total(self):
        return sum(self.counts.values())

    def format(self):
        lines = [f"annotations: {self.total}",
                 f"classes: {len(self.counts)} "
                 f"({sum(1 for n in self.counts.values() if n)} present)"]
        lines += [f"  {label}\t{n}" for label, n in self.counts.items()]
        lines.append("categories:")
        lines += [f"  {k}\t{v:.4f}" for k, v in self.category_fractions.items()]
        lines.append("subgroups:")
        lines += [f"  {k}\t{v:.4f}" for k, v in self.subgroup_fractions.items()]
        return "\n".join(lines)


class AnnotationSet:
    """Annotations sorted by (audio_id, start), tied to an inventory."""

    def __init__(self, annotations, inventory):
        self.inventory = inventory
        for ann in annotations:
            if ann.label not in inventory:
                raise InventoryError(f"unknown label {ann.label!r}")
        self.annotations = sorted(annotations, key=lambda a: (a.audio_id, a.start))
        self.stats = DatasetStats.from_labels(self.labels, inventory)

    @property
    def labels(self):
        return [a.label for a in self.annotations]

    @property
    def audio_ids(self):
        return sorted({a.audio_id for a in self.annotations})

    def __len__(self):
        return len(self.annotations)

    def __iter__(self):
        return iter(self.annotations)

    def __getitem__(self, i):
        return self.annotations[i]

    def __eq__(self, other):
        return (isinstance(other, AnnotationSet)
                and self.inventory == other.inventory
                and [(a, a.label) for a in self] == [(a, a.label) for a in other])


def load_manifest(path, inventory=None):
    """Parse a manifest TSV with header ``audio_id start_s end_s label``."""
    path = Path(path)
    inventory = inventory or PhonemeInventory.default()
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = iter(enumerate(fh, start=1))
        for lineno, raw in lines:
            if raw.strip():
                header = tuple(f.strip() for f in raw.rstrip("\r\n").split("\t"))
                if header != MANIFEST_HEADER:
                    raise ParseError(
                        "expected header 'audio_id<TAB>start_s<TAB>end_s<TAB>label'",
                        line=lineno, path=path)
                break
        else:
            raise ParseError("missing header", path=path)
        for lineno, raw in lines:
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ParseError(
                    f"expected 4 tab-separated fields, got {len(fields)}",
                    line=lineno, path=path)
            audio_id, start_s, end_s, label = (f.strip() for f in fields)
            try:
                start, end = float(start_s), float(end_s)
            except ValueError:
                raise ParseError(
                    f"bad time value in {start_s!r}/{end_s!r}",
                    line=lineno, path=path) from None
            if label not in inventory:
                raise InventoryError(
                    f"unknown label {label!r}", line=lineno, path=path)
            try:
                rows.append(Annotation(audio_id, start, end, label))
            except RangeError as exc:
                raise RangeError(f"{path}:line {lineno}: {exc}") from None
    return AnnotationSet(rows, inventory)


def write_manifest(path, annotations):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(MANIFEST_HEADER) + "\n")
        for a in annotations:
            fh.write(f"{a.audio_id}\t{a.start!r}\t{a.end!r}\t{a.label}\n")


class Corpus:
    """Annotations plus the audio they point at.

    Audio for ``audio_id`` is read from ``<audio_dir>/<audio_id>.wav``;
    ``audio_dir`` defaults to the manifest's directory.
    """

    def __init__(self, annotations, audio):
        missing = sorted(set(annotations.audio_ids) - set(audio))
        if missing:
            raise ParseError(f"no audio for ids: {', '.join(missing)}")
        self.annotations = annotations
        self.audio = dict(audio)

    @classmethod
    def load(cls, manifest, inventory=None, audio_dir=None, resample=False):
        manifest = Path(manifest)
        if isinstance(inventory, (str, Path)):
            inventory = PhonemeInventory.from_tsv(inventory)
        annotations = load_manifest(manifest, inventory)
        audio_dir = Path(audio_dir) if audio_dir else manifest.parent
        audio = {}
        for audio_id in annotations.audio_ids:
            wav = audio_dir / f"{audio_id}.wav"
            if not wav.exists():
                raise ParseError(f"audio file not found: {wav}")
            audio[audio_id] = read_wav(wav, resample=resample)
        return cls(annotations, audio)

    @property
    def inventory(self):
        return self.annotations.inventory

    @property
    def labels(self):
        return self.annotations.labels

    def __len__(self):
        return len(self.annotations)

    def windows(self, window_ms=25.0):
        """(N, window) array of phoneme-onset windows."""
        return np.stack([slice_window(self.audio[a.audio_id], a, window_ms)
                         for a in self.annotations])

    def segments(self):
        """Full phoneme segments, one array per annotation."""
        return [slice_full_segment(self.audio[a.audio_id], a)
                for a in self.annotations]
