"""Phoneme inventory, annotation manifests, WAV audio and a synthetic corpus."""

from .audio import (AudioBuffer, read_wav, resample_linear, slice_full_segment,
                    slice_window, window_length, write_wav)
from .inventory import PhonemeClass, PhonemeInventory
from .manifest import (Annotation, AnnotationSet, Corpus, DatasetStats,
                       load_manifest, write_manifest)
from .synth import (ClassSynth, SynthSpec, class_counts, default_spec,
                    generate_synthetic_dataset, write_synthetic_dataset)

__all__ = [
    "Annotation", "AnnotationSet", "AudioBuffer", "ClassSynth", "Corpus",
    "DatasetStats", "PhonemeClass", "PhonemeInventory", "SynthSpec",
    "class_counts", "default_spec", "generate_synthetic_dataset",
    "load_manifest", "read_wav", "resample_linear", "slice_full_segment",
    "slice_window", "window_length", "write_manifest", "write_wav",
    "write_synthetic_dataset",
]
