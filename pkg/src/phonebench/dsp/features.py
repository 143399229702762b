"""Frame-level and segment-level window representations."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_fitted
from ..exceptions import ConfigError, GeometryError, SpecError
from .geometry import (N_FRAMES, REFERENCE_RATE, frame_segments,
                       partition_window, segment_length)
from .lpc import LpcConfig, lpc_batch
from .mfcc import MfccConfig, mfcc_batch

ALGOS = ("mfcc", "lpc", "bottleneck", "external")
MODES = ("frame", "segment", "whole-segment")


@dataclass(frozen=True)
class RepresentationSpec:
    """How a labelled phoneme becomes a feature vector.

    ``frame`` and ``segment`` modes operate on the 25 ms onset window and
    concatenate four per-frame vectors; ``whole-segment`` encodes the full
    phoneme with an external chunk encoder.
    """
    algo: str
    mode: str
    encoder: str | None = None
    encoder_dim: int | None = None
    name: str | None = None
    group: str = "traditional"
    title: str | None = None

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise SpecError(f"unknown algorithm {self.algo!r}")
        if self.mode not in MODES:
            raise SpecError(f"unknown mode {self.mode!r}")
        if self.algo in ("mfcc", "lpc") and self.mode == "whole-segment":
            raise SpecError(f"{self.algo} supports frame and segment modes only")
        if self.algo == "bottleneck" and self.mode != "segment":
            raise SpecError("bottleneck features are extracted per segment")
        if self.algo == "external" and self.mode != "whole-segment":
            raise SpecError("external encoders operate on whole segments")
        if self.algo in ("bottleneck", "external") and not self.encoder_dim:
            raise SpecError(f"{self.algo} representations need encoder_dim")

    @property
    def per_frame_dim(self):
        return {"mfcc": MfccConfig().n_coeffs, "lpc": LpcConfig().order}.get(
            self.algo, self.encoder_dim)

    @property
    def dim(self):
        if self.mode == "whole-segment":
            return self.encoder_dim
        return N_FRAMES * self.per_frame_dim

    @property
    def needs_encoder(self):
        return self.algo in ("bottleneck", "external")

    @classmethod
    def from_name(cls, name):
        try:
            return REPRESENTATIONS[name]
        except KeyError:
            raise ConfigError(
                f"unknown representation {name!r}; choose from "
                f"{', '.join(REPRESENTATIONS)}") from None


def _rep(name, algo, mode, title, encoder=None, dim=None, group="traditional"):
    return RepresentationSpec(algo, mode, encoder, dim, name, group, title)


REPRESENTATIONS = {r.name: r for r in [
    _rep("mfcc-frame", "mfcc", "frame", "MFCC Frame"),
    _rep("mfcc-segment", "mfcc", "segment", "MFCC Segment"),
    _rep("lpc-frame", "lpc", "frame", "LPC Frame"),
    _rep("lpc-segment", "lpc", "segment", "LPC Segment"),
    _rep("ae-small", "bottleneck", "segment", "Small AE", "ae-small", 8, "autoencoder"),
    _rep("ae-big", "bottleneck", "segment", "Big AE", "ae-big", 16, "autoencoder"),
    _rep("lstm-ae-small", "bottleneck", "segment", "Small LSTM AE", "lstm-ae-small",
         8, "autoencoder"),
    _rep("lstm-ae-big", "bottleneck", "segment", "Big LSTM AE", "lstm-ae-big",
         16, "autoencoder"),
    _rep("external", "external", "whole-segment", "External", "external", 16,
         "autoencoder"),
]}


def per_chunk_function(spec, encoder=None, sample_rate=REFERENCE_RATE):
    """Batched ``(n, length) -> (n, k)`` feature function for ``spec``."""
    if spec.algo == "mfcc":
        cfg = MfccConfig(sample_rate=sample_rate)
        return lambda chunks: mfcc_batch(chunks, cfg)
    if spec.algo == "lpc":
        return lpc_batch
    if encoder is None:
        raise ConfigError(f"representation {spec.name or spec.algo} needs an encoder")
    return encoder.encode_batch


def extract_frame_level(window, spec, per_frame_fn=None, sample_rate=REFERENCE_RATE):
    """Features of each of the four frames, concatenated in frame order."""
    if spec.mode != "frame":
        raise SpecError(f"expected a frame-mode spec, got {spec.mode!r}")
    fn = per_frame_fn or per_chunk_function(spec, sample_rate=sample_rate)
    frames = partition_window(window, sample_rate)
    return np.asarray(fn(np.ascontiguousarray(frames))).reshape(-1)


def extract_segment_level(window, spec=None, per_segment_fn=None,
                          sample_rate=REFERENCE_RATE):
    """Per-frame averages of segment features, concatenated in frame order.

    ``per_segment_fn`` maps an ``(n, seg_len)`` array of segments to
    ``(n, k)`` features; by default it is derived from ``spec``.
    """
    if spec is not None and spec.mode != "segment":
        raise SpecError(f"expected a segment-mode spec, got {spec.mode!r}")
    if per_segment_fn is None:
        if spec is None:
            raise SpecError("need a spec or a per-segment function")
        per_segment_fn = per_chunk_function(spec, sample_rate=sample_rate)
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 1:
        raise GeometryError("extract_segment_level takes a single window")
    return segment_level_features(window[None, :], per_segment_fn, sample_rate)[0]


def segment_level_features(windows, per_segment_fn, sample_rate=REFERENCE_RATE,
                           batch_windows=32):
    """Segment-level features of a ``(n_windows, window_len)`` stack."""
    windows = np.asarray(windows, dtype=np.float64)
    out = []
    for lo in range(0, windows.shape[0], batch_windows):
        frames = partition_window(windows[lo:lo + batch_windows], sample_rate)
        segs = frame_segments(frames, sample_rate)
        n, n_frames, n_segs, seg_len = segs.shape
        feats = np.asarray(per_segment_fn(segs.reshape(-1, seg_len)))
        feats = feats.reshape(n, n_frames, n_segs, -1).mean(axis=2)
        out.append(feats.reshape(n, -1))
    if not out:
        return np.zeros((0, 0))
    return np.concatenate(out)


def frame_level_features(windows, per_frame_fn, sample_rate=REFERENCE_RATE):
    windows = np.asarray(windows, dtype=np.float64)
    frames = partition_window(windows, sample_rate)
    n, n_frames, flen = frames.shape
    feats = np.asarray(per_frame_fn(frames.reshape(-1, flen)))
    return feats.reshape(n, -1)


class FeatureExtractor(TransformerMixin, BaseEstimator):
    """Transformer from phoneme windows to a named representation.

    ``transform`` takes an ``(n, window_len)`` array of onset windows for
    frame/segment representations, or a sequence of full phoneme segments
    for the ``external`` representation.

    Parameters
    ----------
    representation : str
        One of the names in ``REPRESENTATIONS``.
    encoder : object, optional
        Bottleneck encoder (``encode_batch`` on ``(n, 110)`` arrays) or,
        for ``external``, a 512-sample chunk encoder.
    sample_rate : int
    """

    def __init__(self, representation="mfcc-segment", encoder=None,
                 sample_rate=REFERENCE_RATE):
        self.representation = representation
        self.encoder = encoder
        self.sample_rate = sample_rate

    def _spec(self):
        return RepresentationSpec.from_name(self.representation)

    def fit(self, X=None, y=None):
        spec = self._spec()
        if spec.needs_encoder and self.encoder is None:
            raise ConfigError(f"representation {spec.name} needs an encoder")
        if spec.algo == "bottleneck":
            k = getattr(self.encoder, "bottleneck_dim", spec.encoder_dim)
            seg = getattr(self.encoder, "input_dim", segment_length(self.sample_rate))
            if seg != segment_length(self.sample_rate):
                raise ConfigError(f"encoder input length {seg} does not match segments")
            self.n_features_out_ = N_FRAMES * k
        elif spec.algo == "external":
            self.n_features_out_ = getattr(self.encoder, "output_dim", spec.encoder_dim)
        else:
            self.n_features_out_ = spec.dim
        return self

    def transform(self, X):
        check_fitted(self, "n_features_out_")
        spec = self._spec()
        if spec.mode == "whole-segment":
            from ..neural.external import external_features
            return external_features(X, self.encoder)
        fn = per_chunk_function(spec, self.encoder, self.sample_rate)
        if spec.mode == "frame":
            return frame_level_features(X, fn, self.sample_rate)
        return segment_level_features(X, fn, self.sample_rate)

    def get_feature_names_out(self, input_features=None):
        check_fitted(self, "n_features_out_")
        return np.array([f"f{i}" for i in range(self.n_features_out_)], dtype=object)
