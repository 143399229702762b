"""Audio buffers, 16-bit PCM WAV I/O and window slicing."""

import math
import wave
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import (DataError, FormatError, NumericError, PaddingWarning,
                          RangeError)

REFERENCE_RATE = 44100
WINDOW_MS = 25.0
PCM_SCALE = 32768.0


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int = REFERENCE_RATE
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DataError(f"audio must be mono, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise NumericError("audio samples must be finite")
        if samples.size and np.max(np.abs(samples)) > 1.0:
            raise RangeError("audio samples must lie in [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise DataError(f"invalid sample rate {self.sample_rate!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate


def time_to_index(t, sample_rate):
    """Nearest sample index to time ``t``; halves round up."""
    return int(math.floor(t * sample_rate + 0.5))


def window_length(sample_rate, window_ms=WINDOW_MS):
    return int(math.floor(window_ms / 1000.0 * sample_rate))


def _padded(samples, start, stop):
    n = len(samples)
    out = np.zeros(stop - start)
    real = samples[start:min(stop, n)]
    out[:real.shape[0]] = real
    return out, real.shape[0] < out.shape[0]


def slice_window(audio, ann, window_ms=WINDOW_MS):
    """Fixed-length window starting at the annotation onset.

    The window is ``floor(window_ms * rate / 1000)`` samples (1102 at
    44.1 kHz) regardless of the phoneme's duration, zero-padded past the
    end of the file.
    """
    start = time_to_index(ann.start, audio.sample_rate)
    if start >= len(audio) or start < 0:
        raise RangeError(
            f"{ann.audio_id}: start {ann.start:.6f}s is outside the audio "
            f"({audio.duration:.6f}s)")
    out, _ = _padded(audio.samples, start,
                     start + window_length(audio.sample_rate, window_ms))
    return out


def slice_full_segment(audio, ann):
    """All samples in ``[start, end)``; zero-padded with a warning past EOF."""
    rate = audio.sample_rate
    start = time_to_index(ann.start, rate)
    stop = time_to_index(ann.end, rate)
    if start >= len(audio) or start < 0:
        raise RangeError(
            f"{ann.audio_id}: start {ann.start:.6f}s is outside the audio "
            f"({audio.duration:.6f}s)")
    if stop <= start:
        raise RangeError(f"{ann.audio_id}: segment at {ann.start:.6f}s is empty")
    out, padded = _padded(audio.samples, start, stop)
    if padded:
        warnings.warn(
            f"{ann.audio_id}: segment {ann.start:.6f}-{ann.end:.6f}s runs past "
            f"the end of the audio; zero-padded {stop - len(audio)} samples",
            PaddingWarning, stacklevel=2)
    return out


def resample_linear(samples, src_rate, dst_rate):
    """Linear-interpolation resampler."""
    samples = np.asarray(samples, dtype=np.float64)
    if src_rate == dst_rate or samples.size == 0:
        return samples.copy()
    n_out = int(round(samples.shape[0] * dst_rate / src_rate))
    t_out = np.arange(n_out) * (src_rate / dst_rate)
    return np.interp(t_out, np.arange(samples.shape[0]), samples)


def read_wav(path, resample=False, target_rate=REFERENCE_RATE):
    """Load a 16-bit PCM WAV as an :class:`AudioBuffer`.

    Multi-channel audio is averaged to mono. Files not at ``target_rate``
    are rejected unless ``resample`` is set.
    """
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"not a PCM WAV file: {exc}", path=path) from None
    if width != 2:
        raise FormatError(
            f"expected 16-bit PCM, got {8 * width}-bit samples", path=path)
    pcm = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    pcm = pcm.reshape(-1, n_channels).mean(axis=1) / PCM_SCALE
    if rate != target_rate:
        if not resample:
            raise FormatError(
                f"sample rate {rate} Hz differs from {target_rate} Hz "
                "(enable resampling to convert)", path=path)
        pcm = np.clip(resample_linear(pcm, rate, target_rate), -1.0, 1.0)
        rate = target_rate
    return AudioBuffer(pcm, rate, source=str(path))


def to_pcm16(samples):
    scaled = np.round(np.asarray(samples, dtype=np.float64) * PCM_SCALE)
    return np.clip(scaled, -32768, 32767).astype("<i2")


def write_wav(path, audio):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(audio.sample_rate)
        wf.writeframes(to_pcm16(audio.samples).tobytes())
