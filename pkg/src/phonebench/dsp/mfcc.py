"""Mel-frequency cepstral coefficients computed over a single analysis chunk."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft
from scipy.signal import get_window

from .._validation import check_finite
from ..exceptions import GeometryError, SpecError

REFERENCE_RATE = 44100


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def next_pow2(n):
    return 1 << max(0, int(n) - 1).bit_length()


@dataclass(frozen=True)
class MfccConfig:
    """MFCC settings.

    ``fft_size=None`` picks the smallest power of two that holds the chunk
    (512 for a 441-sample frame, 128 for a 110-sample segment).
    """
    n_coeffs: int = 12
    n_mels: int = 26
    fft_size: int | None = None
    sample_rate: int = REFERENCE_RATE
    fmin: float = 0.0
    fmax: float | None = None
    log_floor: float = 1e-10
    window: str = "hann"

    def __post_init__(self):
        if not 1 <= self.n_coeffs <= self.n_mels:
            raise SpecError("need 1 <= n_coeffs <= n_mels")
        if self.fft_size is not None and (
                self.fft_size < 2 or self.fft_size & (self.fft_size - 1)):
            raise SpecError(f"fft_size {self.fft_size} is not a power of two")
        if self.log_floor <= 0:
            raise SpecError("log_floor must be positive")
        if not 0 <= self.fmin < self.nyquist_limit:
            raise SpecError("fmin must lie in [0, fmax)")

    @property
    def nyquist_limit(self):
        return self.sample_rate / 2.0 if self.fmax is None else self.fmax

    def resolve_fft_size(self, n):
        fft_size = self.fft_size or next_pow2(n)
        if fft_size < n:
            raise GeometryError(f"fft_size {fft_size} is shorter than chunk length {n}")
        return fft_size


@lru_cache(maxsize=32)
def mel_filterbank(sample_rate, fft_size, n_mels, fmin=0.0, fmax=None):
    """Triangular filters with unit peak, shape ``(n_mels, fft_size // 2 + 1)``.

    Edges are equally spaced on the HTK mel scale. Filters narrower than the
    bin spacing may end up with no non-zero weights.
    """
    fmax = sample_rate / 2.0 if fmax is None else fmax
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lower) / (center - lower)
    falling = (upper - freqs) / (upper - center)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    fb.setflags(write=False)
    return fb


@lru_cache(maxsize=32)
def _analysis_window(name, n):
    w = get_window(name, n, fftbins=True)
    w.setflags(write=False)
    return w


def log_mel_energies(chunks, config=None):
    """Log mel filterbank energies of each row of ``chunks``."""
    config = config or MfccConfig()
    chunks = check_finite(np.asarray(chunks, dtype=np.float64), "chunk")
    n = chunks.shape[-1]
    if n < 2:
        raise GeometryError("chunk needs at least 2 samples")
    fft_size = config.resolve_fft_size(n)
    spectrum = np.fft.rfft(chunks * _analysis_window(config.window, n), n=fft_size, axis=-1)
    power = spectrum.real ** 2 + spectrum.imag ** 2
    fb = mel_filterbank(config.sample_rate, fft_size, config.n_mels,
                        float(config.fmin), config.fmax)
    energies = power @ fb.T
    return np.log(np.maximum(energies, config.log_floor))


def mfcc_batch(chunks, config=None):
    """MFCCs of every row of a ``(n_chunks, length)`` array."""
    config = config or MfccConfig()
    logmel = log_mel_energies(chunks, config)
    return scipy.fft.dct(logmel, type=2, norm="ortho", axis=-1)[..., :config.n_coeffs]


def mfcc(chunk, config=None):
    """Coefficients c0..c{n-1} of one chunk treated as a single frame.

    Hann window, zero-padding to the FFT size, power spectrum, mel
    filterbank, natural log floored at ``config.log_floor`` and an
    orthonormal DCT-II.
    """
    chunk = np.asarray(chunk, dtype=np.float64)
    if chunk.ndim != 1:
        raise GeometryError(f"chunk must be 1-D, got shape {chunk.shape}")
    return mfcc_batch(chunk[None, :], config)[0]
