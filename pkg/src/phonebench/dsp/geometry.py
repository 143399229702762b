"""Window/frame/segment geometry.

A 25 ms window is cut into four 10 ms frames with a 5 ms hop, and each frame
is scanned by a 2.5 ms segment moving one sample at a time. Millisecond
lengths are floored to whole samples, which keeps every frame inside the
window.
"""

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import GeometryError

REFERENCE_RATE = 44100
N_FRAMES = 4
FRAME_MS = 10.0
FRAME_HOP_MS = 5.0
SEGMENT_MS = 2.5


def ms_to_samples(ms, sample_rate=REFERENCE_RATE):
    return int(math.floor(ms * sample_rate / 1000.0 + 1e-9))


def frame_length(sample_rate=REFERENCE_RATE):
    return ms_to_samples(FRAME_MS, sample_rate)


def frame_hop(sample_rate=REFERENCE_RATE):
    return ms_to_samples(FRAME_HOP_MS, sample_rate)


def segment_length(sample_rate=REFERENCE_RATE):
    return ms_to_samples(SEGMENT_MS, sample_rate)


def frame_offsets(sample_rate=REFERENCE_RATE):
    hop = frame_hop(sample_rate)
    return [i * hop for i in range(N_FRAMES)]


def min_window_length(sample_rate=REFERENCE_RATE):
    return frame_offsets(sample_rate)[-1] + frame_length(sample_rate)


def segments_per_frame(sample_rate=REFERENCE_RATE):
    return frame_length(sample_rate) - segment_length(sample_rate) + 1


def partition_window(window, sample_rate=REFERENCE_RATE):
    """Split a window (or a stack of windows) into its four frames.

    Returns shape ``(4, frame_len)`` for a 1-D window and
    ``(n, 4, frame_len)`` for a 2-D stack. The result is a read-only view.
    """
    window = np.asarray(window, dtype=np.float64)
    need = min_window_length(sample_rate)
    if window.shape[-1] < need:
        raise GeometryError(
            f"window has {window.shape[-1]} samples; at least {need} needed "
            f"for {N_FRAMES} frames")
    flen, hop = frame_length(sample_rate), frame_hop(sample_rate)
    frames = sliding_window_view(window[..., :need], flen, axis=-1)
    return frames[..., ::hop, :][..., :N_FRAMES, :]


def frame_segments(frames, sample_rate=REFERENCE_RATE):
    """All hop-1 segments of each frame: shape ``(..., n_segments, seg_len)``."""
    return sliding_window_view(frames, segment_length(sample_rate), axis=-1)
