"""Window geometry, MFCC/LPC extractors and window representations."""

from .features import (REPRESENTATIONS, FeatureExtractor, RepresentationSpec,
                       extract_frame_level, extract_segment_level,
                       frame_level_features, segment_level_features)
from .geometry import frame_segments, partition_window
from .io import FeatureMatrix
from .lpc import LpcConfig, autocorrelation, levinson_durbin, lpc, lpc_batch
from .mfcc import MfccConfig, mel_filterbank, mfcc, mfcc_batch

__all__ = [
    "REPRESENTATIONS", "FeatureExtractor", "FeatureMatrix", "LpcConfig",
    "MfccConfig", "RepresentationSpec", "autocorrelation",
    "extract_frame_level", "extract_segment_level", "frame_level_features",
    "frame_segments", "levinson_durbin", "lpc", "lpc_batch", "mel_filterbank",
    "mfcc", "mfcc_batch", "partition_window", "segment_level_features",
]
