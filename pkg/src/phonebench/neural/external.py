"""Whole-phoneme features from an external fixed-length chunk encoder.

A phoneme is zero-padded to a multiple of the chunk length, cut into
consecutive chunks, each chunk is encoded and the encodings are averaged.
Any object with ``encode_batch((n, 512)) -> (n, 16)`` (or a plain callable
with that signature) can serve as the chunk encoder.
"""

import numpy as np

from ..exceptions import DataError, GeometryError

CHUNK_LEN = 512
ENCODING_DIM = 16


def _encode_fn(chunk_encoder):
    return getattr(chunk_encoder, "encode_batch", chunk_encoder)


def split_chunks(segment, chunk_len=CHUNK_LEN):
    segment = np.asarray(segment, dtype=np.float64)
    if segment.ndim != 1 or segment.size == 0:
        raise DataError("segment must be a non-empty 1-D array")
    n_chunks = -(-segment.size // chunk_len)
    padded = np.zeros(n_chunks * chunk_len)
    padded[:segment.size] = segment
    return padded.reshape(n_chunks, chunk_len)


def external_segment_features(segment, chunk_encoder, chunk_len=CHUNK_LEN):
    chunk_len = getattr(chunk_encoder, "input_dim", chunk_len)
    codes = np.asarray(_encode_fn(chunk_encoder)(split_chunks(segment, chunk_len)))
    if codes.ndim != 2:
        raise GeometryError("chunk encoder must return one row per chunk")
    return codes.mean(axis=0)


def external_features(segments, chunk_encoder, chunk_len=CHUNK_LEN):
    """Stack of :func:`external_segment_features`, encoding all chunks at once."""
    chunk_len = getattr(chunk_encoder, "input_dim", chunk_len)
    chunks = [split_chunks(s, chunk_len) for s in segments]
    if not chunks:
        return np.zeros((0, getattr(chunk_encoder, "output_dim", ENCODING_DIM)))
    codes = np.asarray(_encode_fn(chunk_encoder)(np.concatenate(chunks)))
    bounds = np.cumsum([0] + [c.shape[0] for c in chunks])
    return np.stack([codes[a:b].mean(axis=0) for a, b in zip(bounds[:-1], bounds[1:])])


class RandomProjectionEncoder:
    """Deterministic stand-in chunk encoder: ``tanh(chunk @ W)``.

    ``W`` is a fixed Gaussian matrix drawn from ``seed`` and scaled by
    ``1/sqrt(input_dim)``.
    """

    def __init__(self, input_dim=CHUNK_LEN, output_dim=ENCODING_DIM, seed=0, gain=8.0):
        self.input_dim = input_dim
        self.output_dim = output_dim
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.W = rng.standard_normal((input_dim, output_dim)) * gain / np.sqrt(input_dim)
        self.W.setflags(write=False)

    def encode_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise GeometryError(f"chunks must have shape (n, {self.input_dim})")
        return np.tanh(X @ self.W)

    __call__ = encode_batch
