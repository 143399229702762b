"""Linear prediction by the autocorrelation method and Levinson-Durbin.

Coefficients follow the predictor convention
``x[n] ~ a1*x[n-1] + ... + ap*x[n-p]``; the leading unit coefficient of
the inverse filter is not returned.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_finite
from ..exceptions import GeometryError, SpecError

# prediction error below this fraction of r[0] ends the recursion
_ERROR_FLOOR = 1e-12


@dataclass(frozen=True)
class LpcConfig:
    order: int = 8

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise SpecError(f"LPC order must be a positive integer, got {self.order!r}")


def _order(config):
    if config is None:
        return LpcConfig().order
    if isinstance(config, LpcConfig):
        return config.order
    return LpcConfig(int(config)).order


def autocorrelation(x, order):
    """Biased autocorrelation ``r[0..order]`` along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    return np.stack([np.einsum("...i,...i->...", x[..., :n - k], x[..., k:])
                     for k in range(order + 1)], axis=-1)


def levinson_durbin(r, order=None):
    """Solve the Toeplitz normal equations for each row of ``r``.

    Returns ``(a, error, degenerate)``: predictor coefficients of shape
    ``(..., order)``, the final prediction error and a boolean mask marking
    inputs whose recursion stopped early (zero energy or a perfectly
    predictable signal). Coefficients of stopped rows keep the values of the
    last completed order, padded with zeros.
    """
    r = np.asarray(r, dtype=np.float64)
    order = r.shape[-1] - 1 if order is None else order
    batch = r.shape[:-1]
    r = r.reshape(-1, r.shape[-1])
    a = np.zeros((r.shape[0], order))
    err = r[:, 0].copy()
    active = err > 0
    degenerate = ~active
    floor = _ERROR_FLOOR * r[:, 0]
    for i in range(order):
        # reflection coefficient for order i+1
        acc = r[:, i + 1] - np.einsum("bj,bj->b", a[:, :i], r[:, i:0:-1])
        safe = np.where(active, err, 1.0)
        k = np.where(active, acc / safe, 0.0)
        prev = a[:, :i].copy()
        a[:, :i] = prev - k[:, None] * prev[:, ::-1]
        a[:, i] = k
        err = np.where(active, err * (1.0 - k * k), err)
        stalled = active & (err <= floor)
        degenerate |= stalled
        active &= ~stalled
    return (a.reshape(batch + (order,)), err.reshape(batch),
            degenerate.reshape(batch))


def lpc_batch(chunks, config=None, return_degenerate=False):
    order = _order(config)
    chunks = check_finite(np.asarray(chunks, dtype=np.float64), "chunk")
    if chunks.shape[-1] <= order:
        raise GeometryError(
            f"chunk length {chunks.shape[-1]} must exceed LPC order {order}")
    a, _, degenerate = levinson_durbin(autocorrelation(chunks, order), order)
    return (a, degenerate) if return_degenerate else a


def lpc(chunk, config=None, return_degenerate=False):
    """Order-p predictor coefficients of one chunk (p = 8 by default).

    An all-zero chunk yields a zero vector; pass ``return_degenerate=True``
    to also get a flag for such inputs.
    """
    chunk = np.asarray(chunk, dtype=np.float64)
    if chunk.ndim != 1:
        raise GeometryError(f"chunk must be 1-D, got shape {chunk.shape}")
    a, degenerate = lpc_batch(chunk[None, :], config, return_degenerate=True)
    if return_degenerate:
        return a[0], bool(degenerate[0])
    return a[0]
