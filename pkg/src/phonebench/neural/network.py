"""Sequential networks, losses and the Adam optimizer."""

import json
import struct
from pathlib import Path

import numpy as np

from .._validation import check_finite
from ..exceptions import FormatError
from .layers import layer_from_description

MAGIC = b"PBNN"
VERSION = 1


class Sequential:
    """A stack of layers applied in order.

    ``bottleneck_index`` (optional) is the number of leading layers that
    make up an encoder.
    """

    def __init__(self, layers, bottleneck_index=None):
        self.layers = list(layers)
        self.bottleneck_index = bottleneck_index

    @property
    def params(self):
        return [p for layer in self.layers for p in layer.params]

    @property
    def grads(self):
        return [g for layer in self.layers for g in layer.grads]

    @property
    def n_params(self):
        return sum(p.size for p in self.params)

    def forward(self, x, training=False, stop=None):
        x = check_finite(np.asarray(x, dtype=np.float64), "network input")
        for layer in self.layers[:stop]:
            x = layer.forward(x, training)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def describe(self):
        return {"bottleneck_index": self.bottleneck_index,
                "layers": [layer.describe() for layer in self.layers]}

    def get_flat_params(self):
        return np.concatenate([p.ravel() for p in self.params]) if self.params else np.zeros(0)

    def set_flat_params(self, flat):
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.n_params:
            raise FormatError(f"expected {self.n_params} parameters, got {flat.size}")
        pos = 0
        for p in self.params:
            p[...] = flat[pos:pos + p.size].reshape(p.shape)
            pos += p.size

    def save(self, path, extra=None):
        """Write the ``PBNN`` format: magic, version, JSON arch, float64 params."""
        desc = self.describe()
        if extra:
            desc["extra"] = extra
        blob = json.dumps(desc, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC + struct.pack("<HI", VERSION, len(blob)))
            fh.write(blob)
            fh.write(self.get_flat_params().astype("<f8").tobytes())

    @classmethod
    def load(cls, path):
        """Returns ``(network, extra)`` where ``extra`` is the saved metadata."""
        data = Path(path).read_bytes()
        if data[:4] != MAGIC:
            raise FormatError(f"bad magic {data[:4]!r}", path=path)
        version, size = struct.unpack_from("<HI", data, 4)
        if version != VERSION:
            raise FormatError(f"unsupported version {version}", path=path)
        try:
            desc = json.loads(data[10:10 + size].decode("utf-8"))
        except ValueError:
            raise FormatError("corrupt architecture block", path=path) from None
        net = cls([layer_from_description(d) for d in desc["layers"]],
                  desc.get("bottleneck_index"))
        flat = np.frombuffer(data, dtype="<f8", offset=10 + size)
        if flat.size != net.n_params:
            raise FormatError(
                f"parameter block has {flat.size} values, expected {net.n_params}",
                path=path)
        net.set_flat_params(flat)
        return net, desc.get("extra", {})


def mse_loss(pred, target):
    """Mean squared error over all elements and its gradient."""
    diff = pred - target
    return float(np.mean(diff ** 2)), 2.0 * diff / diff.size


def softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits, y):
    """Mean cross-entropy for integer targets ``y``; returns (loss, dlogits)."""
    z = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
    log_p = z - log_norm
    n = logits.shape[0]
    loss = -float(log_p[np.arange(n), y].mean())
    grad = np.exp(log_p)
    grad[np.arange(n), y] -= 1.0
    return loss, grad / n


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        if min(lr, beta1, beta2, eps) <= 0 or beta1 >= 1 or beta2 >= 1:
            raise ValueError("Adam hyperparameters must be positive, betas < 1")
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        lr_t = self.lr * np.sqrt(1.0 - b2 ** self.t) / (1.0 - b1 ** self.t)
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr_t * m / (np.sqrt(v) + self.eps)
