"""Layers with explicit forward/backward passes.

Every layer keeps whatever it needs from the last ``forward`` call and
accumulates nothing: ``backward`` overwrites ``grads`` in place, in the
same order as ``params``.
"""

import numpy as np

from .._validation import check_random_state


def he_uniform(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, (fan_in, fan_out))


def xavier_uniform(rng, fan_in, fan_out, shape=None):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, shape or (fan_in, fan_out))


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class Layer:
    kind = "layer"

    def __init__(self):
        self.params = []
        self.grads = []

    def forward(self, x, training=False):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def describe(self):
        return {"kind": self.kind}

    def _alloc_grads(self):
        self.grads = [np.zeros_like(p) for p in self.params]


class Dense(Layer):
    """Affine map over the last axis; leading axes are treated as batch."""

    kind = "dense"

    def __init__(self, n_in, n_out, init="xavier", rng=None):
        super().__init__()
        rng = check_random_state(rng)
        if init == "he":
            W = he_uniform(rng, n_in, n_out)
        elif init == "xavier":
            W = xavier_uniform(rng, n_in, n_out)
        elif init == "zeros":
            W = np.zeros((n_in, n_out))
        else:
            raise ValueError(f"unknown init {init!r}")
        self.n_in, self.n_out, self.init = n_in, n_out, init
        self.params = [W, np.zeros(n_out)]
        self._alloc_grads()

    def describe(self):
        return {"kind": self.kind, "n_in": self.n_in, "n_out": self.n_out}

    def forward(self, x, training=False):
        self._x = x
        W, b = self.params
        return x @ W + b

    def backward(self, dout):
        W, _ = self.params
        x2 = self._x.reshape(-1, self.n_in)
        d2 = dout.reshape(-1, self.n_out)
        np.matmul(x2.T, d2, out=self.grads[0])
        self.grads[1][...] = d2.sum(axis=0)
        return dout @ W.T


class ReLU(Layer):
    kind = "relu"

    def forward(self, x, training=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0.0)


class Tanh(Layer):
    kind = "tanh"

    def forward(self, x, training=False):
        self._y = np.tanh(x)
        return self._y

    def backward(self, dout):
        return dout * (1.0 - self._y ** 2)


class Dropout(Layer):
    """Inverted dropout; the identity outside training or when ``rate == 0``."""

    kind = "dropout"

    def __init__(self, rate, rng=None):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        self.rate = rate
        self.rng = check_random_state(rng)

    def describe(self):
        return {"kind": self.kind, "rate": self.rate}

    def forward(self, x, training=False):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.rate
        self._mask = (self.rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, dout):
        return dout if self._mask is None else dout * self._mask


class Reshape(Layer):
    kind = "reshape"

    def __init__(self, shape):
        super().__init__()
        self.shape = tuple(shape)

    def describe(self):
        return {"kind": self.kind, "shape": list(self.shape)}

    def forward(self, x, training=False):
        self._in_shape = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, dout):
        return dout.reshape(self._in_shape)


class RepeatVector(Layer):
    """``(batch, k) -> (batch, steps, k)``."""

    kind = "repeat"

    def __init__(self, steps):
        super().__init__()
        self.steps = steps

    def describe(self):
        return {"kind": self.kind, "steps": self.steps}

    def forward(self, x, training=False):
        return np.repeat(x[:, None, :], self.steps, axis=1)

    def backward(self, dout):
        return dout.sum(axis=1)


class LSTM(Layer):
    """Single-layer LSTM over ``(batch, steps, n_in)`` inputs.

    Gate order in the stacked weights is input, forget, cell, output.
    Returns the full hidden sequence or only the last hidden state.
    """

    kind = "lstm"

    def __init__(self, n_in, hidden, return_sequences=False, rng=None):
        super().__init__()
        rng = check_random_state(rng)
        self.n_in, self.hidden = n_in, hidden
        self.return_sequences = return_sequences
        H = hidden
        W = xavier_uniform(rng, n_in, 4 * H)
        U = xavier_uniform(rng, H, 4 * H)
        b = np.zeros(4 * H)
        b[H:2 * H] = 1.0  # forget-gate bias
        self.params = [W, U, b]
        self._alloc_grads()

    def describe(self):
        return {"kind": self.kind, "n_in": self.n_in, "hidden": self.hidden,
                "return_sequences": self.return_sequences}

    def forward(self, x, training=False):
        W, U, b = self.params
        B, T, _ = x.shape
        H = self.hidden
        # sigmoid(z) = (1 + tanh(z / 2)) / 2, so one tanh covers all four gates
        half = np.ones(4 * H)
        half[:2 * H] = half[3 * H:] = 0.5
        # time-major so each step reads a contiguous (B, 4H) block
        xt = np.ascontiguousarray(x.transpose(1, 0, 2)).reshape(T * B, -1)
        xw = (xt @ (W * half) + b * half).reshape(T, B, 4 * H)
        Uh = U * half
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        keep = training or self.return_sequences
        hs = np.empty((B, T, H)) if keep else None
        if training:
            gates = np.empty((B, T, 4 * H))
            cs = np.empty((B, T, H))
        for t in range(T):
            a = np.tanh(xw[t] + h @ Uh)
            a[:, :2 * H] += 1.0
            a[:, :2 * H] *= 0.5
            a[:, 3 * H:] += 1.0
            a[:, 3 * H:] *= 0.5
            c = a[:, H:2 * H] * c + a[:, :H] * a[:, 2 * H:3 * H]
            h = a[:, 3 * H:] * np.tanh(c)
            if keep:
                hs[:, t] = h
            if training:
                gates[:, t] = a
                cs[:, t] = c
        self._x = x
        if training:
            self._gates, self._cs, self._hs = gates, cs, hs
        else:
            self._gates = None
        return hs if self.return_sequences else h

    def backward(self, dout):
        if self._gates is None:
            raise RuntimeError("backward needs a forward pass with training=True")
        W, U, _ = self.params
        x, gates, cs, hs = self._x, self._gates, self._cs, self._hs
        B, T, _ = x.shape
        H = self.hidden
        if self.return_sequences:
            dh_seq = dout
        else:
            dh_seq = np.zeros((B, T, H))
            dh_seq[:, -1] = dout
        dz = np.empty((B, T, 4 * H))
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            i, f = gates[:, t, :H], gates[:, t, H:2 * H]
            g, o = gates[:, t, 2 * H:3 * H], gates[:, t, 3 * H:]
            c = cs[:, t]
            c_prev = cs[:, t - 1] if t > 0 else np.zeros((B, H))
            tc = np.tanh(c)
            dh = dh_seq[:, t] + dh_next
            dc = dc_next + dh * o * (1.0 - tc ** 2)
            dz[:, t, :H] = dc * g * i * (1.0 - i)
            dz[:, t, H:2 * H] = dc * c_prev * f * (1.0 - f)
            dz[:, t, 2 * H:3 * H] = dc * i * (1.0 - g ** 2)
            dz[:, t, 3 * H:] = dh * tc * o * (1.0 - o)
            dh_next = dz[:, t] @ U.T
            dc_next = dc * f
        h_prev = np.concatenate([np.zeros((B, 1, H)), hs[:, :-1]], axis=1)
        dz2 = dz.reshape(-1, 4 * H)
        self.grads[0][...] = x.reshape(-1, self.n_in).T @ dz2
        self.grads[1][...] = h_prev.reshape(-1, H).T @ dz2
        self.grads[2][...] = dz2.sum(axis=0)
        return dz @ W.T


LAYER_TYPES = {cls.kind: cls for cls in
               (Dense, ReLU, Tanh, Dropout, Reshape, RepeatVector, LSTM)}


def layer_from_description(desc, rng=None):
    """Rebuild a layer (with fresh parameters) from ``Layer.describe()``."""
    desc = dict(desc)
    kind = desc.pop("kind")
    if kind == "dense":
        return Dense(desc["n_in"], desc["n_out"], init="zeros")
    if kind in ("relu", "tanh"):
        return LAYER_TYPES[kind]()
    if kind == "dropout":
        return Dropout(desc["rate"], rng)
    if kind == "reshape":
        return Reshape(desc["shape"])
    if kind == "repeat":
        return RepeatVector(desc["steps"])
    if kind == "lstm":
        return LSTM(desc["n_in"], desc["hidden"], desc["return_sequences"], rng)
    raise ValueError(f"unknown layer kind {kind!r}")
