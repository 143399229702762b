"""Dense and LSTM autoencoders over 110-sample audio segments."""

import csv
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_fitted, check_matrix, check_random_state
from ..exceptions import DataError, GeometryError, SpecError
from .layers import LSTM, Dense, RepeatVector, ReLU, Reshape, Tanh
from .network import Adam, Sequential, mse_loss

SEGMENT_LEN = 110


@dataclass(frozen=True)
class DenseAeArch:
    """Encoder widths halve from ``first_width`` down to ``bottleneck``.

    The decoder mirrors the encoder and ends in a tanh layer of
    ``input_dim`` units; all other layers are ReLU.
    """
    bottleneck: int = 8
    first_width: int = 2048
    input_dim: int = SEGMENT_LEN
    kind = "dense"

    def __post_init__(self):
        if self.bottleneck < 1 or self.first_width < self.bottleneck:
            raise SpecError("need 1 <= bottleneck <= first_width")
        ratio = self.first_width // self.bottleneck
        if self.first_width % self.bottleneck or ratio & (ratio - 1):
            raise SpecError(
                f"first_width {self.first_width} is not bottleneck x 2^k")

    @property
    def encoder_widths(self):
        widths, w = [], self.first_width
        while w >= self.bottleneck:
            widths.append(w)
            w //= 2
        return widths

    @property
    def decoder_widths(self):
        return self.encoder_widths[-2::-1] + [self.input_dim]


@dataclass(frozen=True)
class LstmAeArch:
    """LSTM encoder -> linear bottleneck -> LSTM decoder of the reversed input."""
    bottleneck: int = 8
    hidden: int = 2048
    seq_len: int = SEGMENT_LEN
    kind = "lstm"

    def __post_init__(self):
        if self.bottleneck < 1 or self.hidden < 1 or self.seq_len < 1:
            raise SpecError("LSTM autoencoder sizes must be positive")

    @property
    def input_dim(self):
        return self.seq_len


SMALL_AE = DenseAeArch(bottleneck=8)
BIG_AE = DenseAeArch(bottleneck=16)
SMALL_LSTM_AE = LstmAeArch(bottleneck=8)
BIG_LSTM_AE = LstmAeArch(bottleneck=16)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if min(self.lr, self.beta1, self.beta2, self.eps) <= 0:
            raise SpecError("optimizer hyperparameters must be positive")
        if self.batch_size < 1 or self.epochs < 1:
            raise SpecError("batch_size and epochs must be positive")


def init_network(arch, seed=0):
    """Freshly initialized autoencoder for ``arch``.

    ReLU layers get He-uniform weights; the bottleneck projection, tanh head
    and LSTM weights get Xavier-uniform.
    """
    rng = check_random_state(seed)
    if isinstance(arch, DenseAeArch):
        layers, n_in = [], arch.input_dim
        for w in arch.encoder_widths:
            layers += [Dense(n_in, w, "he", rng), ReLU()]
            n_in = w
        bottleneck_index = len(layers)
        for w in arch.decoder_widths[:-1]:
            layers += [Dense(n_in, w, "he", rng), ReLU()]
            n_in = w
        layers += [Dense(n_in, arch.input_dim, "xavier", rng), Tanh()]
        return Sequential(layers, bottleneck_index)
    if isinstance(arch, LstmAeArch):
        T, H, k = arch.seq_len, arch.hidden, arch.bottleneck
        layers = [Reshape((T, 1)), LSTM(1, H, rng=rng), Dense(H, k, "xavier", rng)]
        bottleneck_index = len(layers)
        layers += [RepeatVector(T), LSTM(k, H, return_sequences=True, rng=rng),
                   Dense(H, 1, "xavier", rng), Tanh(), Reshape((T,))]
        return Sequential(layers, bottleneck_index)
    raise SpecError(f"unknown architecture {arch!r}")


def reconstruction_target(arch, X):
    """LSTM autoencoders reproduce the sequence reversed."""
    return X[:, ::-1] if isinstance(arch, LstmAeArch) else X


def _dataset_loss(net, X, target, batch=4096):
    total = 0.0
    for lo in range(0, X.shape[0], batch):
        pred = net.forward(X[lo:lo + batch])
        total += float(np.sum((pred - target[lo:lo + batch]) ** 2))
    return total / target.size


class Encoder:
    """Frozen encoder half of a trained autoencoder."""

    def __init__(self, network, input_dim, bottleneck_dim, name=None, loss_curve=None):
        self.network = network
        self.input_dim = input_dim
        self.bottleneck_dim = bottleneck_dim
        self.name = name
        self.loss_curve = list(loss_curve or [])
        for p in network.params:
            p.setflags(write=False)

    def encode(self, segment):
        segment = np.asarray(segment, dtype=np.float64)
        if segment.ndim != 1 or segment.shape[0] != self.input_dim:
            raise GeometryError(
                f"segment has shape {segment.shape}, expected ({self.input_dim},)")
        return self.encode_batch(segment[None, :])[0]

    def encode_batch(self, X, batch=4096):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise GeometryError(
                f"segments have shape {X.shape}, expected (n, {self.input_dim})")
        stop = self.network.bottleneck_index
        out = np.empty((X.shape[0], self.bottleneck_dim))
        for lo in range(0, X.shape[0], batch):
            out[lo:lo + batch] = self.network.forward(X[lo:lo + batch], stop=stop)
        return out

    __call__ = encode_batch


def train_autoencoder(segments, arch, config=None, callback=None):
    """Fit an autoencoder on ``(n, input_dim)`` segments; returns (Encoder, net).

    ``loss_curve[0]`` is the training-set MSE before the first update and
    ``loss_curve[e]`` the MSE after epoch ``e``.
    """
    config = config or TrainConfig()
    X = np.asarray(segments, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("need a non-empty (n, input_dim) array of segments")
    X = check_matrix(X, arch.input_dim, "segments")
    rng = np.random.default_rng(config.seed)
    net = init_network(arch, rng)
    target = reconstruction_target(arch, X)
    opt = Adam(net.params, config.lr, config.beta1, config.beta2, config.eps)
    curve = [_dataset_loss(net, X, target)]
    for epoch in range(config.epochs):
        order = rng.permutation(X.shape[0])
        for lo in range(0, X.shape[0], config.batch_size):
            idx = order[lo:lo + config.batch_size]
            pred = net.forward(X[idx], training=True)
            _, grad = mse_loss(pred, target[idx])
            net.backward(grad)
            opt.step(net.grads)
        curve.append(_dataset_loss(net, X, target))
        if callback is not None:
            callback(epoch + 1, curve[-1])
    encoder = Encoder(net, arch.input_dim, arch.bottleneck, loss_curve=curve)
    return encoder, net


def write_loss_curve(path, curve):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "loss"])
        for epoch, loss in enumerate(curve):
            writer.writerow([epoch, repr(float(loss))])


def arch_to_dict(arch):
    return {"kind": arch.kind, **asdict(arch)}


def arch_from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    return DenseAeArch(**d) if kind == "dense" else LstmAeArch(**d)


def save_autoencoder(path, net, arch, loss_curve=()):
    net.save(path, extra={"arch": arch_to_dict(arch),
                          "loss_curve": [float(v) for v in loss_curve]})


def load_encoder(path, name=None):
    net, extra = Sequential.load(path)
    if "arch" not in extra:
        raise DataError(f"{path}: not an autoencoder model")
    arch = arch_from_dict(extra["arch"])
    return Encoder(net, arch.input_dim, arch.bottleneck, name,
                   extra.get("loss_curve"))


def segment_corpus(audio, segment_len=SEGMENT_LEN, seed=0, max_segments=None):
    """Non-overlapping segments from every buffer, shuffled by ``seed``."""
    pieces = []
    for key in sorted(audio):
        x = np.asarray(getattr(audio[key], "samples", audio[key]), dtype=np.float64)
        n = x.shape[0] // segment_len
        if n:
            pieces.append(x[:n * segment_len].reshape(n, segment_len))
    if not pieces:
        raise DataError("audio is shorter than one segment")
    X = np.concatenate(pieces)
    X = X[np.random.default_rng(seed).permutation(X.shape[0])]
    return X[:max_segments] if max_segments else X


class _AutoencoderBase(TransformerMixin, BaseEstimator):

    def _arch(self):
        raise NotImplementedError

    def fit(self, X, y=None):
        cfg = TrainConfig(lr=self.learning_rate, batch_size=self.batch_size,
                          epochs=self.epochs, seed=self.random_state)
        self.arch_ = self._arch()
        self.encoder_, self.network_ = train_autoencoder(X, self.arch_, cfg)
        self.loss_curve_ = self.encoder_.loss_curve
        return self

    def transform(self, X):
        check_fitted(self, "encoder_")
        return self.encoder_.encode_batch(X)

    def reconstruct(self, X):
        check_fitted(self, "network_")
        return self.network_.forward(check_matrix(X, self.arch_.input_dim))


class DenseAutoencoder(_AutoencoderBase):
    """Dense autoencoder whose ``transform`` returns bottleneck codes.

    Parameters
    ----------
    bottleneck : int
        8 for the small model, 16 for the big one.
    first_width : int
        Width of the first hidden layer (2048 by default).
    epochs, batch_size, learning_rate, random_state
        Adam training settings.
    """

    def __init__(self, bottleneck=8, first_width=2048, epochs=30, batch_size=64,
                 learning_rate=1e-3, random_state=0):
        self.bottleneck = bottleneck
        self.first_width = first_width
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.random_state = random_state

    def _arch(self):
        return DenseAeArch(self.bottleneck, self.first_width)


class LSTMAutoencoder(_AutoencoderBase):
    def __init__(self, bottleneck=8, hidden=2048, epochs=30, batch_size=64,
                 learning_rate=1e-3, random_state=0):
        self.bottleneck = bottleneck
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.random_state = random_state

    def _arch(self):
        return LstmAeArch(self.bottleneck, self.hidden)
