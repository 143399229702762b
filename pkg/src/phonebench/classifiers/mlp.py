"""Dense feed-forward classifier (ReLU hidden layers, dropout, softmax)."""

import numpy as np

from ..exceptions import SpecError
from ..neural.layers import Dense, Dropout, ReLU, layer_from_description
from ..neural.network import Adam, Sequential, softmax, softmax_cross_entropy
from .base import BaseClassifier


class DenseNNClassifier(BaseClassifier):
    """Two 512-unit ReLU layers with dropout 0.05, trained by Adam.

    Parameters
    ----------
    hidden : tuple of int
    dropout : float
        Applied after every hidden layer during training.
    learning_rate : float
    epochs : int
    batch_size : int
    random_state : int
        Seeds initialization, shuffling and dropout masks.
    """

    kind = "dense_nn"

    def __init__(self, hidden=(512, 512), dropout=0.05, learning_rate=1e-3,
                 epochs=50, batch_size=32, random_state=0):
        self.hidden = hidden
        self.dropout = dropout
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.random_state = random_state

    def _build(self, n_in, n_out, rng):
        layers = []
        for width in self.hidden:
            layers += [Dense(n_in, width, "he", rng), ReLU(), Dropout(self.dropout, rng)]
            n_in = width
        layers.append(Dense(n_in, n_out, "xavier", rng))
        return Sequential(layers)

    def _fit(self, X, y_idx):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise SpecError("epochs, batch_size and learning_rate must be positive")
        rng = np.random.default_rng(self.random_state)
        self.network_ = self._build(X.shape[1], self.classes_.shape[0], rng)
        opt = Adam(self.network_.params, lr=self.learning_rate)
        self.loss_curve_ = []
        n = X.shape[0]
        for _ in range(self.epochs):
            order = rng.permutation(n)
            total = 0.0
            for lo in range(0, n, self.batch_size):
                idx = order[lo:lo + self.batch_size]
                logits = self.network_.forward(X[idx], training=True)
                loss, grad = softmax_cross_entropy(logits, y_idx[idx])
                self.network_.backward(grad)
                opt.step(self.network_.grads)
                total += loss * idx.shape[0]
            self.loss_curve_.append(total / n)

    def predict_proba(self, X):
        X = self._check_predict_input(X)
        return softmax(self.network_.forward(X))

    def _scores(self, X):
        return self.network_.forward(X)

    def _get_state(self):
        return ({"network": self.network_.describe(),
                 "loss_curve_": [float(v) for v in self.loss_curve_]},
                {"params": self.network_.get_flat_params()})

    def _set_state(self, meta, arrays):
        self.network_ = Sequential(
            [layer_from_description(d) for d in meta["network"]["layers"]])
        self.network_.set_flat_params(arrays["params"])
        self.loss_curve_ = meta["loss_curve_"]
