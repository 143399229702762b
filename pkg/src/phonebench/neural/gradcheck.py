"""Central finite-difference gradient checks."""

import numpy as np


def relative_error(analytic, numeric, floor=1e-8):
    """max |a - n| / max(|a| + |n|, floor) over all entries."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    return float(np.max(np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), floor)))


def numerical_gradient(f, x, h=1e-5):
    """d f / d x for scalar ``f()`` by perturbing ``x`` in place."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = x[idx]
        x[idx] = old + h
        fp = f()
        x[idx] = old - h
        fm = f()
        x[idx] = old
        grad[idx] = (fp - fm) / (2 * h)
    return grad


def check_layer(layer, x, rng=None, h=1e-5, training=True):
    """Compare a layer's analytic gradients with finite differences.

    The scalar objective is ``sum(forward(x) * w)`` for a fixed random
    ``w``. Returns the worst relative error over the input and all
    parameters.
    """
    rng = np.random.default_rng(rng)
    x = np.array(x, dtype=np.float64)
    out = layer.forward(x, training=training)
    w = rng.standard_normal(out.shape)

    def objective():
        return float(np.sum(layer.forward(x, training=training) * w))

    layer.forward(x, training=training)
    dx = layer.backward(w)
    analytic = [dx] + [g.copy() for g in layer.grads]
    numeric = [numerical_gradient(objective, x, h)]
    numeric += [numerical_gradient(objective, p, h) for p in layer.params]
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))


def check_network(net, x, loss_fn, target, h=1e-5):
    """Worst relative error of ``net``'s parameter gradients under ``loss_fn``."""
    x = np.array(x, dtype=np.float64)

    def objective():
        return loss_fn(net.forward(x, training=True), target)[0]

    _, grad = loss_fn(net.forward(x, training=True), target)
    net.backward(grad)
    analytic = [g.copy() for g in net.grads]
    numeric = [numerical_gradient(objective, p, h) for p in net.params]
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
