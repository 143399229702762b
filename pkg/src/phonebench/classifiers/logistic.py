"""Multinomial logistic regression with L1, L2 or elastic-net penalties.

The objective is ``mean cross-entropy + lam * penalty(W)`` with
``lam = 1 / (C * n_samples)``, i.e. the summed loss plus ``penalty / C``.
The intercept is never penalized. L1 and elastic-net use proximal gradient
steps of size ``1 / L`` (exact soft-thresholding, so coefficients can be
exactly zero); L2 uses gradient descent with a backtracking line search.
Both schemes decrease the objective monotonically.
"""

import numpy as np

from ..exceptions import SpecError
from ..neural.network import softmax
from .base import BaseClassifier


def _loss_and_grad(X1, Y, W):
    """Mean softmax cross-entropy over rows; X1 carries a trailing ones column."""
    Z = X1 @ W
    Z -= Z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(Z).sum(axis=1, keepdims=True))
    log_p = Z - log_norm
    n = X1.shape[0]
    loss = -float(np.sum(Y * log_p)) / n
    grad = X1.T @ (np.exp(log_p) - Y) / n
    return loss, grad


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


class LogisticRegression(BaseClassifier):
    """Softmax regression.

    Parameters
    ----------
    penalty : {"l1", "l2", "elasticnet"}
    C : float
        Inverse penalty strength.
    l1_ratio : float
        Elastic-net mixing: ``l1_ratio * |W|_1 + (1 - l1_ratio) / 2 * |W|^2``.
    max_iter : int
    tol : float
        Stop when the largest coefficient change falls below ``tol``.
    """

    def __init__(self, penalty="l2", C=1.0, l1_ratio=0.5, max_iter=1000, tol=1e-6):
        self.penalty = penalty
        self.C = C
        self.l1_ratio = l1_ratio
        self.max_iter = max_iter
        self.tol = tol

    @property
    def kind(self):
        return {"l1": "logreg_l1", "l2": "logreg_l2",
                "elasticnet": "logreg_elasticnet"}.get(self.penalty)

    def _penalty_weights(self):
        if self.penalty == "l1":
            return 1.0, 0.0
        if self.penalty == "l2":
            return 0.0, 1.0
        if self.penalty == "elasticnet":
            if not 0.0 <= self.l1_ratio <= 1.0:
                raise SpecError("l1_ratio must lie in [0, 1]")
            return self.l1_ratio, 1.0 - self.l1_ratio
        raise SpecError(f"unknown penalty {self.penalty!r}")

    def objective(self, X1, Y, W, lam):
        l1, l2 = self._penalty_weights()
        loss, _ = _loss_and_grad(X1, Y, W)
        w = W[:-1]
        return loss + lam * (l1 * np.abs(w).sum() + 0.5 * l2 * np.sum(w * w))

    def _fit(self, X, y_idx):
        if self.C <= 0 or self.max_iter < 1:
            raise SpecError("C and max_iter must be positive")
        l1, l2 = self._penalty_weights()
        n, d = X.shape
        k = self.classes_.shape[0]
        X1 = np.hstack([X, np.ones((n, 1))])
        Y = np.eye(k)[y_idx]
        lam = 1.0 / (self.C * n)
        # Lipschitz bound of the mean cross-entropy gradient
        lipschitz = 0.5 * np.linalg.norm(X1, 2) ** 2 / n
        W = np.zeros((d + 1, k))
        curve = [self.objective(X1, Y, W, lam)]
        step = 1.0 / lipschitz
        for it in range(1, self.max_iter + 1):
            loss, grad = _loss_and_grad(X1, Y, W)
            if l1 == 0.0:
                grad[:-1] += lam * W[:-1]
                W_new, step = self._line_search(X1, Y, W, grad, curve[-1], lam, step)
            else:
                W_new = W - grad / lipschitz
                t = 1.0 / lipschitz
                W_new[:-1] = soft_threshold(W_new[:-1], t * lam * l1) / (1.0 + t * lam * l2)
            delta = np.max(np.abs(W_new - W))
            W = W_new
            curve.append(self.objective(X1, Y, W, lam))
            if delta < self.tol:
                break
        self.n_iter_ = it
        self.loss_curve_ = curve
        self.coef_ = W[:-1].T.copy()
        self.intercept_ = W[-1].copy()

    def _line_search(self, X1, Y, W, grad, f0, lam, step):
        step = min(2.0 * step, 1e6)
        g2 = float(np.sum(grad * grad))
        while True:
            W_new = W - step * grad
            if self.objective(X1, Y, W_new, lam) <= f0 - 0.5 * step * g2 or step < 1e-12:
                return W_new, step
            step *= 0.5

    def decision_function(self, X):
        X = self._check_predict_input(X)
        return X @ self.coef_.T + self.intercept_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def _scores(self, X):
        return X @ self.coef_.T + self.intercept_

    def _get_state(self):
        return ({"n_iter_": self.n_iter_},
                {"coef_": self.coef_, "intercept_": self.intercept_,
                 "loss_curve_": np.asarray(self.loss_curve_)})

    def _set_state(self, meta, arrays):
        self.n_iter_ = meta["n_iter_"]
        self.coef_ = arrays["coef_"]
        self.intercept_ = arrays["intercept_"]
        self.loss_curve_ = list(arrays["loss_curve_"])
