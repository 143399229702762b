"""Kernel SVM trained by SMO, extended to many classes by one-vs-one voting."""

from itertools import combinations

import numpy as np

from ..exceptions import ConvergenceError, SpecError
from .base import BaseClassifier

TAU = 1e-12


def linear_kernel(A, B):
    return A @ B.T


def rbf_kernel(A, B, gamma):
    sq = (np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :]
          - 2.0 * A @ B.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def smo_solve(K, y, C=1.0, tol=1e-3, max_passes=10000):
    """Solve the soft-margin SVM dual for a precomputed kernel.

    Working pairs are chosen as the maximal violating pair; iteration stops
    once the KKT violation ``m - M`` drops below ``tol``.

    Returns ``(alpha, b, n_iter)``; the decision function is
    ``sum_i alpha_i y_i K(x_i, x) + b``. One pass is ``n`` pair updates;
    ConvergenceError is raised once ``max_passes`` passes are used up.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if K.shape != (n, n):
        raise SpecError(f"kernel has shape {K.shape}, expected ({n}, {n})")
    if not np.all(np.abs(y) == 1):
        raise SpecError("SMO labels must be -1 or +1")
    if C <= 0:
        raise SpecError("C must be positive")
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 1/2 a'Qa - e'a
    diag = np.diag(K).copy()
    pos = y > 0
    max_iter = max_passes * n
    for it in range(max_iter + 1):
        yG = -y * G
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, yG, -np.inf)))
        j = int(np.argmin(np.where(low, yG, np.inf)))
        gap = yG[i] - yG[j]
        if gap < tol:
            break
        if it == max_iter:
            raise ConvergenceError(
                "SMO did not converge", {"passes": max_passes, "pair_updates": it,
                                          "kkt_gap": gap, "tol": tol, "n_samples": n})
        Qi = y[i] * y * K[i]
        Qj = y[j] * y * K[j]
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2.0 * Qi[j]
            delta = (-G[i] - G[j]) / max(quad, TAU)
            diff = ai - aj
            ai, aj = ai + delta, aj + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * Qi[j]
            delta = (G[i] - G[j]) / max(quad, TAU)
            total = ai + aj
            ai, aj = ai - delta, aj + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        G += Qi * (ai - alpha[i]) + Qj * (aj - alpha[j])
        alpha[i], alpha[j] = ai, aj
    return alpha, -_rho(alpha, y, G, C), it


def _rho(alpha, y, G, C):
    yG = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yG[free].mean())
    pos = y > 0
    ub_mask = (at_upper & ~pos) | (at_lower & pos)
    lb_mask = (at_upper & pos) | (at_lower & ~pos)
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    if np.isinf(ub) or np.isinf(lb):
        return float(ub if np.isfinite(ub) else lb if np.isfinite(lb) else 0.0)
    return float((ub + lb) / 2.0)


class SVC(BaseClassifier):
    """Support vector classifier with one-vs-one voting.

    Parameters
    ----------
    kernel : {"linear", "rbf"}
    C : float
    gamma : "scale" or float
        RBF width; "scale" is ``1 / (n_features * X.var())``.
    tol : float
        KKT tolerance of the SMO solver.
    max_passes : int
        SMO budget per binary problem, in sweeps of ``n`` pair updates.
    """

    def __init__(self, kernel="rbf", C=1.0, gamma="scale", tol=1e-3, max_passes=10000):
        self.kernel = kernel
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes

    @property
    def kind(self):
        return f"svm_{self.kernel}"

    def _kernel(self, A, B):
        if self.kernel == "linear":
            return linear_kernel(A, B)
        return rbf_kernel(A, B, self.gamma_)

    def _fit(self, X, y_idx):
        if self.kernel not in ("linear", "rbf"):
            raise SpecError(f"unknown kernel {self.kernel!r}")
        if self.C <= 0:
            raise SpecError("C must be positive")
        if self.gamma == "scale":
            var = X.var()
            self.gamma_ = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        else:
            self.gamma_ = float(self.gamma)
        K = self._kernel(X, X)
        n_classes = self.classes_.shape[0]
        pairs = list(combinations(range(n_classes), 2))
        coef = np.zeros((len(pairs), X.shape[0]))
        intercept = np.zeros(len(pairs))
        self.n_iter_ = []
        for p, (a, b) in enumerate(pairs):
            idx = np.flatnonzero((y_idx == a) | (y_idx == b))
            yy = np.where(y_idx[idx] == a, 1.0, -1.0)
            alpha, bias, n_iter = smo_solve(K[np.ix_(idx, idx)], yy, self.C,
                                            self.tol, self.max_passes)
            coef[p, idx] = alpha * yy
            intercept[p] = bias
            self.n_iter_.append(n_iter)
        support = np.flatnonzero(np.any(coef != 0, axis=0))
        self.support_vectors_ = X[support]
        self.dual_coef_ = coef[:, support]
        self.intercept_ = intercept
        self.pairs_ = np.array(pairs, dtype=np.int64).reshape(-1, 2)

    def decision_function(self, X):
        """One column per class pair (a, b), positive when voting for a."""
        X = self._check_predict_input(X)
        return self._kernel(X, self.support_vectors_) @ self.dual_coef_.T + self.intercept_

    def _scores(self, X):
        dec = self._kernel(X, self.support_vectors_) @ self.dual_coef_.T + self.intercept_
        votes = np.zeros((X.shape[0], self.classes_.shape[0]))
        for p, (a, b) in enumerate(self.pairs_):
            wins_a = dec[:, p] >= 0
            votes[:, a] += wins_a
            votes[:, b] += ~wins_a
        return votes

    def _get_state(self):
        meta = {"gamma_": self.gamma_, "n_iter_": list(self.n_iter_)}
        return meta, {"support_vectors_": self.support_vectors_,
                      "dual_coef_": self.dual_coef_, "intercept_": self.intercept_,
                      "pairs_": self.pairs_}

    def _set_state(self, meta, arrays):
        self.gamma_ = meta["gamma_"]
        self.n_iter_ = meta["n_iter_"]
        for name, value in arrays.items():
            setattr(self, name, value)
