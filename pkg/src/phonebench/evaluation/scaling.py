"""Per-feature standardization fitted on training rows only."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_fitted, check_matrix


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X):
        X = check_matrix(X, self.mean.shape[0])
        safe = np.where(self.std > 0, self.std, 1.0)
        return np.where(self.std > 0, (X - self.mean) / safe, 0.0)


def fit_scaler(X_train):
    X = check_matrix(X_train, name="X_train")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # a constant column can come out with a rounding-level spread
    std[std <= 1e-12 * np.maximum(np.abs(mean), 1.0)] = 0.0
    return Scaler(mean, std)


def apply_scaler(scaler, X):
    return scaler.apply(X)


class Standardizer(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`fit_scaler`; zero-variance columns map to 0."""

    def fit(self, X, y=None):
        self.scaler_ = fit_scaler(X)
        self.mean_, self.scale_ = self.scaler_.mean, self.scaler_.std
        self.n_features_in_ = self.mean_.shape[0]
        return self

    def transform(self, X):
        check_fitted(self, "scaler_")
        return self.scaler_.apply(X)
