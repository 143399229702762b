"""Input validation helpers used by the estimators and extractors."""

import numbers

import numpy as np

from .exceptions import DataError, GeometryError, LabelError, NumericError


def check_finite(X, name="X"):
    if not np.all(np.isfinite(X)):
        raise NumericError(f"{name} contains NaN or infinite values")
    return X


def check_matrix(X, n_features=None, name="X", min_samples=1):
    """Return ``X`` as a finite 2-D float64 array.

    Raises GeometryError when the column count differs from ``n_features``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if n_features == 1 else X.reshape(1, -1)
    if X.ndim != 2:
        raise GeometryError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] < min_samples:
        raise DataError(
            f"{name} has {X.shape[0]} rows; at least {min_samples} required")
    if n_features is not None and X.shape[1] != n_features:
        raise GeometryError(
            f"{name} has {X.shape[1]} features, expected {n_features}")
    return check_finite(X, name)


def check_vector(x, length=None, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise GeometryError(f"{name} must be 1-D, got shape {x.shape}")
    if length is not None and x.shape[0] != length:
        raise GeometryError(f"{name} has length {x.shape[0]}, expected {length}")
    return check_finite(x, name)


def check_X_y(X, y, min_samples=2, min_classes=2):
    """Validate a labelled training set; returns (X, y, classes)."""
    X = check_matrix(X, min_samples=min_samples)
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise GeometryError(
            f"y has shape {y.shape}; expected ({X.shape[0]},)")
    classes = np.unique(y)
    if classes.shape[0] < min_classes:
        raise LabelError(
            f"need at least {min_classes} classes, got {classes.shape[0]}")
    return X, y, classes


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.integer)):
        return np.random.default_rng(seed)
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(list(seed))
    raise ValueError(f"cannot seed a generator from {seed!r}")


def check_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        from sklearn.exceptions import NotFittedError
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first")
