"""Shared estimator plumbing for the classifiers."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_fitted, check_matrix, check_X_y


class BaseClassifier(ClassifierMixin, BaseEstimator):
    """Label encoding and input checks common to all classifiers.

    Subclasses implement ``_fit(X, y_idx)`` on integer class indices and
    either ``_scores(X)`` (higher is better, one column per class) or
    ``predict_proba``. Ties between classes go to the lowest index of
    ``classes_`` (sorted labels).
    """

    kind = None

    def fit(self, X, y):
        X, y, _ = check_X_y(X, y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        self._fit(X, y_idx)
        return self

    def _check_predict_input(self, X):
        check_fitted(self, "classes_")
        return check_matrix(X, self.n_features_in_)

    def _scores(self, X):
        return self.predict_proba(X)

    def predict(self, X):
        X = self._check_predict_input(X)
        return self.classes_[np.argmax(self._scores(X), axis=1)]

    # persistence hooks: (json-able metadata, {name: ndarray})
    def _get_state(self):
        raise NotImplementedError

    def _set_state(self, meta, arrays):
        raise NotImplementedError
