"""Random forest of CART trees."""

import numpy as np

from .base import BaseClassifier
from .tree import Tree, build_tree, resolve_max_features


class RandomForestClassifier(BaseClassifier):
    """Bagged CART trees with per-split feature subsampling.

    Tree ``t`` draws its bootstrap sample and feature subsets from
    ``numpy.random.default_rng([random_state, t])``, so each tree depends
    only on the run seed and its index. Predictions average the trees'
    leaf class frequencies.
    """

    kind = "random_forest"

    def __init__(self, n_estimators=100, max_features="sqrt", bootstrap=True,
                 max_depth=None, min_samples_split=2, random_state=0):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.random_state = random_state

    def _fit(self, X, y_idx):
        n = X.shape[0]
        n_classes = self.classes_.shape[0]
        max_features = resolve_max_features(self.max_features, X.shape[1])
        self.estimators_ = []
        for t in range(self.n_estimators):
            rng = np.random.default_rng([self.random_state, t])
            idx = rng.integers(0, n, n) if self.bootstrap else np.arange(n)
            self.estimators_.append(build_tree(
                X[idx], y_idx[idx], n_classes, max_features, self.max_depth,
                self.min_samples_split, rng))

    def predict_proba(self, X):
        X = self._check_predict_input(X)
        return self._scores(X)

    def _scores(self, X):
        proba = np.zeros((X.shape[0], self.classes_.shape[0]))
        for tree in self.estimators_:
            proba += tree.predict_proba(X)
        return proba / len(self.estimators_)

    def _get_state(self):
        arrays = {}
        for t, tree in enumerate(self.estimators_):
            arrays.update(tree.arrays(prefix=f"tree{t}."))
        return {"n_trees": len(self.estimators_)}, arrays

    def _set_state(self, meta, arrays):
        self.estimators_ = [Tree.from_arrays(arrays, prefix=f"tree{t}.")
                            for t in range(meta["n_trees"])]
