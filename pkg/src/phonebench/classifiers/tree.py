"""CART decision trees with Gini impurity."""

import numpy as np

from .._validation import check_random_state
from ..exceptions import SpecError
from .base import BaseClassifier

# gains closer than this count as ties
GAIN_TIE = 1e-12

LEAF = -1


def gini(counts):
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        g = 1.0 - np.sum(counts ** 2, axis=-1) / n ** 2
    return np.where(n > 0, g, 0.0)


def _feature_best(x, onehot, total, parent):
    """Best (gain, threshold) for one feature, or None if it is constant."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    n = xs.shape[0]
    left = np.cumsum(onehot[order], axis=0)[:-1]
    right = total - left
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    weighted = (n_left - np.sum(left ** 2, axis=1) / n_left
                + n_right - np.sum(right ** 2, axis=1) / n_right) / n
    gain = np.where(valid, parent - weighted, -np.inf)
    best = gain.max()
    pos = int(np.argmax(gain >= best - GAIN_TIE))
    lo, hi = xs[pos], xs[pos + 1]
    threshold = lo + (hi - lo) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return best, threshold


def best_split(X, y_idx, n_classes, features=None):
    """Highest-gain split over ``features``; None when no feature varies.

    Ties are broken by the lowest feature index, then the lowest threshold.
    """
    onehot = np.eye(n_classes)[y_idx]
    total = onehot.sum(axis=0)
    parent = float(gini(total))
    features = range(X.shape[1]) if features is None else sorted(features)
    best = None
    for f in features:
        found = _feature_best(X[:, f], onehot, total, parent)
        if found is None:
            continue
        gain, threshold = found
        if best is None or gain > best[2] + GAIN_TIE:
            best = (f, threshold, gain)
    return best


def cart_best_split(X, y, impurity="gini"):
    """Best single split of ``(X, y)``: ``(feature, threshold, gain)`` or None.

    Samples with ``X[:, feature] <= threshold`` go left. ``gain`` is the
    decrease of Gini impurity, weighted by child size.
    """
    if impurity != "gini":
        raise SpecError(f"unsupported impurity {impurity!r}")
    X = np.asarray(X, dtype=np.float64)
    classes, y_idx = np.unique(np.asarray(y), return_inverse=True)
    if X.shape[0] < 2:
        return None
    return best_split(X, y_idx, classes.shape[0])


class Tree:
    """Flat array representation of a fitted tree."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value

    @property
    def node_count(self):
        return self.feature.shape[0]

    @property
    def depth(self):
        depth = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def apply(self, X):
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] != LEAF
        return node

    def predict_proba(self, X):
        counts = self.value[self.apply(X)]
        return counts / counts.sum(axis=1, keepdims=True)

    def arrays(self, prefix=""):
        return {f"{prefix}{k}": getattr(self, k)
                for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        return cls(*(arrays[f"{prefix}{k}"] for k in
                     ("feature", "threshold", "left", "right", "value")))


def build_tree(X, y_idx, n_classes, max_features=None, max_depth=None,
               min_samples_split=2, rng=None):
    """Grow a CART tree depth-first until leaves are pure or unsplittable.

    With ``max_features`` set, each node draws that many candidate features
    at random and keeps drawing from the remaining ones while none of the
    drawn features varies.
    """
    rng = check_random_state(rng)
    n_features = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(np.bincount(y_idx[idx], minlength=n_classes).astype(np.float64))
        return len(feature) - 1

    stack = [(new_node(np.arange(X.shape[0])), np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        counts = value[node]
        if (np.count_nonzero(counts) <= 1 or idx.shape[0] < min_samples_split
                or (max_depth is not None and depth >= max_depth)):
            continue
        Xn, yn = X[idx], y_idx[idx]
        if max_features is None or max_features >= n_features:
            split = best_split(Xn, yn, n_classes)
        else:
            order = rng.permutation(n_features)
            split = None
            for lo in range(0, n_features, max_features):
                split = best_split(Xn, yn, n_classes, order[lo:lo + max_features])
                if split is not None:
                    break
        if split is None:
            continue
        f, thr, _ = split
        mask = Xn[:, f] <= thr
        feature[node], threshold[node] = f, thr
        left_id = new_node(idx[mask])
        right_id = new_node(idx[~mask])
        left[node], right[node] = left_id, right_id
        # right pushed first so the left subtree is numbered first
        stack.append((right_id, idx[~mask], depth + 1))
        stack.append((left_id, idx[mask], depth + 1))
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold),
                np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                np.array(value).reshape(-1, n_classes))


def resolve_max_features(max_features, n_features):
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(np.log2(n_features)))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))
    if int(max_features) < 1:
        raise SpecError("max_features must be positive")
    return int(max_features)


class DecisionTreeClassifier(BaseClassifier):
    """CART tree, grown until leaves are pure by default.

    The tree's generator is seeded with ``[random_state, 0]``, the same
    scheme the random forest uses for its first tree.
    """

    kind = "decision_tree"

    def __init__(self, max_depth=None, max_features=None, min_samples_split=2,
                 random_state=0):
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.random_state = random_state

    def _fit(self, X, y_idx):
        rng = np.random.default_rng([self.random_state, 0])
        self.tree_ = build_tree(
            X, y_idx, self.classes_.shape[0],
            resolve_max_features(self.max_features, X.shape[1]),
            self.max_depth, self.min_samples_split, rng)

    def predict_proba(self, X):
        X = self._check_predict_input(X)
        return self.tree_.predict_proba(X)

    def _scores(self, X):
        return self.tree_.predict_proba(X)

    def _get_state(self):
        return {}, self.tree_.arrays()

    def _set_state(self, meta, arrays):
        self.tree_ = Tree.from_arrays(arrays)
