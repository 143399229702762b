"""Stratified k-fold assignment."""

import warnings
from dataclasses import dataclass

import numpy as np

from .._validation import check_random_state
from ..exceptions import DataError, SmallClassWarning


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Fold index per sample. ``small_classes`` lists labels with fewer than k samples."""

    assignment: np.ndarray
    k: int
    seed: int
    small_classes: tuple = ()

    def __len__(self):
        return self.k

    def __iter__(self):
        return iter(self.splits())

    def __eq__(self, other):
        return (isinstance(other, FoldPlan) and self.k == other.k
                and np.array_equal(self.assignment, other.assignment))

    def test_indices(self, fold):
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignment != fold)

    def splits(self):
        return [(self.train_indices(f), self.test_indices(f)) for f in range(self.k)]

    def fold_sizes(self):
        return np.bincount(self.assignment, minlength=self.k)


def stratified_folds(y, k=5, seed=0):
    """Shuffle each class with ``seed`` and deal its samples round-robin.

    Classes are visited in sorted label order. Dealing resumes at the fold
    after the one that received the previous class's last sample, which
    keeps overall fold sizes within one of each other as well.
    """
    y = np.asarray(y)
    if y.ndim != 1:
        raise DataError("labels must be 1-D")
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise DataError(f"k must be an integer >= 2, got {k!r}")
    n = y.shape[0]
    if n < k:
        raise DataError(f"{n} samples cannot fill {k} folds")
    rng = check_random_state(seed)
    classes, y_idx = np.unique(y, return_inverse=True)
    assignment = np.empty(n, dtype=np.int64)
    small = []
    offset = 0
    for c, label in enumerate(classes):
        members = rng.permutation(np.flatnonzero(y_idx == c))
        assignment[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
        if members.size < k:
            small.append(str(label))
    if small:
        warnings.warn(
            f"classes with fewer than {k} samples leave some folds without them: "
            + ", ".join(small), SmallClassWarning, stacklevel=2)
    return FoldPlan(assignment, int(k), seed, tuple(small))
