"""Accuracy, confusion matrices and subgroup aggregation."""

import numpy as np

from ..dataset.inventory import SILENCE, SUBGROUPS
from ..exceptions import DataError, LabelError


def confusion_matrix(y_true, y_pred, classes):
    """Counts with rows = true class, columns = predicted class."""
    classes = list(classes)
    index = {c: i for i, c in enumerate(classes)}
    try:
        t = np.array([index[v] for v in y_true], dtype=np.int64)
        p = np.array([index[v] for v in y_pred], dtype=np.int64)
    except KeyError as exc:
        raise LabelError(f"label {exc.args[0]!r} is not in the class list") from None
    if t.shape != p.shape:
        raise DataError("y_true and y_pred differ in length")
    k = len(classes)
    return np.bincount(t * k + p, minlength=k * k).reshape(k, k)


def accuracy(confusion):
    confusion = np.asarray(confusion)
    total = confusion.sum()
    if total == 0:
        raise DataError("accuracy of an empty confusion matrix")
    return float(np.trace(confusion) / total)


def per_class_accuracy(confusion, classes):
    """Recall per true class; None where the class has no support."""
    confusion = np.asarray(confusion)
    support = confusion.sum(axis=1)
    return {str(c): (float(confusion[i, i] / support[i]) if support[i] else None)
            for i, c in enumerate(classes)}


def _micro(confusion, rows):
    support = confusion[rows].sum()
    if support == 0:
        return None
    return float(confusion[rows, rows].sum() / support)


def subgroup_accuracy(confusion, inventory, classes=None):
    """Micro accuracy over samples whose true label falls in each group.

    Keys are ``"vowel"``, ``"consonant"`` and ``"<category>/<subgroup>"``,
    plus ``"silence"``. Groups with no support map to None.
    """
    confusion = np.asarray(confusion)
    classes = list(inventory.labels if classes is None else classes)
    if confusion.shape != (len(classes), len(classes)):
        raise DataError("confusion matrix does not match the class list")
    pos = {c: i for i, c in enumerate(classes)}

    def rows_for(category, subgroup=None):
        return np.array([pos[c] for c in inventory.labels_in(category, subgroup)
                         if c in pos], dtype=np.int64)

    out = {}
    for category, subgroups in SUBGROUPS.items():
        if category == SILENCE:
            continue
        out[category] = _micro(confusion, rows_for(category))
        for sub in subgroups:
            out[f"{category}/{sub}"] = _micro(confusion, rows_for(category, sub))
    out[SILENCE] = _micro(confusion, rows_for(SILENCE))
    return out


def chance_baseline(classes):
    """Accuracy of uniform guessing; ``classes`` is a count or a collection."""
    n_classes = classes if isinstance(classes, (int, np.integer)) else len(classes)
    if n_classes < 1:
        raise DataError("need at least one class")
    return 1.0 / n_classes
