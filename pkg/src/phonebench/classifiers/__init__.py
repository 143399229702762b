"""From-scratch classifiers with an sklearn-compatible interface."""

from .forest import RandomForestClassifier
from .logistic import LogisticRegression
from .mlp import DenseNNClassifier
from .persistence import load_model, save_model
from .registry import (KINDS, TITLES, ModelSpec, make_classifier, predict,
                       predict_proba, train_classifier)
from .svm import SVC, smo_solve
from .tree import DecisionTreeClassifier, best_split, cart_best_split

__all__ = [
    "KINDS", "SVC", "TITLES", "DecisionTreeClassifier", "DenseNNClassifier",
    "LogisticRegression", "ModelSpec", "RandomForestClassifier", "best_split",
    "cart_best_split", "load_model", "make_classifier", "predict",
    "predict_proba", "save_model", "smo_solve", "train_classifier",
]
