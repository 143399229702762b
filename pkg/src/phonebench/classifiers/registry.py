"""Named classifier configurations and a functional train/predict API."""

from dataclasses import dataclass, field

from .._validation import check_matrix
from ..exceptions import ConfigError, SpecError
from .forest import RandomForestClassifier
from .logistic import LogisticRegression
from .mlp import DenseNNClassifier
from .svm import SVC
from .tree import DecisionTreeClassifier

# column order of the benchmark grid
KINDS = ("dense_nn", "svm_linear", "svm_rbf", "random_forest", "decision_tree",
         "logreg_l1", "logreg_l2", "logreg_elasticnet")

TITLES = {
    "dense_nn": "Dense NN", "svm_linear": "SVM (linear)", "svm_rbf": "SVM (rbf)",
    "random_forest": "RF", "decision_tree": "DT", "logreg_l1": "LR (L1)",
    "logreg_l2": "LR (L2)", "logreg_elasticnet": "LR (ElasticNet)",
}

PROBABILISTIC = ("dense_nn", "logreg_l1", "logreg_l2", "logreg_elasticnet")

_FACTORIES = {
    "dense_nn": (DenseNNClassifier, {}, True),
    "svm_linear": (SVC, {"kernel": "linear"}, False),
    "svm_rbf": (SVC, {"kernel": "rbf"}, False),
    "random_forest": (RandomForestClassifier, {}, True),
    "decision_tree": (DecisionTreeClassifier, {}, True),
    "logreg_l1": (LogisticRegression, {"penalty": "l1"}, False),
    "logreg_l2": (LogisticRegression, {"penalty": "l2"}, False),
    "logreg_elasticnet": (LogisticRegression, {"penalty": "elasticnet"}, False),
}


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _FACTORIES:
            raise ConfigError(
                f"unknown classifier {self.kind!r}; choose from {', '.join(KINDS)}")

    @property
    def title(self):
        return TITLES[self.kind]


def make_classifier(spec):
    """Unfitted estimator for ``spec`` with its defaults and seed applied."""
    if isinstance(spec, str):
        spec = ModelSpec(spec)
    cls, fixed, seeded = _FACTORIES[spec.kind]
    params = {**fixed, **spec.params}
    if seeded:
        params.setdefault("random_state", spec.seed)
    try:
        return cls(**params)
    except TypeError as exc:
        raise SpecError(f"{spec.kind}: {exc}") from None


def train_classifier(spec, X, y):
    return make_classifier(spec).fit(X, y)


def predict(model, X):
    return model.predict(X)


def predict_proba(model, X):
    if getattr(model, "kind", None) not in PROBABILISTIC:
        raise SpecError(f"{model.kind} does not produce class probabilities")
    check_matrix(X, model.n_features_in_)
    return model.predict_proba(X)
