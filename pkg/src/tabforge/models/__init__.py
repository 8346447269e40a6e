"""Nine from-scratch binary classifiers behind one fit/predict/score contract."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from ..errors import InvalidParam, ShapeMismatch
from ..table import EncodedMatrix
from .base import Estimator
from .ensembles import AdaBoostR, DecisionTree, GradientBoosting, RandomForest
from .linear import LinearRegression, LogisticRegression
from .naive_bayes import GaussianNB
from .neighbors import KNN
from .svm import LinearSVM


class ModelKind(str, Enum):
    XGBOOST_LIKE = "xgboost_like"
    RANDOM_FOREST = "random_forest"
    KNN = "knn"
    SVM_LINEAR = "svm_linear"
    ADABOOST_R = "adaboost_r"
    GAUSSIAN_NB = "gaussian_nb"
    LOGISTIC = "logistic"
    LINEAR = "linear"
    DECISION_TREE = "decision_tree"


MODEL_REGISTRY: dict[str, type[Estimator]] = {
    cls.kind: cls
    for cls in (
        GradientBoosting,
        RandomForest,
        KNN,
        LinearSVM,
        AdaBoostR,
        GaussianNB,
        LogisticRegression,
        LinearRegression,
        DecisionTree,
    )
}

ALL_KINDS: tuple[str, ...] = tuple(k.value for k in ModelKind)


def register_model(cls: type[Estimator]) -> type[Estimator]:
    """Make an extra estimator class available to ``fit`` and the evaluation engine."""
    MODEL_REGISTRY[cls.kind] = cls
    return cls


def estimator_class(kind: str | ModelKind) -> type[Estimator]:
    key = kind.value if isinstance(kind, ModelKind) else kind
    try:
        return MODEL_REGISTRY[key]
    except KeyError:
        raise InvalidParam("kind", kind, f"one of {sorted(MODEL_REGISTRY)}") from None


def default_params(kind: str | ModelKind) -> dict[str, Any]:
    return estimator_class(kind).default_params()


def effective_params(kind: str | ModelKind, params: dict[str, Any]) -> dict[str, Any]:
    """Validated params minus those the estimator ignores (used to share CV results)."""
    cls = estimator_class(kind)
    full = cls.validate(params)
    for name in getattr(cls, "inert_params", ()):
        full.pop(name, None)
    return full


@dataclass
class TrainedModel:
    kind: str
    params: dict[str, Any]
    estimator: Estimator
    feature_names: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n_features(self) -> int:
        return int(self.estimator.n_features_)

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "params": self.params,
            "feature_names": list(self.feature_names),
            "n_features": self.n_features,
            "state": self.estimator.get_state(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        doc = json.loads(text)
        est = estimator_class(doc["kind"])(**doc["params"])
        est.n_features_ = int(doc["n_features"])
        est.set_state(doc["state"])
        return cls(doc["kind"], est.hyper, est, tuple(doc["feature_names"]))


def fit(
    kind: str | ModelKind,
    matrix: EncodedMatrix | tuple[np.ndarray, np.ndarray],
    params: dict[str, Any] | None = None,
    seed: int = 0,
) -> TrainedModel:
    """Fit a classifier of ``kind``; ``matrix`` may be an :class:`EncodedMatrix` or ``(X, y)``."""
    if isinstance(matrix, EncodedMatrix):
        X, y, names = matrix.features, matrix.target, matrix.feature_names
    else:
        X, y = matrix
        names = tuple(f"x{j}" for j in range(np.asarray(X).shape[1]))
    cls = estimator_class(kind)
    est = cls(**(params or {}))
    est.fit(X, y, seed=seed)
    return TrainedModel(cls.kind, est.hyper, est, tuple(names))


def _features(model: TrainedModel, X) -> np.ndarray:
    X = X.features if isinstance(X, EncodedMatrix) else np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} columns, got shape {X.shape}")
    return X


def predict_score(model: TrainedModel, X) -> np.ndarray:
    return model.estimator.predict_score(_features(model, X))


def predict(model: TrainedModel, X) -> np.ndarray:
    return (predict_score(model, X) >= 0.5).astype(np.int64)


__all__ = [
    "ALL_KINDS",
    "AdaBoostR",
    "DecisionTree",
    "Estimator",
    "GaussianNB",
    "GradientBoosting",
    "KNN",
    "LinearRegression",
    "LinearSVM",
    "LogisticRegression",
    "MODEL_REGISTRY",
    "ModelKind",
    "RandomForest",
    "TrainedModel",
    "default_params",
    "effective_params",
    "estimator_class",
    "fit",
    "predict",
    "predict_score",
    "register_model",
]
