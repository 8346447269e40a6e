"""Shared estimator contract and hyperparameter validation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, ClassVar

import numpy as np

from ..errors import InvalidParam, ShapeMismatch, SingleClass


@dataclass(frozen=True)
class Param:
    default: Any
    check: Callable[[Any], bool]
    allowed: str


def choice(*values) -> Callable[[Any], bool]:
    return lambda v: any(v == c and type(v) is type(c) or (v is None and c is None) for c in values)


def integer(lo: int, hi: float = math.inf, none_ok: bool = False) -> Callable[[Any], bool]:
    def check(v):
        if v is None:
            return none_ok
        return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and lo <= v <= hi
    return check


def real(lo: float, hi: float = math.inf, lo_open: bool = False) -> Callable[[Any], bool]:
    def check(v):
        if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
            return False
        v = float(v)
        if not math.isfinite(v):
            return False
        return (v > lo if lo_open else v >= lo) and v <= hi
    return check


def boolean(v) -> bool:
    return isinstance(v, bool)


class Estimator:
    """Base for the nine classifiers.

    Subclasses declare ``kind`` and ``params`` (name -> :class:`Param`), implement
    ``_fit`` and ``predict_score``, and expose their fitted arrays via
    ``get_state``/``set_state`` for JSON round trips.
    """

    kind: ClassVar[str]
    params: ClassVar[dict[str, Param]]
    probabilistic: ClassVar[bool] = True

    def __init__(self, **params):
        self.hyper = self.validate(params)
        self.n_features_: int | None = None

    @classmethod
    def default_params(cls) -> dict[str, Any]:
        return {k: p.default for k, p in cls.params.items()}

    @classmethod
    def validate(cls, params: dict[str, Any]) -> dict[str, Any]:
        out = cls.default_params()
        for name, value in params.items():
            if name not in cls.params:
                raise InvalidParam(name, value, f"one of {sorted(cls.params)} for {cls.kind}")
            spec = cls.params[name]
            if isinstance(value, np.generic):
                value = value.item()
            if not spec.check(value):
                raise InvalidParam(name, value, spec.allowed)
            out[name] = value
        return out

    def fit(self, X: np.ndarray, y: np.ndarray, seed: int = 0) -> "Estimator":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y).astype(np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ShapeMismatch(f"X {X.shape} and y {y.shape} are incompatible")
        if len(np.unique(y)) < 2:
            raise SingleClass(f"{self.kind} needs both classes in the training data")
        self.n_features_ = X.shape[1]
        self._fit(X, y, seed)
        return self

    def _fit(self, X: np.ndarray, y: np.ndarray, seed: int) -> None:
        raise NotImplementedError

    def check_input(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise ShapeMismatch(f"expected {self.n_features_} feature columns, got {X.shape}")
        return X

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def get_state(self) -> dict[str, Any]:
        raise NotImplementedError

    def set_state(self, state: dict[str, Any]) -> None:
        raise NotImplementedError


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
