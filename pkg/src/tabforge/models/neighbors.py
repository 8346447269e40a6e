"""Exact k-nearest-neighbour classifier."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParam
from .base import Estimator, Param, choice, integer

_CHUNK_ELEMENTS = 4_000_000


def pairwise_distance(Q: np.ndarray, X: np.ndarray, p: int) -> np.ndarray:
    diff = Q[:, None, :] - X[None, :, :]
    if p == 1:
        return np.abs(diff).sum(axis=2)
    return np.sqrt((diff * diff).sum(axis=2))


def nearest(D: np.ndarray, k: int) -> np.ndarray:
    """Column indices of the ``k`` smallest entries per row of ``D``.

    Ordered by distance, ties broken by lower column index.
    """
    b, n = D.shape
    if k >= n:
        return np.argsort(D, axis=1, kind="stable")
    kth = np.partition(D, k - 1, axis=1)[:, k - 1:k]
    less = D < kth
    tie = D == kth
    need = k - less.sum(axis=1, keepdims=True)
    chosen = less | (tie & (np.cumsum(tie, axis=1) <= need))
    cols = np.nonzero(chosen)[1].reshape(b, k)
    d = np.take_along_axis(D, cols, axis=1)
    return np.take_along_axis(cols, np.argsort(d, axis=1, kind="stable"), axis=1)


class KNN(Estimator):
    kind = "knn"
    params = {
        "n_neighbors": Param(5, integer(1), "integer >= 1"),
        "weights": Param("uniform", choice("uniform", "distance"), "'uniform' or 'distance'"),
        "p": Param(1, choice(1, 2), "1 (Manhattan) or 2 (Euclidean)"),
    }

    def _fit(self, X, y, seed):
        if self.hyper["n_neighbors"] > X.shape[0]:
            raise InvalidParam(
                "n_neighbors", self.hyper["n_neighbors"], f"at most the {X.shape[0]} training rows"
            )
        self.X_ = X.copy()
        self.y_ = y.astype(float)

    def kneighbors(self, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Neighbour indices and distances for each query row."""
        Q = self.check_input(Q)
        k = self.hyper["n_neighbors"]
        n, m = self.X_.shape
        step = max(1, _CHUNK_ELEMENTS // max(1, n * max(m, 1)))
        idx_parts, dist_parts = [], []
        for start in range(0, Q.shape[0], step):
            D = pairwise_distance(Q[start:start + step], self.X_, self.hyper["p"])
            idx = nearest(D, k)
            idx_parts.append(idx)
            dist_parts.append(np.take_along_axis(D, idx, axis=1))
        if not idx_parts:
            return np.empty((0, k), dtype=np.int64), np.empty((0, k))
        return np.vstack(idx_parts), np.vstack(dist_parts)

    def predict_score(self, X):
        idx, dist = self.kneighbors(X)
        labels = self.y_[idx]
        if self.hyper["weights"] == "uniform":
            return labels.mean(axis=1)
        zero = dist == 0
        exact = zero.any(axis=1)
        with np.errstate(divide="ignore"):
            inv = np.where(zero, 0.0, 1.0 / dist)
        score = np.empty(len(idx))
        if (~exact).any():
            score[~exact] = (inv[~exact] * labels[~exact]).sum(1) / inv[~exact].sum(1)
        if exact.any():
            z = zero[exact]
            score[exact] = (z * labels[exact]).sum(1) / z.sum(1)
        return score

    def get_state(self):
        return {"X": self.X_.tolist(), "y": self.y_.tolist()}

    def set_state(self, state):
        self.X_ = np.asarray(state["X"], dtype=float).reshape(-1, self.n_features_)
        self.y_ = np.asarray(state["y"], dtype=float)
