"""Least squares, LASSO and (L1/L2) logistic regression solvers and estimators."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceWarning
from .base import Estimator, Param, boolean, choice, integer, real, sigmoid

logger = logging.getLogger(__name__)


# -- logistic regression ---------------------------------------------------------

def logistic_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy of ``sigmoid(X @ w + b)`` against 0/1 labels."""
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def logistic_objective(w, b, X, y, l1: float = 0.0, l2: float = 0.0) -> float:
    """``mean log-loss + l1 * ||w||_1 + l2 / 2 * ||w||^2``; the intercept is never penalised."""
    return logistic_loss(w, b, X, y) + l1 * np.abs(w).sum() + 0.5 * l2 * float(w @ w)


def logistic_gradient(w, b, X, y, l2: float = 0.0) -> tuple[np.ndarray, float]:
    """Gradient of the smooth part (log-loss + L2 term) with respect to ``(w, b)``."""
    r = sigmoid(X @ w + b) - y
    n = X.shape[0]
    return X.T @ r / n + l2 * w, float(r.sum() / n)


def _min_norm_subgradient(gw, gb, w, l1, fit_intercept):
    if l1 > 0:
        sub = np.where(
            w != 0, gw + l1 * np.sign(w), np.sign(gw) * np.maximum(np.abs(gw) - l1, 0.0)
        )
    else:
        sub = gw
    parts = [sub] + ([np.array([gb])] if fit_intercept else [])
    return float(np.linalg.norm(np.concatenate(parts)))


@dataclass
class LogisticFit:
    coef: np.ndarray
    intercept: float
    n_iter: int
    converged: bool
    grad_norm: float


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l1: float = 0.0,
    l2: float = 0.0,
    fit_intercept: bool = True,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> LogisticFit:
    """Minimise :func:`logistic_objective` by (proximal) Newton iterations.

    Each step builds the exact Hessian of the smooth part. With ``l1 == 0`` the
    Newton system is solved directly; otherwise the penalised quadratic model is
    minimised by cyclic coordinate descent. A backtracking line search on the
    true objective guarantees descent. Stops once the minimum-norm subgradient
    drops below ``tol``; hitting ``max_iter`` emits a :class:`ConvergenceWarning`
    and returns the last iterate.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = X.shape
    w = np.zeros(m)
    b = 0.0
    if fit_intercept:
        p0 = np.clip(y.mean(), 1e-12, 1 - 1e-12)
        b = float(np.log(p0 / (1 - p0)))
    Xa = np.hstack([X, np.ones((n, 1))]) if fit_intercept else X
    f = logistic_objective(w, b, X, y, l1, l2)
    gnorm = np.inf
    for it in range(1, max_iter + 1):
        gw, gb = logistic_gradient(w, b, X, y, l2)
        gnorm = _min_norm_subgradient(gw, gb, w, l1, fit_intercept)
        if gnorm < tol:
            return LogisticFit(w, b, it - 1, True, gnorm)
        p = sigmoid(X @ w + b)
        D = p * (1 - p)
        H = (Xa * D[:, None]).T @ Xa / n
        H[:m, :m] += l2 * np.eye(m)
        H[np.diag_indices_from(H)] += 1e-12
        g = np.concatenate([gw, [gb]]) if fit_intercept else gw

        if l1 == 0:
            d = -np.linalg.solve(H, g)
        else:
            d = _prox_newton_direction(H, g, w, l1, m)

        dw = d[:m]
        db = float(d[m]) if fit_intercept else 0.0
        decrease = float(g @ d) + l1 * (np.abs(w + dw).sum() - np.abs(w).sum())
        if decrease >= 0:
            # numerically stationary: no descent direction left
            return LogisticFit(w, b, it, gnorm < 10 * tol, gnorm)
        t = 1.0
        while True:
            w_new, b_new = w + t * dw, b + t * db
            f_new = logistic_objective(w_new, b_new, X, y, l1, l2)
            if f_new <= f + 1e-4 * t * decrease or t < 1e-10:
                break
            t *= 0.5
        w, b, f = w_new, b_new, f_new
    gw, gb = logistic_gradient(w, b, X, y, l2)
    gnorm = _min_norm_subgradient(gw, gb, w, l1, fit_intercept)
    if gnorm >= tol:
        warnings.warn(
            f"logistic solver stopped after {max_iter} iterations (gradient norm {gnorm:.2e})",
            ConvergenceWarning,
            stacklevel=2,
        )
    return LogisticFit(w, b, max_iter, gnorm < tol, gnorm)


def _prox_newton_direction(H, g, w, l1, m, sweeps=500, tol=1e-12):
    """Minimise ``g.d + d.H.d / 2 + l1 * ||w + d_w||_1`` by coordinate descent."""
    k = len(g)
    d = np.zeros(k)
    Hd = np.zeros(k)
    for _ in range(sweeps):
        biggest = 0.0
        for j in range(k):
            hjj = H[j, j]
            grad_j = g[j] + Hd[j]
            if j < m:
                u = w[j] + d[j]
                new_u = np.sign(hjj * u - grad_j) * max(abs(hjj * u - grad_j) - l1, 0.0) / hjj
                delta = new_u - u
            else:
                delta = -grad_j / hjj
            if delta != 0.0:
                d[j] += delta
                Hd += delta * H[:, j]
                biggest = max(biggest, abs(delta))
        if biggest < tol:
            break
    return d


class LogisticRegression(Estimator):
    kind = "logistic"
    params = {
        "penalty": Param("l2", choice("l1", "l2"), "'l1' or 'l2'"),
        "C": Param(1.0, real(0.0, lo_open=True), "positive real"),
        "fit_intercept": Param(True, boolean, "bool"),
        "max_iter": Param(100, integer(1), "integer >= 1"),
        "tol": Param(1e-6, real(0.0, lo_open=True), "positive real"),
    }

    def penalty_strengths(self, n: int) -> tuple[float, float]:
        # C * sum(loss) + penalty, divided through by C * n
        strength = 1.0 / (self.hyper["C"] * n)
        return (strength, 0.0) if self.hyper["penalty"] == "l1" else (0.0, strength)

    def _fit(self, X, y, seed):
        l1, l2 = self.penalty_strengths(X.shape[0])
        res = fit_logistic(
            X, y, l1=l1, l2=l2,
            fit_intercept=self.hyper["fit_intercept"],
            tol=self.hyper["tol"], max_iter=self.hyper["max_iter"],
        )
        self.coef_ = res.coef
        self.intercept_ = res.intercept
        self.converged_ = res.converged

    def decision_function(self, X):
        return self.check_input(X) @ self.coef_ + self.intercept_

    def predict_score(self, X):
        return sigmoid(self.decision_function(X))

    def get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_, "converged": self.converged_}

    def set_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.converged_ = bool(state["converged"])


# -- least squares ----------------------------------------------------------------

def fit_least_squares(
    X: np.ndarray, y: np.ndarray, fit_intercept: bool = True, jitter: float = 1e-10
) -> tuple[np.ndarray, float]:
    """Normal-equations OLS with a small ridge term guarding against rank deficiency."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if fit_intercept:
        x_mean = X.mean(axis=0)
        y_mean = y.mean()
        Xc, yc = X - x_mean, y - y_mean
    else:
        Xc, yc = X, y
    gram = Xc.T @ Xc + jitter * np.eye(X.shape[1])
    beta = np.linalg.solve(gram, Xc.T @ yc)
    intercept = float(y_mean - x_mean @ beta) if fit_intercept else 0.0
    return beta, intercept


class LinearRegression(Estimator):
    """OLS on the 0/1 target, used as a classifier through the clamped prediction."""

    kind = "linear"
    probabilistic = False
    params = {
        "fit_intercept": Param(True, boolean, "bool"),
        "copy_X": Param(True, boolean, "bool"),
    }

    def _fit(self, X, y, seed):
        # copy_X is accepted for grid compatibility; inputs are never mutated here
        self.coef_, self.intercept_ = fit_least_squares(X, y, self.hyper["fit_intercept"])

    def predict_raw(self, X):
        return self.check_input(X) @ self.coef_ + self.intercept_

    def predict_score(self, X):
        return np.clip(self.predict_raw(X), 0.0, 1.0)

    def get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def set_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])


# -- LASSO ----------------------------------------------------------------------

@dataclass
class LassoFit:
    coef: np.ndarray
    intercept: float
    n_iter: int
    converged: bool


def lasso_objective(w, b, X, y, alpha) -> float:
    r = y - X @ w - b
    return float(r @ r) / (2 * len(y)) + alpha * float(np.abs(w).sum())


def fit_lasso(
    X: np.ndarray,
    y: np.ndarray,
    alpha: float,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> LassoFit:
    """Cyclic coordinate descent on ``||y - Xw - b||^2 / (2n) + alpha * ||w||_1``.

    The intercept is unpenalised (handled by centring). Converged once a full
    sweep changes no coefficient by more than ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = X.shape
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    r = y - y_mean
    col_sq = (Xc**2).sum(axis=0) / n
    w = np.zeros(m)
    for sweep in range(1, max_iter + 1):
        biggest = 0.0
        for j in range(m):
            if col_sq[j] == 0.0:
                continue
            old = w[j]
            rho = Xc[:, j] @ r / n + col_sq[j] * old
            new = np.sign(rho) * max(abs(rho) - alpha, 0.0) / col_sq[j]
            if new != old:
                r -= (new - old) * Xc[:, j]
                w[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest <= tol:
            return LassoFit(w, float(y_mean - x_mean @ w), sweep, True)
    warnings.warn(f"lasso stopped after {max_iter} sweeps", ConvergenceWarning, stacklevel=2)
    return LassoFit(w, float(y_mean - x_mean @ w), max_iter, False)


def lasso_null_alpha(X: np.ndarray, y: np.ndarray) -> float:
    """Smallest ``alpha`` at which every LASSO coefficient is exactly zero."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xc = X - X.mean(axis=0)
    return float(np.max(np.abs(Xc.T @ (y - y.mean()))) / len(y))
