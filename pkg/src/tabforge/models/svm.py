"""Soft-margin linear SVM trained by dual coordinate descent."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConvergenceWarning
from .base import Estimator, Param, boolean, choice, integer, real, sigmoid


def _gamma_ok(v) -> bool:
    return v in ("scale", "auto") or real(0.0, lo_open=True)(v)


@njit(cache=True)
def _alm_dcd_kernel(X, y_pm, upper, rho, tol, max_iter, seed):
    n, m = X.shape
    np.random.seed(seed)
    alpha = np.zeros(n)
    w = np.zeros(m)
    s = 0.0  # sum(alpha * y)
    b = 0.0  # multiplier of the equality constraint, i.e. the bias
    qii = np.zeros(n)
    for i in range(n):
        qii[i] = X[i] @ X[i]
    viol = np.inf
    for epoch in range(1, max_iter + 1):
        for i in np.random.permutation(n):
            yi = y_pm[i]
            g = yi * (w @ X[i] + b + rho * s) - 1.0
            ai = alpha[i]
            new = min(max(ai - g / (qii[i] + rho), 0.0), upper[i])
            if new != ai:
                d = new - ai
                w += d * yi * X[i]
                s += d * yi
                alpha[i] = new
        b += rho * s
        viol = abs(s)
        for i in range(n):
            g = y_pm[i] * (w @ X[i] + b) - 1.0
            if alpha[i] == 0.0:
                pg = min(g, 0.0)
            elif alpha[i] == upper[i]:
                pg = max(g, 0.0)
            else:
                pg = g
            viol = max(viol, abs(pg))
        if viol < tol:
            return w, b, alpha, epoch, viol
    return w, b, alpha, max_iter, viol


@dataclass
class SVMFit:
    coef: np.ndarray
    intercept: float
    alpha: np.ndarray
    epochs: int
    converged: bool


def fit_linear_svm(
    X: np.ndarray,
    y_pm: np.ndarray,
    upper: np.ndarray,
    tol: float = 1e-4,
    max_iter: int = 1000,
    seed: int = 0,
) -> SVMFit:
    """Soft-margin linear SVM with an unpenalised bias.

    Solves the dual ``min a'Qa/2 - sum(a)`` subject to ``0 <= a_i <= upper_i``
    and ``sum(a_i y_i) = 0``. The equality constraint is handled by an
    augmented Lagrangian whose multiplier is the bias; each epoch is one sweep
    of dual coordinate descent in a fresh random order followed by a multiplier
    step. Stops once every projected KKT residual and ``|sum(a_i y_i)|`` fall
    below ``tol``; hitting ``max_iter`` epochs emits a :class:`ConvergenceWarning`.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y_pm = np.ascontiguousarray(y_pm, dtype=np.float64)
    upper = np.ascontiguousarray(upper, dtype=np.float64)
    rho = float(np.mean(np.einsum("ij,ij->i", X, X))) + 1.0
    w, b, alpha, epochs, viol = _alm_dcd_kernel(
        X, y_pm, upper, rho, float(tol), int(max_iter), int(seed) % (2**32)
    )
    converged = viol < tol
    if not converged:
        warnings.warn(
            f"linear SVM stopped after {max_iter} epochs (KKT residual {viol:.2e})",
            ConvergenceWarning,
            stacklevel=2,
        )
    return SVMFit(w, float(b), alpha, int(epochs), bool(converged))


class LinearSVM(Estimator):
    """Linear-kernel SVM; the margin is squashed through the logistic function for scoring.

    The bias is left unpenalised. With ``scale`` the solver works on
    standardised columns and the weights are mapped back to the raw feature
    scale. ``gamma`` is accepted for grid compatibility and has no effect with a
    linear kernel.
    """

    kind = "svm_linear"
    params = {
        "C": Param(1.0, real(0.0, lo_open=True), "positive real"),
        "gamma": Param(0.1, _gamma_ok, "'scale', 'auto' or positive real"),
        "class_weight": Param(None, choice(None, "balanced"), "None or 'balanced'"),
        "tol": Param(1e-4, real(0.0, lo_open=True), "positive real"),
        "max_iter": Param(1000, integer(1), "integer >= 1"),
        "scale": Param(True, boolean, "bool"),
    }
    inert_params = ("gamma",)

    def _fit(self, X, y, seed):
        n = X.shape[0]
        y_pm = np.where(y == 1, 1.0, -1.0)
        C = float(self.hyper["C"])
        if self.hyper["class_weight"] == "balanced":
            counts = np.bincount(y, minlength=2)
            upper = C * n / (2.0 * counts[y])
        else:
            upper = np.full(n, C)
        if self.hyper["scale"]:
            center = X.mean(axis=0)
            spread = X.std(axis=0)
            spread[spread == 0] = 1.0
        else:
            center, spread = np.zeros(X.shape[1]), np.ones(X.shape[1])
        res = fit_linear_svm(
            (X - center) / spread, y_pm, upper,
            tol=self.hyper["tol"], max_iter=self.hyper["max_iter"], seed=seed,
        )
        self.coef_ = res.coef / spread
        self.intercept_ = res.intercept - float(self.coef_ @ center)
        self.dual_coef_ = res.alpha
        self.upper_ = upper
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
