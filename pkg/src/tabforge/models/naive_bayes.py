"""Gaussian naive Bayes with log-space posteriors."""

from __future__ import annotations

import numpy as np

from .base import Estimator, Param, real


def _priors_ok(v) -> bool:
    if v is None:
        return True
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        return False
    return arr.shape == (2,) and (arr >= 0).all() and abs(arr.sum() - 1.0) < 1e-9


class GaussianNB(Estimator):
    kind = "gaussian_nb"
    params = {
        "var_smoothing": Param(1e-8, real(0.0), "real >= 0"),
        "priors": Param(None, _priors_ok, "None or two non-negative class priors summing to 1"),
    }

    def _fit(self, X, y, seed):
        self.theta_ = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
        self.epsilon_ = float(self.hyper["var_smoothing"] * np.var(X, axis=0).max())
        var = np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + self.epsilon_
        # fully degenerate columns would otherwise divide by zero
        self.var_ = np.where(var > 0, var, 1e-12)
        if self.hyper["priors"] is None:
            self.class_prior_ = np.bincount(y, minlength=2) / len(y)
        else:
            self.class_prior_ = np.asarray(self.hyper["priors"], dtype=float)

    def joint_log_likelihood(self, X):
        X = self.check_input(X)
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.class_prior_)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            ll = -0.5 * np.log(2 * np.pi * self.var_[c]).sum()
            ll = ll - 0.5 * (((X - self.theta_[c]) ** 2) / self.var_[c]).sum(axis=1)
            out[:, c] = log_prior[c] + ll
        return out

    def predict_score(self, X):
        jll = self.joint_log_likelihood(X)
        top = jll.max(axis=1, keepdims=True)
        post = np.exp(jll - top)
        return post[:, 1] / post.sum(axis=1)

    def get_state(self):
        return {
            "theta": self.theta_.tolist(),
            "var": self.var_.tolist(),
            "class_prior": self.class_prior_.tolist(),
            "epsilon": self.epsilon_,
        }

    def set_state(self, state):
        self.theta_ = np.asarray(state["theta"], dtype=float)
        self.var_ = np.asarray(state["var"], dtype=float)
        self.class_prior_ = np.asarray(state["class_prior"], dtype=float)
        self.epsilon_ = float(state["epsilon"])
