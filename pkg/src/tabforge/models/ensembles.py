"""Tree-based classifiers: CART, random forest, gradient boosting and AdaBoost.R2."""

from __future__ import annotations

import math

import numpy as np

from .base import Estimator, Param, boolean, choice, integer, real, sigmoid
from .tree import Tree, column_order, grow_classification_tree, grow_gradient_tree


def _resolve_max_features(value, m: int) -> int | None:
    if value is None:
        return None
    if value == "sqrt":
        return max(1, int(math.sqrt(m)))
    if value == "log2":
        return max(1, int(math.log2(m))) if m > 1 else 1
    return min(int(value), m)


def _max_features_ok(v) -> bool:
    return v is None or v in ("sqrt", "log2") or integer(1)(v)


class DecisionTree(Estimator):
    kind = "decision_tree"
    params = {
        "criterion": Param("gini", choice("gini", "entropy"), "'gini' or 'entropy'"),
        "max_depth": Param(10, integer(1, none_ok=True), "None or integer >= 1"),
        "min_samples_split": Param(5, integer(2), "integer >= 2"),
        "min_samples_leaf": Param(2, integer(1), "integer >= 1"),
        "max_features": Param(None, _max_features_ok, "None, 'sqrt', 'log2' or integer >= 1"),
    }

    def _fit(self, X, y, seed):
        rng = np.random.default_rng(seed)
        self.tree_, raw = grow_classification_tree(
            X, y,
            criterion=self.hyper["criterion"],
            max_depth=self.hyper["max_depth"],
            min_samples_split=self.hyper["min_samples_split"],
            min_samples_leaf=self.hyper["min_samples_leaf"],
            max_features=_resolve_max_features(self.hyper["max_features"], X.shape[1]),
            rng=rng,
        )
        self.impurity_decrease_ = raw

    def predict_score(self, X):
        return self.tree_.predict(self.check_input(X))

    def get_state(self):
        return {"tree": self.tree_.to_dict(), "impurity_decrease": self.impurity_decrease_.tolist()}

    def set_state(self, state):
        self.tree_ = Tree.from_dict(state["tree"])
        self.impurity_decrease_ = np.asarray(state["impurity_decrease"], dtype=float)


class RandomForest(Estimator):
    """Bagged CART trees with per-split feature subsampling; score = mean leaf fraction."""

    kind = "random_forest"
    params = {
        "n_estimators": Param(100, integer(1), "integer >= 1"),
        "criterion": Param("gini", choice("gini", "entropy"), "'gini' or 'entropy'"),
        "max_depth": Param(10, integer(1, none_ok=True), "None or integer >= 1"),
        "min_samples_split": Param(5, integer(2), "integer >= 2"),
        "min_samples_leaf": Param(2, integer(1), "integer >= 1"),
        "max_features": Param("sqrt", _max_features_ok, "None, 'sqrt', 'log2' or integer >= 1"),
        "bootstrap": Param(True, boolean, "bool"),
    }

    def _fit(self, X, y, seed):
        n, m = X.shape
        rng = np.random.default_rng(seed)
        max_features = _resolve_max_features(self.hyper["max_features"], m)
        self.trees_ = []
        importance = np.zeros(m)
        for _ in range(self.hyper["n_estimators"]):
            if self.hyper["bootstrap"]:
                weight = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(float)
            else:
                weight = None
            tree, raw = grow_classification_tree(
                X, y, weight,
                criterion=self.hyper["criterion"],
                max_depth=self.hyper["max_depth"],
                min_samples_split=self.hyper["min_samples_split"],
                min_samples_leaf=self.hyper["min_samples_leaf"],
                max_features=max_features,
                rng=rng,
            )
            self.trees_.append(tree)
            importance += raw
        self.impurity_decrease_ = importance

    @property
    def feature_importances_(self) -> np.ndarray:
        total = self.impurity_decrease_.sum()
        if total <= 0:
            return np.full_like(self.impurity_decrease_, 1.0 / len(self.impurity_decrease_))
        return self.impurity_decrease_ / total

    def predict_score(self, X):
        X = self.check_input(X)
        return np.mean([t.predict(X) for t in self.trees_], axis=0)

    def get_state(self):
        return {
            "trees": [t.to_dict() for t in self.trees_],
            "impurity_decrease": self.impurity_decrease_.tolist(),
        }

    def set_state(self, state):
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.impurity_decrease_ = np.asarray(state["impurity_decrease"], dtype=float)


class GradientBoosting(Estimator):
    """Second-order gradient boosting of regression trees.

    The logistic objective starts from the base-rate log-odds; every round fits a
    tree to the current gradients/hessians on a column subsample and adds
    ``learning_rate`` times its leaf weights to the raw score.
    """

    kind = "xgboost_like"
    params = {
        "n_estimators": Param(10, integer(0), "integer >= 0"),
        "max_depth": Param(5, integer(1, none_ok=True), "None or integer >= 1"),
        "learning_rate": Param(0.1, real(0.0, lo_open=True), "positive real"),
        "min_child_weight": Param(5.0, real(0.0), "real >= 0"),
        "colsample_bytree": Param(0.3, real(0.0, 1.0, lo_open=True), "real in (0, 1]"),
        "reg_alpha": Param(10.0, real(0.0), "real >= 0"),
        "reg_lambda": Param(1.0, real(0.0), "real >= 0"),
        "gamma": Param(0.0, real(0.0), "real >= 0"),
        "objective": Param("logistic", choice("logistic", "squared_error"), "'logistic' or 'squared_error'"),
        "growth": Param("level", choice("level", "leaf"), "'level' or 'leaf'"),
        "num_leaves": Param(None, integer(2, none_ok=True), "None or integer >= 2"),
    }

    def _loss(self, raw, y):
        if self.hyper["objective"] == "logistic":
            return float(np.mean(np.logaddexp(0.0, raw) - y * raw))
        return float(np.mean((raw - y) ** 2) / 2)

    def _fit(self, X, y, seed):
        n, m = X.shape
        rng = np.random.default_rng(seed)
        yf = y.astype(float)
        logistic = self.hyper["objective"] == "logistic"
        if logistic:
            p = np.clip(yf.mean(), 1e-12, 1 - 1e-12)
            self.base_score_ = float(np.log(p / (1 - p)))
        else:
            self.base_score_ = float(yf.mean())
        raw = np.full(n, self.base_score_)
        k = max(1, int(self.hyper["colsample_bytree"] * m))
        lr = self.hyper["learning_rate"]
        self.trees_ = []
        self.gain_ = np.zeros(m)
        self.loss_trace_ = [self._loss(raw, yf)]
        order = column_order(X)
        for _ in range(self.hyper["n_estimators"]):
            if logistic:
                prob = sigmoid(raw)
                grad, hess = prob - yf, prob * (1 - prob)
            else:
                grad, hess = raw - yf, np.ones(n)
            cols = np.sort(rng.choice(m, size=k, replace=False)) if k < m else None
            tree, gain = grow_gradient_tree(
                X, grad, hess, cols,
                max_depth=self.hyper["max_depth"],
                num_leaves=self.hyper["num_leaves"],
                growth=self.hyper["growth"],
                reg_lambda=self.hyper["reg_lambda"],
                reg_alpha=self.hyper["reg_alpha"],
                gamma=self.hyper["gamma"],
                min_child_weight=self.hyper["min_child_weight"],
                order=order,
            )
            self.trees_.append(tree)
            self.gain_ += gain
            raw = raw + lr * tree.predict(X)
            self.loss_trace_.append(self._loss(raw, yf))

    def decision_function(self, X):
        X = self.check_input(X)
        raw = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            raw += self.hyper["learning_rate"] * tree.predict(X)
        return raw

    def predict_score(self, X):
        raw = self.decision_function(X)
        if self.hyper["objective"] == "logistic":
            return sigmoid(raw)
        return np.clip(raw, 0.0, 1.0)

    @property
    def feature_importances_(self) -> np.ndarray:
        total = self.gain_.sum()
        if total <= 0:
            return np.full_like(self.gain_, 1.0 / len(self.gain_))
        return self.gain_ / total

    def get_state(self):
        return {
            "base_score": self.base_score_,
            "trees": [t.to_dict() for t in self.trees_],
            "gain": self.gain_.tolist(),
            "loss_trace": list(self.loss_trace_),
        }

    def set_state(self, state):
        self.base_score_ = float(state["base_score"])
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.gain_ = np.asarray(state["gain"], dtype=float)
        self.loss_trace_ = list(state["loss_trace"])


def weighted_median(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Row-wise weighted median: the smallest value whose cumulative weight reaches half the total.

    ``values`` is ``(n_rows, n_learners)``; ``weights`` has one entry per learner.
    """
    values = np.atleast_2d(values)
    order = np.argsort(values, axis=1, kind="stable")
    cum = np.cumsum(np.asarray(weights)[order], axis=1)
    pick = (cum >= 0.5 * cum[:, -1:]).argmax(axis=1)
    rows = np.arange(values.shape[0])
    return values[rows, order[rows, pick]]


class AdaBoostR(Estimator):
    """AdaBoost.R2 over weighted regression stumps on the 0/1 target.

    ``predict_score`` is the learner-weighted mean of stump outputs (clamped to
    [0, 1]); ``predict_median`` gives the classical weighted-median regression output.
    """

    kind = "adaboost_r"
    probabilistic = False
    params = {
        "n_estimators": Param(100, integer(1), "integer >= 1"),
        "learning_rate": Param(0.01, real(0.0, lo_open=True), "positive real"),
        "loss": Param("linear", choice("linear", "square", "exponential"), "'linear', 'square' or 'exponential'"),
    }

    def _fit(self, X, y, seed):
        n = X.shape[0]
        yf = y.astype(float)
        lr = self.hyper["learning_rate"]
        w = np.full(n, 1.0 / n)
        self.stumps_: list[Tree] = []
        self.learner_weights_: list[float] = []
        self.weight_sums_: list[float] = []
        order = column_order(X)
        for t in range(self.hyper["n_estimators"]):
            stump, _ = grow_gradient_tree(
                X, -w * yf, w, max_depth=1, reg_lambda=0.0, reg_alpha=0.0, min_child_weight=0.0, order=order
            )
            err = np.abs(stump.predict(X) - yf)
            worst = err.max()
            if worst <= 0:
                # perfect fit: keep it and stop
                self.stumps_.append(stump)
                self.learner_weights_.append(1.0)
                self.weight_sums_.append(float(w.sum()))
                break
            loss = err / worst
            if self.hyper["loss"] == "square":
                loss = loss**2
            elif self.hyper["loss"] == "exponential":
                loss = 1.0 - np.exp(-loss)
            avg = float(w @ loss)
            if avg >= 0.5:
                if not self.stumps_:
                    self.stumps_.append(stump)
                    self.learner_weights_.append(1.0)
                    self.weight_sums_.append(float(w.sum()))
                break
            beta = avg / (1.0 - avg)
            self.stumps_.append(stump)
            self.learner_weights_.append(lr * math.log(1.0 / beta))
            w = w * np.power(beta, (1.0 - loss) * lr)
            w /= w.sum()
            self.weight_sums_.append(float(w.sum()))
        self.learner_weights_ = [float(v) for v in self.learner_weights_]

    def _outputs(self, X):
        X = self.check_input(X)
        return np.column_stack([s.predict(X) for s in self.stumps_])

    def predict_score(self, X):
        out = self._outputs(X)
        wts = np.asarray(self.learner_weights_)
        return np.clip((out * wts).sum(axis=1) / wts.sum(), 0.0, 1.0)

    def predict_median(self, X):
        return weighted_median(self._outputs(X), np.asarray(self.learner_weights_))

    def get_state(self):
        return {
            "stumps": [s.to_dict() for s in self.stumps_],
            "learner_weights": self.learner_weights_,
        }

    def set_state(self, state):
        self.stumps_ = [Tree.from_dict(s) for s in state["stumps"]]
        self.learner_weights_ = [float(v) for v in state["learner_weights"]]
