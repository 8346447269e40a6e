"""Binary trees stored as flat arrays, plus the two growers used across the model zoo.

``grow_classification_tree`` is CART on a 0/1 target (Gini or entropy) and backs
the decision tree and random forest. ``grow_gradient_tree`` fits leaf weights to
first/second-order loss statistics and backs the boosted ensembles and the
AdaBoost stumps.

Rows with ``x[feature] <= threshold`` go left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numba import njit

LEAF = -1


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.feature == LEAF).sum())

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.n_nodes else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active[r] = self.feature[node[r]] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Tree":
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=float),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["value"], dtype=float),
        )


# -- impurity -----------------------------------------------------------------

def gini(p: np.ndarray | float) -> np.ndarray | float:
    """Gini impurity of a binary node with positive fraction ``p``."""
    return 2.0 * p * (1.0 - p)


def entropy(p: np.ndarray | float) -> np.ndarray | float:
    """Entropy in bits of a binary node with positive fraction ``p``."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return h if h.ndim else float(h)


IMPURITY = {"gini": gini, "entropy": entropy}


@njit(cache=True)
def _impurity(p, criterion):
    if criterion == 0:
        return 2.0 * p * (1.0 - p)
    h = 0.0
    if p > 0.0:
        h -= p * np.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * np.log2(1.0 - p)
    return h


@njit(cache=True)
def _partition(X, idx, start, end, feature, threshold, buf):
    """Stable in-place partition of ``idx[start:end]``; returns the first right position."""
    k = 0
    for i in range(start, end):
        if X[buf[i - start], feature] <= threshold:
            idx[start + k] = buf[i - start]
            k += 1
    r = 0
    for i in range(start, end):
        if X[buf[i - start], feature] > threshold:
            idx[start + k + r] = buf[i - start]
            r += 1
    return start + k


@njit(cache=True)
def _split_node(X, idx, start, end, feature, threshold):
    buf = idx[start:end].copy()
    return _partition(X, idx, start, end, feature, threshold, buf)


@njit(cache=True)
def _grow_cart(X, y, w, criterion, max_depth, min_split, min_leaf, max_features, seed):
    n, m = X.shape
    np.random.seed(seed)
    count = 0
    for i in range(n):
        if w[i] > 0:
            count += 1
    idx = np.empty(count, dtype=np.int64)
    k = 0
    for i in range(n):
        if w[i] > 0:
            idx[k] = i
            k += 1
    cap = 2 * count + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    importance = np.zeros(m)
    st_node = np.empty(cap, dtype=np.int64)
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)

    W0 = 0.0
    P0 = 0.0
    for i in idx:
        W0 += w[i]
        P0 += w[i] * y[i]
    value[0] = P0 / W0
    n_nodes = 1
    sp = 0
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = count
    st_depth[0] = 0
    sp = 1
    xs = np.empty(count)
    while sp > 0:
        sp -= 1
        node = st_node[sp]
        start = st_start[sp]
        end = st_end[sp]
        depth = st_depth[sp]
        W = 0.0
        P = 0.0
        for i in range(start, end):
            W += w[idx[i]]
            P += w[idx[i]] * y[idx[i]]
        if (max_depth >= 0 and depth >= max_depth) or W < min_split:
            continue
        if _impurity(value[node], criterion) <= 0.0:
            continue
        if max_features < m:
            feats = np.sort(np.random.permutation(m)[:max_features])
        else:
            feats = np.arange(m)
        parent = W * _impurity(P / W, criterion)
        best_gain = -np.inf
        best_f = -1
        best_thr = 0.0
        rows = idx[start:end]
        size = end - start
        for f in feats:
            for i in range(size):
                xs[i] = X[rows[i], f]
            order = np.argsort(xs[:size], kind="mergesort")
            cw = 0.0
            cp = 0.0
            f_gain = -np.inf
            f_pos = -1
            for t in range(size - 1):
                r = rows[order[t]]
                cw += w[r]
                cp += w[r] * y[r]
                lo = xs[order[t]]
                hi = xs[order[t + 1]]
                if not lo < hi:
                    continue
                rw = W - cw
                if cw < min_leaf or rw < min_leaf or cw <= 0.0 or rw <= 0.0:
                    continue
                child = cw * _impurity(cp / cw, criterion) + rw * _impurity((P - cp) / rw, criterion)
                g = parent - child
                if g > f_gain:
                    f_gain = g
                    f_pos = t
            if f_pos >= 0 and f_gain > best_gain:
                best_gain = f_gain
                best_f = f
                lo = xs[order[f_pos]]
                hi = xs[order[f_pos + 1]]
                mid = (lo + hi) / 2.0
                best_thr = lo if mid >= hi else mid
        if best_f < 0:
            continue
        mid_pos = _split_node(X, idx, start, end, best_f, best_thr)
        importance[best_f] += max(best_gain, 0.0)
        lw = 0.0
        lp = 0.0
        for i in range(start, mid_pos):
            lw += w[idx[i]]
            lp += w[idx[i]] * y[idx[i]]
        l_node = n_nodes
        r_node = n_nodes + 1
        n_nodes += 2
        value[l_node] = lp / lw
        value[r_node] = (P - lp) / (W - lw)
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = l_node
        right[node] = r_node
        # right pushed first so the left subtree is numbered first (pre-order)
        st_node[sp] = r_node
        st_start[sp] = mid_pos
        st_end[sp] = end
        st_depth[sp] = depth + 1
        sp += 1
        st_node[sp] = l_node
        st_start[sp] = start
        st_end[sp] = mid_pos
        st_depth[sp] = depth + 1
        sp += 1
    return (
        feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
        value[:n_nodes], importance,
    )


def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    criterion: str = "gini",
    max_depth: int | None = None,
    min_samples_split: float = 2,
    min_samples_leaf: float = 1,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Tree, np.ndarray]:
    """Greedy CART growth on a binary target.

    Sample weights act as row multiplicities (so bootstrap counts can be passed
    directly) and the ``min_samples_*`` limits are compared against weight sums.
    When ``max_features`` is set, that many features are drawn without
    replacement at every node. Among equal-gain candidates the lowest feature
    index wins, then the smallest threshold.

    Returns the tree (leaf value = weighted positive fraction) and the per-feature
    total weighted impurity decrease.
    """
    if criterion not in IMPURITY:
        raise ValueError(f"unknown criterion {criterion!r}")
    X = np.ascontiguousarray(X, dtype=float)
    n, m = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    k = m if max_features is None else min(int(max_features), m)
    seed = 0
    if k < m:
        rng = rng if rng is not None else np.random.default_rng(0)
        seed = int(rng.integers(2**31))
    out = _grow_cart(
        X, np.asarray(y, dtype=float), np.ascontiguousarray(w),
        0 if criterion == "gini" else 1,
        -1 if max_depth is None else int(max_depth),
        float(min_samples_split), float(min_samples_leaf), k, seed,
    )
    return Tree(*(np.array(a) for a in out[:5])), np.array(out[5])


# -- gradient trees -------------------------------------------------------------

def soft_threshold(g: np.ndarray | float, alpha: float) -> np.ndarray | float:
    return np.sign(g) * np.maximum(np.abs(g) - alpha, 0.0)


def leaf_weight(G: float, H: float, reg_lambda: float, reg_alpha: float) -> float:
    """Loss-minimising leaf weight ``-T_alpha(G) / (H + lambda)``."""
    denom = H + reg_lambda
    return float(-soft_threshold(G, reg_alpha) / denom) if denom > 0 else 0.0


@njit(cache=True)
def _soft(G, alpha):
    if G > alpha:
        return G - alpha
    if G < -alpha:
        return G + alpha
    return 0.0


@njit(cache=True)
def _leaf_score(G, H, lam, alpha):
    if H + lam <= 0.0:
        return 0.0
    t = _soft(G, alpha)
    return t * t / (H + lam)


@njit(cache=True)
def _leaf_value(G, H, lam, alpha):
    if H + lam <= 0.0:
        return 0.0
    return -_soft(G, alpha) / (H + lam)


@njit(cache=True)
def _beats(gain, best):
    """Strict improvement beyond rounding noise, so equal gains keep the earlier candidate."""
    if best == -np.inf:
        return gain > best
    return gain > best + 1e-12 * max(1.0, abs(best))


@njit(cache=True)
def _best_gradient_split(X, g, h, order, start, end, features, lam, alpha, gamma, mcw):
    """Best (gain, feature, threshold) for the node occupying ``order[:, start:end]``.

    Row ``j`` of ``order`` lists the node's rows sorted by feature ``features[j]``.
    Returns feature -1 when no split has positive gain.
    """
    G = 0.0
    H = 0.0
    for i in range(start, end):
        G += g[order[0, i]]
        H += h[order[0, i]]
    parent = _leaf_score(G, H, lam, alpha)
    best_gain = -np.inf
    best_f = -1
    best_thr = 0.0
    if end - start < 2:
        return best_gain, best_f, best_thr
    for j in range(len(features)):
        f = features[j]
        gl = 0.0
        hl = 0.0
        f_gain = -np.inf
        f_pos = -1
        for t in range(start, end - 1):
            r = order[j, t]
            gl += g[r]
            hl += h[r]
            if not X[r, f] < X[order[j, t + 1], f]:
                continue
            hr = H - hl
            if hl < mcw or hr < mcw or hl <= 0.0 or hr <= 0.0:
                continue
            gain = 0.5 * (_leaf_score(gl, hl, lam, alpha) + _leaf_score(G - gl, hr, lam, alpha) - parent) - gamma
            if _beats(gain, f_gain):
                f_gain = gain
                f_pos = t
        if f_pos >= 0 and f_gain > 0.0 and _beats(f_gain, best_gain):
            best_gain = f_gain
            best_f = f
            lo = X[order[j, f_pos], f]
            hi = X[order[j, f_pos + 1], f]
            mid = (lo + hi) / 2.0
            best_thr = lo if mid >= hi else mid
    return best_gain, best_f, best_thr


@njit(cache=True)
def _partition_sorted(X, order, start, end, feature, threshold, buf):
    """Stably split every row of ``order[:, start:end]`` on one rule; returns the first right position."""
    mid = start
    for j in range(order.shape[0]):
        k = 0
        r = 0
        for i in range(start, end):
            row = order[j, i]
            if X[row, feature] <= threshold:
                order[j, start + k] = row
                k += 1
            else:
                buf[r] = row
                r += 1
        for i in range(r):
            order[j, start + k + i] = buf[i]
        mid = start + k
    return mid


@njit(cache=True)
def _grow_gradient(X, g, h, order, features, max_depth, leafwise, max_leaves, lam, alpha, gamma, mcw):
    n, m = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    importance = np.zeros(m)
    buf = np.empty(n, dtype=np.int64)
    G = 0.0
    H = 0.0
    for i in range(n):
        G += g[i]
        H += h[i]
    value[0] = _leaf_value(G, H, lam, alpha)
    n_nodes = 1

    # pending nodes: (node, start, end, depth) plus a precomputed split for leaf-wise mode
    q_node = np.empty(cap, dtype=np.int64)
    q_start = np.empty(cap, dtype=np.int64)
    q_end = np.empty(cap, dtype=np.int64)
    q_depth = np.empty(cap, dtype=np.int64)
    q_gain = np.empty(cap)
    q_feat = np.empty(cap, dtype=np.int64)
    q_thr = np.empty(cap)
    q_alive = np.zeros(cap, dtype=np.bool_)
    q_len = 0

    q_node[0] = 0
    q_start[0] = 0
    q_end[0] = n
    q_depth[0] = 0
    if leafwise:
        if max_depth < 0 or max_depth > 0:
            gn, fn, tn = _best_gradient_split(X, g, h, order, 0, n, features, lam, alpha, gamma, mcw)
            if fn >= 0:
                q_gain[0] = gn
                q_feat[0] = fn
                q_thr[0] = tn
                q_alive[0] = True
                q_len = 1
    else:
        q_len = 1
    leaves = 1
    while True:
        if leafwise:
            if leaves >= max_leaves:
                break
            pick = -1
            for j in range(q_len):
                if q_alive[j] and (pick < 0 or q_gain[j] > q_gain[pick]):
                    pick = j
            if pick < 0:
                break
            q_alive[pick] = False
            node = q_node[pick]
            start = q_start[pick]
            end = q_end[pick]
            depth = q_depth[pick]
            gain = q_gain[pick]
            f = q_feat[pick]
            thr = q_thr[pick]
        else:
            if q_len == 0:
                break
            q_len -= 1
            node = q_node[q_len]
            start = q_start[q_len]
            end = q_end[q_len]
            depth = q_depth[q_len]
            if (max_depth >= 0 and depth >= max_depth) or end - start < 2:
                continue
            gain, f, thr = _best_gradient_split(X, g, h, order, start, end, features, lam, alpha, gamma, mcw)
            if f < 0:
                continue
        mid = _partition_sorted(X, order, start, end, f, thr, buf)
        importance[f] += gain
        l_node = n_nodes
        r_node = n_nodes + 1
        n_nodes += 2
        leaves += 1
        for child, cs, ce in ((l_node, start, mid), (r_node, mid, end)):
            Gc = 0.0
            Hc = 0.0
            for i in range(cs, ce):
                Gc += g[order[0, i]]
                Hc += h[order[0, i]]
            value[child] = _leaf_value(Gc, Hc, lam, alpha)
        feature[node] = f
        threshold[node] = thr
        left[node] = l_node
        right[node] = r_node
        if leafwise:
            for child, cs, ce in ((l_node, start, mid), (r_node, mid, end)):
                if (max_depth >= 0 and depth + 1 >= max_depth) or ce - cs < 2:
                    continue
                gn, fn, tn = _best_gradient_split(X, g, h, order, cs, ce, features, lam, alpha, gamma, mcw)
                if fn < 0:
                    continue
                q_node[q_len] = child
                q_start[q_len] = cs
                q_end[q_len] = ce
                q_depth[q_len] = depth + 1
                q_gain[q_len] = gn
                q_feat[q_len] = fn
                q_thr[q_len] = tn
                q_alive[q_len] = True
                q_len += 1
        else:
            # right pushed first so the left subtree is expanded (and numbered) first
            q_node[q_len] = r_node
            q_start[q_len] = mid
            q_end[q_len] = end
            q_depth[q_len] = depth + 1
            q_len += 1
            q_node[q_len] = l_node
            q_start[q_len] = start
            q_end[q_len] = mid
            q_depth[q_len] = depth + 1
            q_len += 1
    return (
        feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
        value[:n_nodes], importance,
    )


def column_order(X: np.ndarray) -> np.ndarray:
    """Per-column stable sort order, shape ``(n_features, n_rows)``; reusable across boosting rounds."""
    return np.ascontiguousarray(np.argsort(np.asarray(X, dtype=float), axis=0, kind="stable").T)


def grow_gradient_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    features: np.ndarray | None = None,
    max_depth: int | None = 6,
    num_leaves: int | None = None,
    growth: str = "level",
    reg_lambda: float = 1.0,
    reg_alpha: float = 0.0,
    gamma: float = 0.0,
    min_child_weight: float = 1.0,
    order: np.ndarray | None = None,
) -> tuple[Tree, np.ndarray]:
    """Fit a regression tree to per-row gradients and hessians.

    ``growth="level"`` expands every splittable node down to ``max_depth``;
    ``growth="leaf"`` repeatedly expands the leaf with the largest gain until
    ``num_leaves`` leaves exist (31 when unset), earlier candidates winning gain
    ties. Splits need strictly positive gain after ``gamma``.

    ``order`` is :func:`column_order` of ``X``; pass it when growing many trees
    on the same rows to skip re-sorting.

    Returns the tree (leaf value = optimal weight) and per-feature summed split gain.
    """
    if growth not in ("level", "leaf"):
        raise ValueError(f"unknown growth mode {growth!r}")
    X = np.ascontiguousarray(X, dtype=float)
    m = X.shape[1]
    features = np.arange(m) if features is None else np.sort(np.asarray(features, dtype=np.int64))
    order = column_order(X) if order is None else np.asarray(order, dtype=np.int64)
    out = _grow_gradient(
        X,
        np.ascontiguousarray(grad, dtype=float),
        np.ascontiguousarray(hess, dtype=float),
        np.ascontiguousarray(order[features]),
        features,
        -1 if max_depth is None or max_depth < 0 else int(max_depth),
        growth == "leaf",
        31 if num_leaves is None else int(num_leaves),
        float(reg_lambda), float(reg_alpha), float(gamma), float(min_child_weight),
    )
    return Tree(*(np.array(a) for a in out[:5])), np.array(out[5])
