"""Confusion counts, threshold metrics and rank-based ROC analysis."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import EmptyMatrix, LengthMismatch, NonBinaryValue, SingleClass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: ConfusionMatrix
    roc_auc: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["confusion"] = asdict(self.confusion)
        return d


def _binary(name: str, values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be one-dimensional")
    if not np.isin(arr, (0, 1)).all():
        raise NonBinaryValue(f"{name} contains values other than 0 and 1")
    return arr.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t = _binary("y_true", y_true)
    p = _binary("y_pred", y_pred)
    if len(t) != len(p):
        raise LengthMismatch(f"y_true has {len(t)} entries, y_pred has {len(p)}")
    return ConfusionMatrix(
        tp=int(((t == 1) & (p == 1)).sum()),
        fp=int(((t == 0) & (p == 1)).sum()),
        fn=int(((t == 1) & (p == 0)).sum()),
        tn=int(((t == 0) & (p == 0)).sum()),
    )


def metrics(cm: ConfusionMatrix, roc_auc: float | None = None) -> MetricsReport:
    """Accuracy, precision, recall and F1 (harmonic mean); empty denominators give 0."""
    if cm.total <= 0:
        raise EmptyMatrix("confusion matrix has no entries")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(accuracy, precision, recall, f1, cm, roc_auc)


def _check_scores(y_true, scores) -> tuple[np.ndarray, np.ndarray]:
    y = _binary("y_true", y_true)
    s = np.asarray(scores, dtype=float)
    if s.shape != y.shape:
        raise LengthMismatch(f"y_true has {len(y)} entries, scores has {s.shape}")
    if y.min(initial=1) == y.max(initial=0):
        raise SingleClass("ROC analysis needs both classes")
    return y, s


def roc_auc(y_true, scores) -> float:
    """Probability that a random positive outscores a random negative; ties count one half."""
    y, s = _check_scores(y_true, scores)
    ranks = rankdata(s)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def to_csv(self) -> str:
        lines = ["fpr,tpr,threshold"]
        for f, t, th in zip(self.fpr, self.tpr, self.thresholds):
            lines.append(f"{float(f)!r},{float(t)!r},{float(th)!r}")
        return "\n".join(lines) + "\n"

    def area(self) -> float:
        return float(np.sum(np.diff(self.fpr) * (self.tpr[1:] + self.tpr[:-1]) / 2))


def roc_curve(y_true, scores) -> RocCurve:
    """One point per distinct score (predict positive when ``score >= threshold``).

    The curve starts at ``(0, 0)`` with threshold ``inf`` and ends at ``(1, 1)``.
    """
    y, s = _check_scores(y_true, scores)
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    last = np.r_[np.flatnonzero(s_sorted[1:] != s_sorted[:-1]), len(s) - 1]
    tps = np.cumsum(y_sorted)[last]
    fps = (last + 1) - tps
    n_pos = y.sum()
    fpr = np.r_[0.0, fps / (len(y) - n_pos)]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, s_sorted[last]]
    return RocCurve(fpr, tpr, thresholds)
