"""Vote fusion across selector verdicts."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import VerdictShapeMismatch
from .verdict import SelectorVerdict


@dataclass(frozen=True)
class VoteTally:
    feature_names: tuple[str, ...]
    selectors: tuple[str, ...]
    decisions: np.ndarray  # features x selectors, boolean
    min_votes: int = 4

    @property
    def votes(self) -> np.ndarray:
        return self.decisions.sum(axis=1).astype(np.int64)

    @property
    def kept(self) -> list[str]:
        """Features with at least ``min_votes`` votes, in tally order."""
        votes = dict(zip(self.feature_names, self.votes))
        return [n for n in self.order() if votes[n] >= self.min_votes]

    def order(self) -> list[str]:
        """Feature names by votes descending, then name ascending."""
        pairs = sorted(zip(self.feature_names, self.votes), key=lambda p: (-p[1], p[0]))
        return [name for name, _ in pairs]

    def rows(self) -> list[tuple[str, list[bool], int]]:
        index = {n: i for i, n in enumerate(self.feature_names)}
        out = []
        for name in self.order():
            i = index[name]
            out.append((name, [bool(v) for v in self.decisions[i]], int(self.votes[i])))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if not self.selectors:
            writer.writerow(["SL", "Feature", "Total"])
            return buf.getvalue()
        writer.writerow(["SL", "Feature", *self.selectors, "Total"])
        for sl, (name, flags, total) in enumerate(self.rows(), start=1):
            writer.writerow([sl, name, *flags, total])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "selectors": list(self.selectors),
                "min_votes": self.min_votes,
                "features": [
                    {"feature": name, "votes": total, "kept": total >= self.min_votes,
                     "by_selector": dict(zip(self.selectors, flags))}
                    for name, flags, total in self.rows()
                ],
                "kept": self.kept,
            },
            indent=2,
        )


def tally_votes(verdicts: Sequence[SelectorVerdict], min_votes: int = 4) -> VoteTally:
    """Count, per feature, how many verdicts selected it.

    With no verdicts the tally is empty. Every verdict must cover the same
    features in the same order.
    """
    if not verdicts:
        return VoteTally((), (), np.zeros((0, 0), dtype=bool), min_votes)
    names = verdicts[0].feature_names
    for v in verdicts[1:]:
        if v.feature_names != names:
            raise VerdictShapeMismatch(
                f"verdict {v.selector!r} covers {v.feature_names}, expected {names}"
            )
    decisions = np.column_stack([v.selected for v in verdicts])
    return VoteTally(names, tuple(v.selector for v in verdicts), decisions, min_votes)
