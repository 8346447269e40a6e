"""Artificial bee colony search over feature masks."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidConfig
from ..models.linear import LogisticRegression
from ..table import EncodedMatrix
from ..tuning.cv import kfold_plan
from .verdict import Selector, SelectorVerdict, standardize

SPARSITY_PENALTY = 0.001


@dataclass(frozen=True)
class BeeColonyConfig:
    colony_size: int = 20
    max_iterations: int = 50
    abandonment_limit: int = 10
    seed: int = 0
    fitness_folds: int = 3

    def __post_init__(self):
        if self.colony_size < 2:
            raise InvalidConfig("colony_size must be at least 2")
        if self.max_iterations < 1:
            raise InvalidConfig("max_iterations must be at least 1")
        if self.abandonment_limit < 1:
            raise InvalidConfig("abandonment_limit must be at least 1")
        if self.fitness_folds < 2:
            raise InvalidConfig("fitness_folds must be at least 2")


class MaskFitness:
    """Cross-validated logistic accuracy of a feature mask minus a size penalty.

    Results are cached per mask. The empty mask scores the majority-class rate.
    """

    def __init__(self, matrix: EncodedMatrix, folds: int, seed: int):
        self.X = standardize(matrix.features)
        self.y = matrix.target
        self.plan = kfold_plan(self.y, k=folds, seed=seed)
        self.cache: dict[bytes, float] = {}

    def accuracy(self, mask: np.ndarray) -> float:
        if not mask.any():
            return float(max(self.y.mean(), 1 - self.y.mean()))
        cols = np.flatnonzero(mask)
        accs = []
        for tr, va in self.plan.folds():
            model = LogisticRegression().fit(self.X[np.ix_(tr, cols)], self.y[tr])
            accs.append(np.mean(model.predict(self.X[np.ix_(va, cols)]) == self.y[va]))
        return float(np.mean(accs))

    def __call__(self, mask: np.ndarray) -> float:
        key = np.packbits(mask).tobytes() + bytes([len(mask) % 256])
        if key not in self.cache:
            self.cache[key] = self.accuracy(mask) - SPARSITY_PENALTY * int(mask.sum())
        return self.cache[key]


def _random_mask(rng: np.random.Generator, m: int) -> np.ndarray:
    mask = rng.random(m) < 0.5
    if not mask.any():
        mask[rng.integers(m)] = True
    return mask


def _neighbour(rng: np.random.Generator, mask: np.ndarray) -> np.ndarray | None:
    """Flip one random bit, skipping flips that would empty the mask."""
    m = len(mask)
    allowed = np.arange(m) if mask.sum() > 1 else np.flatnonzero(~mask)
    if len(allowed) == 0:
        return None
    out = mask.copy()
    j = allowed[rng.integers(len(allowed))]
    out[j] = ~out[j]
    return out


def select_bee_colony(matrix: EncodedMatrix, config: BeeColonyConfig | None = None) -> SelectorVerdict:
    """Wrapper search maximising cross-validated accuracy over non-empty feature masks.

    Half the colony are employed bees, each owning one food source (a mask).
    Employed and onlooker bees try one-bit-flip neighbours and keep them when
    fitness does not drop; onlookers pick sources with probability proportional
    to shifted fitness. The source left unimproved longest is handed to a scout
    for a fresh random mask once it exceeds ``abandonment_limit`` trials. The
    best mask seen is never lost.

    A feature's score is how much the best fitness falls when that feature's
    bit is flipped.
    """
    config = config or BeeColonyConfig()
    m = matrix.n_features
    rng = np.random.default_rng(config.seed)
    fitness = MaskFitness(matrix, config.fitness_folds, config.seed)
    n_sources = max(1, config.colony_size // 2)

    sources = [_random_mask(rng, m) for _ in range(n_sources)]
    values = np.array([fitness(s) for s in sources])
    trials = np.zeros(n_sources, dtype=np.int64)
    best_i = int(np.argmax(values))
    best_mask, best_value = sources[best_i].copy(), float(values[best_i])
    history = [best_value]

    def try_improve(i: int) -> None:
        cand = _neighbour(rng, sources[i])
        if cand is None:
            trials[i] += 1
            return
        v = fitness(cand)
        if v >= values[i]:
            improved = v > values[i]
            sources[i], values[i] = cand, v
            trials[i] = 0 if improved else trials[i] + 1
        else:
            trials[i] += 1

    for _ in range(config.max_iterations):
        for i in range(n_sources):
            try_improve(i)
        shifted = values - values.min() + 1e-9
        probs = shifted / shifted.sum()
        for _ in range(n_sources):
            try_improve(int(rng.choice(n_sources, p=probs)))
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_mask, best_value = sources[i].copy(), float(values[i])
        worst = int(np.argmax(trials))
        if trials[worst] > config.abandonment_limit:
            sources[worst] = _random_mask(rng, m)
            values[worst] = fitness(sources[worst])
            trials[worst] = 0
            if values[worst] > best_value:
                best_mask, best_value = sources[worst].copy(), float(values[worst])
        history.append(best_value)

    scores = np.zeros(m)
    for j in range(m):
        flipped = best_mask.copy()
        flipped[j] = ~flipped[j]
        scores[j] = best_value - fitness(flipped)
    return SelectorVerdict(
        Selector.BEE_COLONY.value, matrix.feature_names, best_mask, scores,
        {
            "best_fitness": best_value,
            "history": history,
            "evaluations": len(fitness.cache),
            "config": asdict(config),
        },
    )
