"""Counter-based seed derivation so every task's randomness is schedule-independent."""

from __future__ import annotations

import zlib

import numpy as np


def derive_seed(master: int, *counters: int | str) -> int:
    """Deterministic 32-bit seed for the task identified by ``counters``.

    String counters (model kinds, selector names) are hashed with CRC-32 first,
    so the seed of a task never depends on which other tasks exist.
    """
    words = [int(master) % 2**32]
    for c in counters:
        words.append(zlib.crc32(c.encode()) if isinstance(c, str) else int(c) % 2**32)
    return int(np.random.SeedSequence(words).generate_state(1)[0])
