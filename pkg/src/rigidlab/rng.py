"""Deterministic random streams.

All stochastic operations take an explicit integer seed and draw from a
Philox counter-based generator (64-bit, splittable).  Independent streams
(one per sample path, one per scan cell) come from SeedSequence.spawn, so
results never depend on thread count or chunking, only on (seed, index).
"""

from __future__ import annotations

from typing import List

import numpy as np


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def spawned_generators(seed: int, count: int) -> List[np.random.Generator]:
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]
