"""Counter-based random streams.

Every draw in ergolab comes from a Philox generator keyed by
``SeedSequence(master_seed, spawn_key=key)``. A key such as ``(trial, k)``
names the stream, so results do not depend on which worker ran first.
"""

from __future__ import annotations

import numpy as np

type SeedLike = int | np.random.SeedSequence | np.random.Generator


def keyed_generator(master_seed: int, *key: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(master_seed, spawn_key=tuple(int(part) for part in key))
    return np.random.Generator(np.random.Philox(sequence))


def make_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return keyed_generator(int(seed))


__all__ = ["SeedLike", "keyed_generator", "make_generator"]
