"""Deterministic stream-splittable random number generation.

Every consumer derives an independent generator from (seed, stream_id)
plus an optional subkey path, so pools are reproducible and paths can be
simulated in any order or chunking without changing their draws.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Address of an independent generator within a seeded experiment."""

    seed: int
    stream_id: int = 0
    subkey: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream_id, *self.subkey))
        return np.random.default_rng(ss)

    def child(self, *subkey: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.subkey, *subkey))


def pool_streams(seed: int, n: int, start: int = 0) -> list[RngStream]:
    """Streams for n paths of a pool; path i always gets stream start + i."""
    return [RngStream(seed, start + i) for i in range(n)]
