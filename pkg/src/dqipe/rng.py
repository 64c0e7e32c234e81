"""Path-splittable random number streams.

Every stochastic routine in this package takes an explicit RngStream. A
stream is identified by a 64-bit seed plus an integer path (trial index,
party index, round index, ...). Identical (seed, path) pairs reproduce
bit-identical draw sequences; distinct paths give statistically
independent streams, so parallel trials and parties never share state.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngStream"]


class RngStream:
    """A seeded, forkable random stream backed by numpy's SeedSequence."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        self._gen = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self.path)
        )

    def child(self, *path: int) -> "RngStream":
        """Derive an independent stream at a sub-path."""
        return RngStream(self.seed, self.path + tuple(path))

    @property
    def rng(self) -> np.random.Generator:
        return self._gen

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"
