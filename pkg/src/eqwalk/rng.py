"""Counter-based random streams keyed by ``(base_seed, replicate_index)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    replicate_index: int = 0

    def __post_init__(self):
        if self.replicate_index < 0:
            raise ValueError("replicate_index must be >= 0")
        if self.replicate_index > _MASK64:
            raise ValueError("replicate_index must fit in 64 bits")

    def generator(self, block: int = 0) -> np.random.Generator:
        """Fresh Philox stream.

        ``block`` selects a disjoint window of the counter space (its third
        word), so one replicate can be cut into independently drawable pieces.
        """
        if not 0 <= block <= _MASK64:
            raise ValueError("block must fit in 64 bits")
        key = np.array([self.base_seed & _MASK64, self.replicate_index], dtype=np.uint64)
        counter = np.array([0, 0, block, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def child(self, index: int) -> "SeedSpec":
        return SeedSpec(self.base_seed, index)


def as_generator(seed) -> np.random.Generator:
    """Accept a SeedSpec, an int base seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, (int, np.integer)):
        return SeedSpec(int(seed)).generator()
    raise TypeError(f"cannot make a random stream from {type(seed).__name__}")
