"""
Randomness sources for share generation, polynomial coefficients and the
herding searches. Seeded runs are byte-reproducible; unseeded runs draw
from the operating system.
"""

import secrets
from typing import Optional, Protocol, Union

import numpy as np


class RandomSource(Protocol):
    def token_bytes(self, n: int) -> bytes: ...

    def randbelow(self, k: int) -> int: ...

    def spawn_seed(self) -> int: ...


class SeededRandom:
    """Deterministic source backed by numpy's PCG64 generator."""

    def __init__(self, seed: int):
        self.seed = seed
        self._gen = np.random.default_rng(seed)

    def token_bytes(self, n: int) -> bytes:
        return self._gen.bytes(n)

    def randbelow(self, k: int) -> int:
        if k < 1:
            raise ValueError(f"randbelow needs k >= 1, got {k}")
        if k <= 2**63:
            return int(self._gen.integers(0, k))
        # wider than int64: rejection-sample from raw bytes
        nbytes = (k.bit_length() + 7) // 8
        excess = nbytes * 8 - k.bit_length()
        while True:
            candidate = int.from_bytes(self._gen.bytes(nbytes), "big") >> excess
            if candidate < k:
                return candidate

    def spawn_seed(self) -> int:
        return int(self._gen.integers(0, 2**63))


class SystemRandomSource:
    """OS entropy through the secrets module."""

    seed = None

    def token_bytes(self, n: int) -> bytes:
        return secrets.token_bytes(n)

    def randbelow(self, k: int) -> int:
        return secrets.randbelow(k)

    def spawn_seed(self) -> int:
        return secrets.randbelow(2**63)


def make_rng(seed: Optional[int] = None) -> Union[SeededRandom, SystemRandomSource]:
    """Seeded source when `seed` is given, otherwise system entropy."""
    if seed is None:
        return SystemRandomSource()
    return SeededRandom(seed)
