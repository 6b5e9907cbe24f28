"""
Counter-based random streams. Every random draw in vcoop comes from a stream built by `make_stream`, keyed on the
master seed plus integer indices (replication, component, ...), so a result never depends on which worker or in which
order a piece of work was executed.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np


__all__ = [
    "splitmix64",
    "derive_seed",
    "make_stream",
]

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """
    One round of the SplitMix64 finalizer on a 64-bit integer.
    """
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, *indices: Iterable[int]) -> int:
    """
    Mix a master seed and any number of non-negative integer indices into a single 64-bit seed.

    h = splitmix64(master); then for each index k: h = splitmix64(h ^ splitmix64(k)).

    Args:
        master_seed: The user facing seed (any int, reduced modulo 2**64)
        *indices: e.g. replication index and stream component id

    Returns:
        A 64-bit unsigned integer
    """
    h = splitmix64(int(master_seed) & _MASK64)
    for index in indices:
        h = splitmix64(h ^ splitmix64(int(index) & _MASK64))
    return h


def make_stream(master_seed: int, *indices: int) -> np.random.Generator:
    """
    Build an independent numpy Generator on a Philox bit generator keyed by `derive_seed(master_seed, *indices)`.
    """
    return np.random.Generator(np.random.Philox(key=derive_seed(master_seed, *indices)))
