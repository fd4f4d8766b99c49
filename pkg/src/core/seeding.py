"""
Deterministic seed derivation and counter-based random generators.

Per-trial seeds are position-derived so results do not depend on how work is
scheduled across threads:

    seed(master, i, j, ...) = mix(... mix(mix(master) ^ mix(i + GOLDEN)) ^ mix(j + GOLDEN) ...)

where ``mix`` is the splitmix64 finalizer. Generators are numpy ``Philox``
streams keyed by ``(seed, stream id)``.
"""

from typing import Optional

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit unsigned integer."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Derive a 64-bit seed from a master seed and a tuple of positions."""
    h = splitmix64(master & MASK64)
    for index in indices:
        h = splitmix64(h ^ splitmix64((index + GOLDEN) & MASK64))
    return h


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream)."""
    key = np.array([seed & MASK64, stream & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def ensure_rng(rng: Optional[np.random.Generator], seed: int = 0) -> np.random.Generator:
    if rng is None:
        return make_rng(seed)
    return rng
