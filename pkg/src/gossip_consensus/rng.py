"""Random streams shared by the Python and compiled simulation paths.

Every draw goes through :func:`bounded`, which consumes raw 64-bit outputs of
a numpy bit generator. The compiled kernel reproduces the same consumption
order, so both paths give bit-identical trajectories for a given stream.
"""

from __future__ import annotations

import numpy as np

_MASK32 = 0xFFFFFFFF


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream for replication ``index`` under master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def derive_seed(seed: int, *keys: int) -> int:
    """Child 64-bit seed, used to give each experiment in a sweep its own master seed."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, np.uint64)[0])


def bounded(bitgen: np.random.BitGenerator, m: int) -> int:
    """Uniform integer in ``[0, m)`` from the top 32 bits of raw outputs.

    Lemire's multiply-shift with rejection, so the result is exactly uniform.
    ``m`` must be in ``[1, 2**32)``.
    """
    x = int(bitgen.random_raw()) >> 32
    p = x * m
    low = p & _MASK32
    if low < m:
        threshold = ((1 << 32) - m) % m
        while low < threshold:
            x = int(bitgen.random_raw()) >> 32
            p = x * m
            low = p & _MASK32
    return p >> 32
