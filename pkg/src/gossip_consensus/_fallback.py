"""Pure-Python replication loop; mirrors ``_kernels.pyx`` draw for draw."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .rng import bounded


def replicate(
    indptr: np.ndarray,
    indices: np.ndarray,
    x0: np.ndarray,
    max_steps: int,
    epsilon: float,
    rng: np.random.Generator,
    trace: Callable[[int, tuple[int, ...]], None] | None = None,
) -> tuple[int, np.ndarray, bool]:
    """Run one replication from ``x0`` on the CSR out-neighbor lists.

    Returns ``(steps, final_state, converged)``.
    """
    bitgen = rng.bit_generator
    n = len(x0)
    nbrs = [[int(v) for v in indices[indptr[j] : indptr[j + 1]]] for j in range(n)]
    x = [int(v) for v in x0]
    if trace is not None:
        trace(0, tuple(x))
    if max(x) - min(x) < epsilon:
        return 0, np.asarray(x, dtype=np.int64), True
    for t in range(1, max_steps + 1):
        incoming: list[list[int]] = [[] for _ in range(n)]
        for j in range(n):
            nb = nbrs[j]
            deg = len(nb)
            if deg == 1:
                incoming[nb[0]].append(j)
            elif deg > 1:
                incoming[nb[bounded(bitgen, deg)]].append(j)
        new = x[:]
        for i in range(n):
            senders = incoming[i]
            c = len(senders)
            if c == 1:
                new[i] = x[senders[0]]
            elif c > 1:
                new[i] = x[senders[bounded(bitgen, c)]]
        x = new
        if trace is not None:
            trace(t, tuple(x))
        if max(x) - min(x) < epsilon:
            return t, np.asarray(x, dtype=np.int64), True
    return max_steps, np.asarray(x, dtype=np.int64), False
