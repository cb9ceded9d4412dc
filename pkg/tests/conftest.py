"""Independent oracles shared by the test modules.

These deliberately avoid the package's enumeration and linear-algebra code:
adoption matrices come from brute force over dense 0/1 matrices, and chains
are solved with numpy.linalg.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from gossip_consensus.graph import DirectedGraph


def brute_force_adoptions(g: DirectedGraph) -> set[bytes]:
    """All row-stochastic 0/1 matrices some transmission pattern can produce.

    Scans every 0/1 matrix W with the column constraint, then every row choice,
    and returns the dense adoption matrices as byte keys.
    """
    n = g.n
    adj = g.adjacency()
    out: set[bytes] = set()
    cols = []
    for j in range(n):
        options = [i for i in range(n) if adj[j, i]]
        cols.append(options or [None])
    for targets in itertools.product(*cols):
        w = np.zeros((n, n), dtype=np.int8)
        for j, i in enumerate(targets):
            if i is not None:
                w[i, j] = 1
        rows = [list(np.flatnonzero(w[i])) or [i] for i in range(n)]
        for pick in itertools.product(*rows):
            a = np.zeros((n, n), dtype=np.int8)
            a[np.arange(n), pick] = 1
            out.add(a.tobytes())
    return out


def exact_step_distribution(g: DirectedGraph, x: tuple[int, ...]) -> dict[tuple[int, ...], Fraction]:
    """Exact one-tick next-state law of the simulated process from ``x``."""
    n = g.n
    nbrs = [g.out_neighbors(j) for j in range(n)]
    law: dict[tuple[int, ...], Fraction] = {}
    cols = [nb or (None,) for nb in nbrs]
    for targets in itertools.product(*cols):
        p_w = Fraction(1)
        for j, nb in enumerate(nbrs):
            if nb:
                p_w /= len(nb)
        incoming = [[j for j, t in enumerate(targets) if t == i] for i in range(n)]
        rows = [s or [i] for i, s in enumerate(incoming)]
        p_a = p_w
        for r in rows:
            p_a /= len(r)
        for pick in itertools.product(*rows):
            y = tuple(x[j] for j in pick)
            law[y] = law.get(y, Fraction(0)) + p_a
    return law


def exact_mean_times(g: DirectedGraph, k: int) -> dict[tuple[int, ...], float]:
    """Expected simulated consensus time per state, from first-step equations."""
    states = list(itertools.product(range(1, k + 1), repeat=g.n))
    transient = [s for s in states if len(set(s)) > 1]
    pos = {s: i for i, s in enumerate(transient)}
    m = len(transient)
    a = np.eye(m)
    for s in transient:
        for y, p in exact_step_distribution(g, s).items():
            if y in pos:
                a[pos[s], pos[y]] -= float(p)
    t = np.linalg.solve(a, np.ones(m))
    return {s: float(t[pos[s]]) for s in transient}


def first_step_times(M: np.ndarray, transient: list[int]) -> np.ndarray:
    """Solve t = 1 + Q t directly from the transition matrix."""
    q = M[np.ix_(transient, transient)]
    return np.linalg.solve(np.eye(len(transient)) - q, np.ones(len(transient)))


def all_digraphs(n: int):
    """Every simple directed graph on ``n`` labelled nodes."""
    from gossip_consensus.graph import from_edge_list

    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for mask in range(1 << len(pairs)):
        yield from_edge_list(n, [p for b, p in enumerate(pairs) if mask >> b & 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
