"""Exact absorbing-Markov-chain analysis of gossip over a fixed topology.

States are all ``k**n`` label vectors, ordered as base-``k`` numbers with
node 1 as the most significant digit. The transition matrix gives every
distinct adoption matrix of the topology equal weight ``1/|A|``; transitions
that land on the same next state are summed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import CapExceededError, StructuralError
from .gossip import (
    DEFAULT_CAP,
    PROPORTIONAL,
    AdoptionMatrix,
    ConflictResolver,
    NetworkState,
    enumerate_adoptions,
    enumerate_transmissions,
)
from .graph import DirectedGraph

# dense M is |H| x |H| float64; 4096 states is 128 MiB
DEFAULT_MAX_CHAIN_STATES = 4096


@dataclass(frozen=True)
class MarkovChain:
    num_nodes: int
    num_labels: int
    states: np.ndarray  # (k**n, n) labels in 1..k
    M: np.ndarray
    absorbing_indices: tuple[int, ...]
    transient_indices: tuple[int, ...]
    adoption_count: int = 0

    def state(self, index: int) -> NetworkState:
        return tuple(int(v) for v in self.states[index])

    def index_of(self, x: Sequence[int]) -> int:
        return state_index(x, self.num_labels)


@dataclass(frozen=True)
class CanonicalForm:
    """``M`` reordered to ``[[Q, R], [0, I]]``; ``order[c]`` is the original index at position ``c``."""

    Q: np.ndarray
    R: np.ndarray
    order: np.ndarray
    n_transient: int

    @property
    def permutation(self) -> np.ndarray:
        """Original index -> canonical index."""
        perm = np.empty_like(self.order)
        perm[self.order] = np.arange(len(self.order))
        return perm

    def matrix(self) -> np.ndarray:
        t, a = self.R.shape
        top = np.hstack([self.Q, self.R])
        bottom = np.hstack([np.zeros((a, t)), np.eye(a)])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class AbsorptionReport:
    N: np.ndarray
    B: np.ndarray
    t_A: np.ndarray
    variance: np.ndarray
    transient_states: list[NetworkState]
    absorbing_states: list[NetworkState]

    def row(self, x: Sequence[int]) -> int:
        return self.transient_states.index(tuple(x))


def state_index(x: Sequence[int], k: int) -> int:
    idx = 0
    for v in x:
        idx = idx * k + (int(v) - 1)
    return idx


def enumerate_states(n: int, k: int, cap: int = DEFAULT_CAP) -> list[NetworkState]:
    """All ``k**n`` label vectors in ascending base-``k`` order."""
    return [tuple(int(v) for v in row) for row in state_array(n, k, cap)]


def state_array(n: int, k: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    if n < 1 or k < 1:
        raise ValueError("need at least one node and one label")
    size = k**n
    if size > cap:
        raise CapExceededError(f"{k}**{n} = {size} Markov states exceed cap {cap}")
    idx = np.arange(size)
    digits = np.empty((size, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        digits[:, pos] = idx % k
        idx = idx // k
    return digits + 1


def transition_matrix(states: np.ndarray, k: int, adoptions: Sequence[AdoptionMatrix]) -> np.ndarray:
    """Uniform ``1/|A|`` weight per adoption matrix, summed over coinciding targets."""
    size, n = states.shape
    powers = k ** np.arange(n - 1, -1, -1)
    sources = np.array([a.sources for a in adoptions], dtype=np.int64)  # (|A|, n)
    counts = np.zeros(size * size, dtype=np.int64)
    row_offset = (np.arange(size) * size)[:, None]
    chunk = max(1, 2_000_000 // size)
    for start in range(0, len(sources), chunk):
        block = sources[start : start + chunk]
        # next state under adoption a is states[:, a.sources]
        targets = (states[:, block] - 1) @ powers  # (size, len(block))
        counts += np.bincount((row_offset + targets).ravel(), minlength=size * size)
    return counts.reshape(size, size) / len(adoptions)


def build_chain(
    g: DirectedGraph,
    k: int,
    resolver: ConflictResolver = PROPORTIONAL,
    cap: int = DEFAULT_CAP,
    max_chain_states: int = DEFAULT_MAX_CHAIN_STATES,
) -> MarkovChain:
    n = g.n
    if k**n > max_chain_states:
        raise CapExceededError(f"{k}**{n} = {k**n} states exceed the dense chain cap {max_chain_states}")
    states = state_array(n, k, cap)
    adoptions = enumerate_adoptions(enumerate_transmissions(g, cap), resolver, cap)
    M = transition_matrix(states, k, adoptions)
    consensus = (states == states[:, :1]).all(axis=1)
    return MarkovChain(
        num_nodes=n,
        num_labels=k,
        states=states,
        M=M,
        absorbing_indices=tuple(int(i) for i in np.flatnonzero(consensus)),
        transient_indices=tuple(int(i) for i in np.flatnonzero(~consensus)),
        adoption_count=len(adoptions),
    )


def canonicalize(chain: MarkovChain) -> CanonicalForm:
    """Transient states first, then absorbing, each block in original order."""
    if not chain.absorbing_indices:
        raise StructuralError("chain has no absorbing state")
    tr = np.array(chain.transient_indices, dtype=np.int64)
    ab = np.array(chain.absorbing_indices, dtype=np.int64)
    return CanonicalForm(
        Q=chain.M[np.ix_(tr, tr)],
        R=chain.M[np.ix_(tr, ab)],
        order=np.concatenate([tr, ab]),
        n_transient=len(tr),
    )


def is_absorbing_chain(cf: CanonicalForm) -> bool:
    """Every transient state can reach an absorbing one along positive entries.

    Backward search from the absorbing block; no floating-point powering.
    """
    t = cf.n_transient
    if t == 0:
        return True
    done = (cf.R > 0).any(axis=1)
    frontier = np.flatnonzero(done)
    into = cf.Q > 0
    while frontier.size:
        newly = into[:, frontier].any(axis=1) & ~done
        done |= newly
        frontier = np.flatnonzero(newly)
    return bool(done.all())


def fundamental_matrix(cf: CanonicalForm) -> np.ndarray:
    """``(I - Q)^-1``; entry ``(i, j)`` is the expected number of visits to ``j`` from ``i``."""
    t = cf.n_transient
    return linalg.inverse(np.eye(t) - cf.Q)


def absorption_probabilities(N: np.ndarray, R: np.ndarray) -> np.ndarray:
    if N.shape[1] != R.shape[0]:
        raise ValueError(f"N is {N.shape}, R is {R.shape}")
    return N @ R


def expected_absorption_time(N: np.ndarray) -> np.ndarray:
    return N.sum(axis=1)


def absorption_time_variance(N: np.ndarray, t_A: np.ndarray) -> np.ndarray:
    """``(2N - I) t_A - t_A**2`` (elementwise square); rounding noise clipped at 0."""
    var = (2.0 * N - np.eye(N.shape[0])) @ t_A - t_A * t_A
    return np.where((var < 0) & (var > -1e-9), 0.0, var)


def markov_tail_bound(t_A_i: float, a: float) -> float:
    """Markov-inequality bound on ``P(time >= a)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    return min(1.0, t_A_i / a)


def quantile_bound(t_A_i: float, epsilon: float = 0.05) -> float:
    """Step count exceeded with probability at most ``epsilon`` (``t_A / epsilon``)."""
    return t_A_i / epsilon


def distribution_at_time(z: np.ndarray, chain: MarkovChain, t: int) -> np.ndarray:
    """``z M^t`` by repeated vector-matrix products."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (chain.M.shape[0],):
        raise ValueError(f"z has shape {z.shape}, chain has {chain.M.shape[0]} states")
    if t < 0:
        raise ValueError("t must be nonnegative")
    for _ in range(t):
        z = z @ chain.M
    return z


def analyze(chain: MarkovChain) -> AbsorptionReport:
    """Canonical form, fundamental matrix, absorption probabilities, times and variances."""
    cf = canonicalize(chain)
    if not is_absorbing_chain(cf):
        raise StructuralError("chain is not absorbing: some transient states never reach consensus")
    N = fundamental_matrix(cf)
    t_A = expected_absorption_time(N)
    return AbsorptionReport(
        N=N,
        B=absorption_probabilities(N, cf.R),
        t_A=t_A,
        variance=absorption_time_variance(N, t_A),
        transient_states=[chain.state(i) for i in chain.transient_indices],
        absorbing_states=[chain.state(i) for i in chain.absorbing_indices],
    )
