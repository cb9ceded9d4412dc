"""Gossip state machine: transmission sampling, conflict resolution, state update.

Matrices are stored in compact form. A transmission matrix keeps, per
sender column ``j``, the receiving row (``-1`` for a node with no
out-neighbors). An adoption matrix keeps, per row ``i``, the single column
holding its 1. The dense 0/1 forms are available through ``.matrix``.
"""

from __future__ import annotations

import abc
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError
from .graph import DirectedGraph
from .rng import bounded

DEFAULT_CAP = 10**6
DEFAULT_EPSILON = 0.5

NetworkState = tuple[int, ...]


def check_state(x: Sequence[int], n: int, k: int) -> NetworkState:
    """Validate a label vector against ``n`` nodes and labels ``1..k``."""
    x = tuple(int(v) for v in x)
    if len(x) != n:
        raise ValueError(f"state has {len(x)} entries, graph has {n} nodes")
    bad = [v for v in x if not 1 <= v <= k]
    if bad:
        raise ValueError(f"labels {bad} outside 1..{k}")
    return x


@dataclass(frozen=True)
class TransmissionMatrix:
    """Who transmits to whom in one tick: ``targets[j]`` receives from node ``j``."""

    targets: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.targets)

    @property
    def matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n), dtype=np.int8)
        for j, i in enumerate(self.targets):
            if i >= 0:
                w[i, j] = 1
        return w

    def senders(self, i: int) -> list[int]:
        """Columns with a 1 in row ``i``, ascending."""
        return [j for j, t in enumerate(self.targets) if t == i]

    @classmethod
    def from_matrix(cls, w: np.ndarray, g: DirectedGraph | None = None) -> TransmissionMatrix:
        w = np.asarray(w)
        n = w.shape[0]
        if w.shape != (n, n) or not np.isin(w, (0, 1)).all():
            raise ValueError("transmission matrix must be a square 0/1 matrix")
        targets = []
        for j in range(n):
            rows = np.flatnonzero(w[:, j])
            if len(rows) > 1:
                raise ValueError(f"column {j} has {len(rows)} ones")
            if len(rows) == 1:
                i = int(rows[0])
                if i == j:
                    raise ValueError(f"node {j} transmits to itself")
                if g is not None and i not in g.out_neighbors(j):
                    raise ValueError(f"({j}, {i}) is not an edge")
                targets.append(i)
            else:
                if g is not None and g.out_degree(j) > 0:
                    raise ValueError(f"node {j} has out-neighbors but does not transmit")
                targets.append(-1)
        return cls(tuple(targets))


@dataclass(frozen=True)
class AdoptionMatrix:
    """Row-stochastic 0/1 matrix: node ``i`` takes the value of ``sources[i]``."""

    sources: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.sources)

    @property
    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        a[np.arange(self.n), self.sources] = 1
        return a

    def key(self) -> bytes:
        """Canonical row-major byte encoding of the dense matrix."""
        return self.matrix.tobytes()

    @classmethod
    def from_matrix(cls, a: np.ndarray) -> AdoptionMatrix:
        a = np.asarray(a)
        n = a.shape[0]
        if a.shape != (n, n) or not np.isin(a, (0, 1)).all():
            raise ValueError("adoption matrix must be a square 0/1 matrix")
        if not (a.sum(axis=1) == 1).all():
            raise ValueError("adoption matrix must have exactly one 1 per row")
        return cls(tuple(int(j) for j in a.argmax(axis=1)))


class ConflictResolver(abc.ABC):
    """Maps a transmission matrix to adoption matrices when nodes receive several values."""

    name: str = "abstract"

    @abc.abstractmethod
    def sample(self, w: TransmissionMatrix, rng: np.random.Generator) -> AdoptionMatrix:
        """Draw one adoption matrix."""

    @abc.abstractmethod
    def enumerate(self, w: TransmissionMatrix, cap: int = DEFAULT_CAP) -> list[AdoptionMatrix]:
        """Every adoption matrix ``sample`` can return with positive probability."""


class ProportionalSelection(ConflictResolver):
    """Each receiving node adopts one of its incoming transmissions uniformly at random.

    A value arriving from several senders is therefore adopted with
    probability proportional to its multiplicity. Nodes that receive nothing
    keep their own value.
    """

    name = "proportional"

    def sample(self, w: TransmissionMatrix, rng: np.random.Generator) -> AdoptionMatrix:
        bitgen = rng.bit_generator
        incoming: list[list[int]] = [[] for _ in range(w.n)]
        for j, i in enumerate(w.targets):
            if i >= 0:
                incoming[i].append(j)
        sources = []
        for i, senders in enumerate(incoming):
            if not senders:
                sources.append(i)
            elif len(senders) == 1:
                sources.append(senders[0])
            else:
                sources.append(senders[bounded(bitgen, len(senders))])
        return AdoptionMatrix(tuple(sources))

    def enumerate(self, w: TransmissionMatrix, cap: int = DEFAULT_CAP) -> list[AdoptionMatrix]:
        choices = [w.senders(i) or [i] for i in range(w.n)]
        size = math.prod(len(c) for c in choices)
        if size > cap:
            raise CapExceededError(f"{size} row resolutions for one transmission matrix exceed cap {cap}")
        return [AdoptionMatrix(combo) for combo in itertools.product(*choices)]


PROPORTIONAL = ProportionalSelection()


def proportional_select(w: TransmissionMatrix, rng: np.random.Generator) -> AdoptionMatrix:
    return PROPORTIONAL.sample(w, rng)


def sample_transmission(g: DirectedGraph, rng: np.random.Generator) -> TransmissionMatrix:
    """Each node with out-neighbors transmits to one of them, chosen uniformly.

    Columns are drawn in node order. A node with a single out-neighbor uses
    no randomness.
    """
    bitgen = rng.bit_generator
    targets = []
    for j in range(g.n):
        nbrs = g.out_neighbors(j)
        if not nbrs:
            targets.append(-1)
        elif len(nbrs) == 1:
            targets.append(nbrs[0])
        else:
            targets.append(nbrs[bounded(bitgen, len(nbrs))])
    return TransmissionMatrix(tuple(targets))


def count_transmissions(g: DirectedGraph) -> int:
    return math.prod(g.out_degree(j) for j in range(g.n) if g.out_degree(j) > 0)


def enumerate_transmissions(g: DirectedGraph, cap: int = DEFAULT_CAP) -> list[TransmissionMatrix]:
    """All valid transmission matrices of ``g``, in lexicographic order of targets."""
    size = count_transmissions(g)
    if size > cap:
        raise CapExceededError(f"{size} transmission matrices (product of out-degrees) exceed cap {cap}")
    columns = [g.out_neighbors(j) or (-1,) for j in range(g.n)]
    return [TransmissionMatrix(t) for t in itertools.product(*columns)]


def enumerate_adoptions(
    ts: Iterable[TransmissionMatrix],
    resolver: ConflictResolver = PROPORTIONAL,
    cap: int = DEFAULT_CAP,
) -> list[AdoptionMatrix]:
    """Distinct adoption matrices reachable from ``ts``, sorted by source vector."""
    seen: set[tuple[int, ...]] = set()
    for w in ts:
        for a in resolver.enumerate(w, cap):
            seen.add(a.sources)
        if len(seen) > cap:
            raise CapExceededError(f"more than {cap} distinct adoption matrices")
    return [AdoptionMatrix(s) for s in sorted(seen)]


def apply_adoption(a: AdoptionMatrix, x: Sequence[int]) -> NetworkState:
    """``A x`` for a 0/1 row-stochastic ``A``."""
    if len(x) != a.n:
        raise ValueError(f"state has {len(x)} entries, adoption matrix is {a.n}x{a.n}")
    return tuple(x[j] for j in a.sources)


def is_consensus(x: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> bool:
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return max(x) - min(x) < epsilon
