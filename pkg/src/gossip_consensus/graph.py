"""Directed communication graphs, topology generators and structural predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InfeasibleDensityError

FAMILIES = ("complete", "star", "ring-bidirectional", "ring-directed")


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph on nodes ``0..node_count-1``.

    An edge ``(u, v)`` means node ``u`` can transmit to node ``v``.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]
    _out: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        out: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {self.node_count})")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            out[u].append(v)
        object.__setattr__(self, "_out", tuple(tuple(sorted(o)) for o in out))

    @property
    def n(self) -> int:
        return self.node_count

    def out_neighbors(self, u: int) -> tuple[int, ...]:
        """Sorted targets of ``u``."""
        return self._out[u]

    def out_degree(self, u: int) -> int:
        return len(self._out[u])

    def in_degree(self, v: int) -> int:
        return sum(1 for _, w in self.edges if w == v)

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with entry ``[u, v] = 1`` when ``u`` points to ``v``."""
        adj = np.zeros((self.node_count, self.node_count), dtype=np.int8)
        for u, v in self.edges:
            adj[u, v] = 1
        return adj

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> DirectedGraph:
    """Build a graph from 0-based ``(u, v)`` pairs; duplicates are dropped."""
    return DirectedGraph(n, frozenset((int(u), int(v)) for u, v in pairs))


def generate(family: str, n: int) -> DirectedGraph:
    """Standard topologies: complete, star (hub 0), bidirectional and directed rings."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    minimum = 3 if family.startswith("ring") else 2
    if n < minimum:
        raise ValueError(f"{family} needs at least {minimum} nodes, got {n}")
    if family == "complete":
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    elif family == "star":
        pairs = [(0, i) for i in range(1, n)] + [(i, 0) for i in range(1, n)]
    elif family == "ring-directed":
        pairs = [(i, (i + 1) % n) for i in range(n)]
    else:
        pairs = [(i, (i + 1) % n) for i in range(n)] + [((i + 1) % n, i) for i in range(n)]
    return from_edge_list(n, pairs)


def reachable_from(g: DirectedGraph, root: int) -> set[int]:
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in g.out_neighbors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def spanning_tree_roots(g: DirectedGraph) -> list[int]:
    """Nodes from which every other node is reachable."""
    return [r for r in range(g.n) if len(reachable_from(g, r)) == g.n]


def has_directed_spanning_tree(g: DirectedGraph) -> bool:
    return any(len(reachable_from(g, r)) == g.n for r in range(g.n))


def is_directed_ring(g: DirectedGraph) -> bool:
    """True when the edges form one directed cycle through every node."""
    n = g.n
    if len(g.edges) != n:
        return False
    if any(g.out_degree(u) != 1 for u in range(n)):
        return False
    if sorted(v for _, v in g.edges) != list(range(n)):
        return False
    return len(reachable_from(g, 0)) == n


def density(g: DirectedGraph) -> float:
    n = g.n
    if n < 2:
        raise ValueError("density is undefined for fewer than 2 nodes")
    return len(g.edges) / (n * (n - 1))


def edge_target(n: int, target_density: float) -> int:
    """Edge count realizing ``target_density`` on ``n`` nodes (rounded up)."""
    total = n * (n - 1)
    # guard against 0.6 * 20 = 12.000000000000002 style overshoot
    return math.ceil(round(target_density * total, 9))


def random_at_density(
    base_n: int,
    target_density: float,
    rng: np.random.Generator,
    max_attempts: int = 1000,
) -> DirectedGraph:
    """Random subgraph of the complete graph with a prescribed edge density.

    Edges are removed uniformly at random from the complete graph on
    ``base_n`` nodes. Candidates lacking a directed spanning tree, or that
    are a directed ring, are discarded and resampled from scratch.
    """
    if not 0.0 < target_density <= 1.0:
        raise ValueError(f"target density must lie in (0, 1], got {target_density}")
    if base_n < 2:
        raise ValueError("random graphs need at least 2 nodes")
    total = base_n * (base_n - 1)
    if target_density * total < base_n - 1:
        raise InfeasibleDensityError(
            f"density {target_density} allows {target_density * total:g} edges on {base_n} nodes; "
            f"a spanning tree needs at least {base_n - 1}"
        )
    keep = edge_target(base_n, target_density)
    complete = sorted(generate("complete", base_n).edges)
    for _ in range(max_attempts):
        chosen = rng.choice(len(complete), size=keep, replace=False)
        g = from_edge_list(base_n, (complete[i] for i in sorted(chosen)))
        if has_directed_spanning_tree(g) and not is_directed_ring(g):
            return g
    raise InfeasibleDensityError(
        f"no graph with a spanning tree found at density {target_density} after {max_attempts} attempts"
    )
