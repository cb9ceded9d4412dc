"""Monte-Carlo engine: repeated synchronous gossip runs to consensus."""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import CapExceededError
from .gossip import DEFAULT_CAP, DEFAULT_EPSILON, NetworkState, check_state
from .graph import DirectedGraph
from .markov import enumerate_states
from .rng import derive_seed, replication_rng

DEFAULT_MAX_STEPS = 100_000
THREADS_ENV = "GOSSIP_CONSENSUS_THREADS"


@dataclass(frozen=True)
class SimulationConfig:
    graph: DirectedGraph
    num_states: int
    initial: NetworkState
    replications: int = 1000
    max_steps: int = DEFAULT_MAX_STEPS
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial", check_state(self.initial, self.graph.n, self.num_states))
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class SimulationOutcome:
    halt_steps: np.ndarray
    labels: np.ndarray  # 0 marks a timed-out replication
    num_states: int
    consensus_probability: dict[int, float] = field(default_factory=dict)
    mean_time: float = math.nan
    ci95_low: float = math.nan
    ci95_high: float = math.nan
    timeout_count: int = 0

    @property
    def replications(self) -> int:
        return len(self.halt_steps)

    @property
    def converged(self) -> bool:
        """False when every replication timed out."""
        return self.timeout_count < self.replications

    @property
    def converged_steps(self) -> np.ndarray:
        return self.halt_steps[self.labels > 0]


def _csr(g: DirectedGraph) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    indices = []
    for j in range(g.n):
        nbrs = g.out_neighbors(j)
        indices.extend(nbrs)
        indptr[j + 1] = indptr[j] + len(nbrs)
    return indptr, np.asarray(indices, dtype=np.int64)


def _consensus_label(x: np.ndarray) -> int:
    """Most common label of the final state, ties to the smallest."""
    counts = Counter(int(v) for v in x)
    return min(counts, key=lambda v: (-counts[v], v))


def run_replication(
    cfg: SimulationConfig,
    rng: np.random.Generator,
    trace: Callable[[int, NetworkState], None] | None = None,
) -> tuple[int, int | None]:
    """Iterate the gossip update from ``cfg.initial`` until consensus or ``cfg.max_steps``.

    Returns the first step at which the state is in consensus and its label,
    or ``(max_steps, None)`` on timeout. ``trace`` receives every state and
    forces the pure-Python loop (same trajectory as the compiled one).
    """
    indptr, indices = _csr(cfg.graph)
    replicate = kernels.replicate if trace is None else kernels.replicate_python
    steps, final, converged = replicate(
        indptr, indices, np.asarray(cfg.initial, dtype=np.int64), cfg.max_steps, cfg.epsilon, rng, trace
    )
    return int(steps), (_consensus_label(final) if converged else None)


def default_workers() -> int:
    value = os.environ.get(THREADS_ENV)
    return max(1, int(value)) if value else 1


def run_experiment(cfg: SimulationConfig, workers: int | None = None) -> SimulationOutcome:
    """Run ``cfg.replications`` independent replications and aggregate them.

    Replication ``r`` draws from its own stream seeded by ``(cfg.seed, r)``,
    so results do not depend on ``workers``.
    """
    workers = default_workers() if workers is None else workers
    indptr, indices = _csr(cfg.graph)
    x0 = np.asarray(cfg.initial, dtype=np.int64)

    def one(r: int) -> tuple[int, int]:
        steps, final, converged = kernels.replicate(
            indptr, indices, x0, cfg.max_steps, cfg.epsilon, replication_rng(cfg.seed, r)
        )
        return int(steps), (_consensus_label(final) if converged else 0)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(cfg.replications), chunksize=64))
    else:
        results = [one(r) for r in range(cfg.replications)]
    halt = np.array([s for s, _ in results], dtype=np.int64)
    labels = np.array([c for _, c in results], dtype=np.int64)
    return summarize(halt, labels, cfg.num_states)


def summarize(halt_steps: np.ndarray, labels: np.ndarray, num_states: int) -> SimulationOutcome:
    """Consensus frequencies per label and a normal-approximation 95% CI on halting time."""
    m = len(halt_steps)
    probs = {c: float(np.count_nonzero(labels == c)) / m for c in range(1, num_states + 1)}
    out = SimulationOutcome(
        halt_steps=halt_steps,
        labels=labels,
        num_states=num_states,
        consensus_probability=probs,
        timeout_count=int(np.count_nonzero(labels == 0)),
    )
    steps = halt_steps[labels > 0].astype(np.float64)
    if steps.size:
        mean = float(steps.mean())
        half = 1.96 * float(steps.std(ddof=1)) / math.sqrt(steps.size) if steps.size > 1 else 0.0
        out.mean_time, out.ci95_low, out.ci95_high = mean, mean - half, mean + half
    return out


def sweep_initial_states(
    graph: DirectedGraph,
    k: int,
    replications: int,
    seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    epsilon: float = DEFAULT_EPSILON,
    cap: int = DEFAULT_CAP,
    workers: int | None = None,
    states: Sequence[NetworkState] | None = None,
) -> dict[NetworkState, SimulationOutcome]:
    """One experiment per non-consensus state, in Markov state order.

    Each state's master seed is derived from ``(seed, state index)``.
    """
    if k**graph.n > cap:
        raise CapExceededError(f"{k}**{graph.n} initial states exceed cap {cap}")
    ordered = enumerate_states(graph.n, k, cap)
    wanted = None if states is None else {tuple(s) for s in states}
    results: dict[NetworkState, SimulationOutcome] = {}
    for idx, x in enumerate(ordered):
        if len(set(x)) == 1 or (wanted is not None and x not in wanted):
            continue
        cfg = SimulationConfig(graph, k, x, replications, max_steps, epsilon, derive_seed(seed, idx))
        results[x] = run_experiment(cfg, workers)
    return results
