"""Parameter sweeps: consensus time by distance partition, and by edge density.

Sweep cells group initial states by their Hamming distance to the nearest
consensus state. Each cell reports the mean expected consensus time over the
states in a partition with a Student-t 95% interval across those states.

The density sweep additionally tags each state with its expected distance
``D(h, C)`` on the complete base graph, which separates states the nearest
distance lumps together (on K5 with 3 labels: 1.6, 2.4, 2.8, 3.2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GossipError
from .gossip import DEFAULT_CAP
from .graph import DirectedGraph, density, edge_target, generate, random_at_density
from .metrics import MeanCI, expected_distance, mean_ci, nearest_consensus_distance, theory
from .simulator import DEFAULT_MAX_STEPS, SimulationConfig, run_experiment
from .rng import derive_seed

log = logging.getLogger(__name__)

SWEEP_FAMILIES = ("complete", "star", "ring-bidirectional")


@dataclass
class SweepCell:
    family: str
    nodes: int
    states: int
    distance: int
    ci: MeanCI | None = None
    error: str = ""

    @property
    def empty(self) -> bool:
        return self.ci is None


def partition_times(g: DirectedGraph, k: int, cap: int = DEFAULT_CAP) -> dict[int, MeanCI]:
    """Expected-time CI per nearest-consensus distance for one topology."""
    report = theory(g, k, cap)
    groups: dict[int, list[float]] = {}
    for h, t in zip(report.transient_states, report.t_A):
        groups.setdefault(nearest_consensus_distance(h), []).append(float(t))
    return {d: mean_ci(v) for d, v in sorted(groups.items())}


def sweep(
    families: Sequence[str] = SWEEP_FAMILIES,
    node_range: Sequence[int] = (3, 4, 5),
    state_range: Sequence[int] = (2, 3, 4),
    distances: Sequence[int] = (1, 2, 3),
    cap: int = DEFAULT_CAP,
) -> list[SweepCell]:
    """One cell per (family, n, k, distance); a failing configuration is recorded, not raised."""
    cells = []
    for family in families:
        for n in node_range:
            for k in state_range:
                try:
                    parts = partition_times(generate(family, n), k, cap)
                    error = ""
                except GossipError as exc:
                    log.warning("sweep cell %s n=%d k=%d failed: %s", family, n, k, exc)
                    parts, error = {}, str(exc)
                for d in distances:
                    cells.append(SweepCell(family, n, k, d, parts.get(d), error))
    return cells


@dataclass
class DensityRow:
    density: float
    realized_density: float
    state: tuple[int, ...]
    distance: int
    ci: MeanCI
    base_distance: float = float("nan")  # D(h, C) on the complete base graph


@dataclass
class DensitySweep:
    rows: list[DensityRow] = field(default_factory=list)
    failures: dict[float, str] = field(default_factory=dict)

    def partition_means(self, d: float, key: str = "distance") -> dict[float, list[float]]:
        """Per-state mean times at density ``d`` grouped by ``distance`` or ``base_distance``."""
        if key not in ("distance", "base_distance"):
            raise ValueError(f"unknown partition key {key!r}")
        out: dict[float, list[float]] = {}
        for r in self.rows:
            if abs(r.density - d) < 1e-12:
                k = r.distance if key == "distance" else round(r.base_distance, 9)
                out.setdefault(k, []).append(r.ci.mean)
        return dict(sorted(out.items()))


def density_sweep(
    base_n: int,
    k: int,
    densities: Sequence[float],
    graphs_per_density: int = 30,
    seed: int = 0,
    empirical: bool = False,
    replications: int = 1000,
    max_steps: int = DEFAULT_MAX_STEPS,
    cap: int = DEFAULT_CAP,
) -> DensitySweep:
    """Consensus time per initial state as edges are removed from the complete graph.

    For every density, ``graphs_per_density`` random graphs are drawn from a
    stream seeded by ``(seed, density index)``. Each state's time is averaged
    over the graphs (theoretical ``t_A``, or simulated means when
    ``empirical``).
    """
    result = DensitySweep()
    try:
        base = theory(generate("complete", base_n), k, cap)
        base_d = {
            h: expected_distance(h, base.B[i], base.absorbing_states) for i, h in enumerate(base.transient_states)
        }
    except (GossipError, ValueError):  # K2 is a directed ring; no base distances
        base_d = {}
    for di, d in enumerate(densities):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, di])))
        per_state: dict[tuple[int, ...], list[float]] = {}
        try:
            graphs = [random_at_density(base_n, d, rng) for _ in range(graphs_per_density)]
            for gi, g in enumerate(graphs):
                report = theory(g, k, cap)
                if empirical:
                    for si, h in enumerate(report.transient_states):
                        cfg = SimulationConfig(
                            g, k, h, replications, max_steps, seed=derive_seed(seed, di, gi, si)
                        )
                        per_state.setdefault(h, []).append(run_experiment(cfg).mean_time)
                else:
                    for h, t in zip(report.transient_states, report.t_A):
                        per_state.setdefault(h, []).append(float(t))
        except GossipError as exc:
            log.warning("density %.3f failed: %s", d, exc)
            result.failures[d] = str(exc)
            continue
        realized = density(graphs[0]) if graphs else edge_target(base_n, d) / (base_n * (base_n - 1))
        for h, times in per_state.items():
            result.rows.append(
                DensityRow(d, realized, h, nearest_consensus_distance(h), mean_ci(times), base_d.get(h, float("nan")))
            )
    return result


def partitions_separated(means: dict[int, list[float]]) -> tuple[bool, float, float]:
    """Largest within-partition spread vs smallest gap between adjacent partitions."""
    keys = sorted(means)
    spread = max((max(means[d]) - min(means[d]) for d in keys), default=0.0)
    gaps = [min(means[b]) - max(means[a]) for a, b in zip(keys, keys[1:])]
    gap = min(gaps, default=float("inf"))
    return spread < gap, spread, gap
