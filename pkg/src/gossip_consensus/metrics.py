"""Distance to consensus, Student-t statistics, and simulation-vs-theory validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import StructuralError
from .gossip import DEFAULT_CAP, DEFAULT_EPSILON, NetworkState
from .graph import DirectedGraph, has_directed_spanning_tree, is_directed_ring
from .markov import AbsorptionReport, analyze, build_chain, canonicalize, is_absorbing_chain
from .simulator import DEFAULT_MAX_STEPS, SimulationOutcome, sweep_initial_states

PROBABILITY_TOLERANCE = 0.05
WEIGHTING_NOTE = (
    "expected times weight every distinct adoption matrix equally; the simulated process draws "
    "adoption matrices with unequal probabilities, so empirical times can differ systematically"
)
ALPHA = 0.05


# --- distances -------------------------------------------------------------


def hamming_distance(h: Sequence[int], c: Sequence[int]) -> int:
    if len(h) != len(c):
        raise ValueError(f"length mismatch: {len(h)} vs {len(c)}")
    return sum(1 for a, b in zip(h, c) if a != b)


def expected_distance(
    h: Sequence[int], b_row: Sequence[float], consensus_states: Sequence[Sequence[int]]
) -> float:
    """Absorption-probability-weighted Hamming distance from ``h`` to the consensus states."""
    if len(b_row) != len(consensus_states):
        raise ValueError("one probability per consensus state required")
    return float(sum(p * hamming_distance(h, c) for p, c in zip(b_row, consensus_states)))


def nearest_consensus_distance(h: Sequence[int]) -> int:
    """Hamming distance to the closest consensus state: nodes outside the majority label."""
    counts: dict[int, int] = {}
    for v in h:
        counts[v] = counts.get(v, 0) + 1
    return len(h) - max(counts.values())


def round_half_away(x: float, tol: float = 1e-9) -> int:
    """Round to nearest, halves away from zero; ``tol`` absorbs rounding noise in ``D`` (1.4999999 -> 2)."""
    return int(math.floor(abs(x) + 0.5 + tol)) * (1 if x >= 0 else -1)


def partition_by_distance(
    states: Sequence[NetworkState], distances: Sequence[float]
) -> dict[int, list[NetworkState]]:
    """Group states by rounded distance; distance-0 (consensus) states are dropped."""
    if len(states) != len(distances):
        raise ValueError("one distance per state required")
    parts: dict[int, list[NetworkState]] = {}
    for s, d in zip(states, distances):
        key = round_half_away(d)
        if key == 0:
            continue
        parts.setdefault(key, []).append(tuple(s))
    return dict(sorted(parts.items()))


def distance_report(report: AbsorptionReport) -> list[dict]:
    """Per transient state: distances to each consensus state, D(h, C) and both partition keys."""
    rows = []
    for i, h in enumerate(report.transient_states):
        dists = [hamming_distance(h, c) for c in report.absorbing_states]
        d = expected_distance(h, report.B[i], report.absorbing_states)
        rows.append(
            {
                "state": h,
                "hamming": dists,
                "expected_distance": d,
                "partition": round_half_away(d),
                "nearest": nearest_consensus_distance(h),
            }
        )
    return rows


# --- Student t -------------------------------------------------------------


def _betacf(a: float, b: float, x: float, eps: float = 1e-15, max_iter: int = 500) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = tiny if abs(d) < tiny else d
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * regularized_beta(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`t_cdf` by bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    lo, hi = -1.0, 1.0
    while t_cdf(lo, df) > p:
        lo *= 2.0
    while t_cdf(hi, df) < p:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def one_sample_t_test(samples: Iterable[float], hypothesized_mean: float) -> float:
    """Two-sided p-value for ``H0: mean == hypothesized_mean``."""
    x = np.asarray(list(samples), dtype=np.float64)
    if x.size < 2:
        raise ValueError("need at least two samples")
    mean = float(x.mean())
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        return 1.0 if mean == hypothesized_mean else 0.0
    t = (mean - hypothesized_mean) / (sd / math.sqrt(x.size))
    return min(1.0, 2.0 * t_cdf(-abs(t), x.size - 1))


@dataclass(frozen=True)
class MeanCI:
    mean: float
    low: float
    high: float
    count: int


def mean_ci(values: Sequence[float], level: float = 0.95) -> MeanCI:
    """Student-t confidence interval for the mean; zero width for a single value."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("no values")
    mean = float(x.mean())
    if x.size == 1:
        return MeanCI(mean, mean, mean, 1)
    half = t_quantile(0.5 + level / 2.0, x.size - 1) * float(x.std(ddof=1)) / math.sqrt(x.size)
    return MeanCI(mean, mean - half, mean + half, int(x.size))


# --- validation ------------------------------------------------------------


@dataclass
class ValidationRow:
    initial_state: NetworkState
    theoretical_probabilities: list[float]
    expected_time: float
    empirical_probabilities: list[float]
    mean_time: float
    ci95: tuple[float, float]
    p_value: float
    timeouts: int
    abs_error: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.abs_error:
            self.abs_error = [
                abs(t - e) for t, e in zip(self.theoretical_probabilities, self.empirical_probabilities)
            ]

    @property
    def max_error(self) -> float:
        return max(self.abs_error)

    @property
    def probability_ok(self) -> bool:
        return self.max_error <= PROBABILITY_TOLERANCE

    @property
    def time_equal(self) -> bool:
        """Empirical mean statistically indistinguishable from the expected time."""
        return self.p_value > ALPHA

    @property
    def relative_time_error(self) -> float:
        return abs(self.mean_time - self.expected_time) / self.expected_time


def diagnose(g: DirectedGraph) -> str:
    """Which convergence precondition ``g`` violates, if any."""
    if not has_directed_spanning_tree(g):
        return "no consensus sequence: no directed spanning tree"
    if is_directed_ring(g):
        return "no consensus sequence: directed ring"
    return ""


def theory(g: DirectedGraph, k: int, cap: int = DEFAULT_CAP) -> AbsorptionReport:
    """Build and solve the chain, raising StructuralError with a diagnosis if not absorbing."""
    chain = build_chain(g, k, cap=cap)
    if not is_absorbing_chain(canonicalize(chain)):
        raise StructuralError(diagnose(g) or "chain is not absorbing")
    return analyze(chain)


def compare(report: AbsorptionReport, x: NetworkState, outcome: SimulationOutcome) -> ValidationRow:
    i = report.row(x)
    labels = [c[0] for c in report.absorbing_states]
    steps = outcome.converged_steps
    if steps.size >= 2:
        p = one_sample_t_test(steps, float(report.t_A[i]))
    elif steps.size == 1:
        p = 1.0 if steps[0] == report.t_A[i] else 0.0
    else:
        p = 0.0
    return ValidationRow(
        initial_state=x,
        theoretical_probabilities=[float(v) for v in report.B[i]],
        expected_time=float(report.t_A[i]),
        empirical_probabilities=[outcome.consensus_probability[c] for c in labels],
        mean_time=outcome.mean_time,
        ci95=(outcome.ci95_low, outcome.ci95_high),
        p_value=p,
        timeouts=outcome.timeout_count,
    )


def validate(
    graph: DirectedGraph,
    k: int,
    replications: int,
    seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    epsilon: float = DEFAULT_EPSILON,
    cap: int = DEFAULT_CAP,
    workers: int | None = None,
) -> list[ValidationRow]:
    """Theory vs simulation for every non-consensus initial state, in state order."""
    report = theory(graph, k, cap)
    outcomes = sweep_initial_states(graph, k, replications, seed, max_steps, epsilon, cap, workers)
    return [compare(report, x, out) for x, out in outcomes.items()]


def summarize_validation(rows: Sequence[ValidationRow]) -> dict:
    return {
        "rows": len(rows),
        "probability_pass": all(r.probability_ok for r in rows),
        "max_probability_error": max((r.max_error for r in rows), default=0.0),
        "time_equal_count": sum(r.time_equal for r in rows),
        "max_relative_time_error": max((r.relative_time_error for r in rows), default=0.0),
        "note": WEIGHTING_NOTE,
    }
