"""Compiled vs pure-Python replication kernel.

    python benchmarks/bench_kernels.py [--reps 2000] [--repeat 3]

Both kernels consume identical streams, so the script also checks that their
halting times agree before reporting timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gossip_consensus import _fallback, kernels
from gossip_consensus.graph import generate
from gossip_consensus.rng import replication_rng
from gossip_consensus.simulator import _csr

CASES = [
    ("complete", 4, 2),
    ("complete", 8, 3),
    ("star", 8, 2),
    ("ring-bidirectional", 10, 2),
]


def run(replicate, indptr, indices, x0, reps):
    return np.array(
        [replicate(indptr, indices, x0, 100_000, 0.5, replication_rng(0, r))[0] for r in range(reps)]
    )


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if kernels.replicate_compiled is None:
        raise SystemExit("compiled extension not available; build with `pip install -e . --no-build-isolation`")

    print(f"{'topology':<24}{'k':>3}{'reps':>7}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for family, n, k in CASES:
        indptr, indices = _csr(generate(family, n))
        x0 = np.array([(i % k) + 1 for i in range(n)], dtype=np.int64)
        t_py, steps_py = best_of(lambda: run(_fallback.replicate, indptr, indices, x0, args.reps), args.repeat)
        t_c, steps_c = best_of(lambda: run(kernels.replicate_compiled, indptr, indices, x0, args.reps), args.repeat)
        if not np.array_equal(steps_py, steps_c):
            raise SystemExit(f"kernels disagree on {family}:{n}")
        print(f"{family + ':' + str(n):<24}{k:>3}{args.reps:>7}{t_py:>11.3f}{t_c:>11.3f}{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
