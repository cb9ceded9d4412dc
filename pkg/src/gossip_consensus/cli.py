"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 non-convergent topology,
3 enumeration cap exceeded, 4 validation failed the probability criterion.
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence


from . import __version__, kernels
from . import io as gio
from .errors import CapExceededError, GossipError, InfeasibleDensityError, StructuralError
from .experiments import SWEEP_FAMILIES, density_sweep, sweep
from .gossip import DEFAULT_CAP, DEFAULT_EPSILON, check_state
from .graph import FAMILIES, DirectedGraph, generate
from .markov import build_chain, canonicalize, quantile_bound
from .metrics import diagnose, distance_report, summarize_validation, theory, validate
from .rng import replication_rng
from .simulator import DEFAULT_MAX_STEPS, SimulationConfig, run_experiment, run_replication

log = logging.getLogger("gossip_consensus")

EXIT_USAGE, EXIT_STRUCTURAL, EXIT_CAP, EXIT_VALIDATION = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which we reserve
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- argument helpers ------------------------------------------------------


def parse_topology(spec: str) -> DirectedGraph:
    family, _, n = spec.partition(":")
    if family == "ring":
        family = "ring-bidirectional"
    if family not in FAMILIES or not n.isdigit():
        raise UsageError(f"bad topology {spec!r}; use family:n with family in {', '.join(FAMILIES)}")
    try:
        return generate(family, int(n))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def int_range(text: str) -> list[int]:
    """``3-5`` or ``2,4``."""
    out: list[int] = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def float_range(text: str) -> list[float]:
    """``0.6:1.0:0.05`` (inclusive) or ``0.6,0.8,1.0``."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(v) for v in text.split(",")]


def load_graph(args: argparse.Namespace) -> tuple[DirectedGraph, str]:
    if args.topology and args.graph:
        raise UsageError("--topology and --graph are mutually exclusive")
    if args.topology:
        return parse_topology(args.topology), f"topology:{args.topology}"
    if args.graph:
        try:
            return gio.read_edge_list(args.graph), f"file:{args.graph}"
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read graph {args.graph}: {exc}") from None
    raise UsageError("one of --topology or --graph is required")


def manifest(args: argparse.Namespace, **config: Any) -> dict[str, Any]:
    return {
        "subcommand": args.command,
        "config": {"resolver": "proportional", **config},
        "version": __version__,
        "backend": kernels.BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def emit(args: argparse.Namespace, report: dict, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    if args.format == "json":
        text = gio.dumps_json(report)
    elif args.format == "csv":
        text = gio.dumps_csv(header, rows)
    else:
        text = gio.format_table(header, rows, decimals=args.decimals)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _num(v: float) -> float | None:
    return None if v != v else float(v)


# --- subcommands -----------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    g, source = load_graph(args)
    report = theory(g, args.states, args.cap)
    labels = [c[0] for c in report.absorbing_states]
    dist = distance_report(report)
    rows = []
    json_rows = []
    for i, h in enumerate(report.transient_states):
        t = float(report.t_A[i])
        probs = [float(p) for p in report.B[i]]
        rows.append(
            [gio.format_state(h), *probs, t, float(report.variance[i]), quantile_bound(t),
             dist[i]["expected_distance"], dist[i]["nearest"]]
        )
        json_rows.append(
            {
                "state": gio.format_state(h),
                "absorption": {str(c): p for c, p in zip(labels, probs)},
                "expected_time": t,
                "variance": float(report.variance[i]),
                "bound95": quantile_bound(t),
                "expected_distance": dist[i]["expected_distance"],
                "nearest_distance": dist[i]["nearest"],
            }
        )
    out: dict[str, Any] = {
        "manifest": manifest(args, graph=source, n=g.n, k=args.states, cap=args.cap),
        "rows": json_rows,
    }
    if args.matrix:
        chain = build_chain(g, args.states, cap=args.cap)
        cf = canonicalize(chain)
        out["matrices"] = {
            "states": [gio.format_state(chain.state(i)) for i in range(len(chain.states))],
            "adoption_count": chain.adoption_count,
            "M": chain.M.tolist(),
            "N": report.N.tolist(),
            "canonical_order": [int(i) for i in cf.order],
        }
    header = ["state", *[f"P({c})" for c in labels], "t_A", "variance", "bound95", "D", "nearest"]
    emit(args, out, header, rows)
    return 0


def _sim_config(args: argparse.Namespace, g: DirectedGraph) -> SimulationConfig:
    try:
        init = check_state(gio.parse_state(args.init), g.n, args.states)
        return SimulationConfig(g, args.states, init, args.reps, args.max_steps, args.epsilon, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    g, source = load_graph(args)
    cfg = _sim_config(args, g)
    if args.trace:
        with open(args.trace, "w") as fh:
            run_replication(
                cfg, replication_rng(cfg.seed, 0), trace=lambda t, x: fh.write(f"{t}\t{gio.format_state(x)}\n")
            )
    outcome = run_experiment(cfg)
    labels = list(range(1, cfg.num_states + 1))
    body = {
        "initial": gio.format_state(cfg.initial),
        "replications": cfg.replications,
        "consensus_probability": {str(c): outcome.consensus_probability[c] for c in labels},
        "mean_time": _num(outcome.mean_time),
        "ci95": [_num(outcome.ci95_low), _num(outcome.ci95_high)],
        "timeout_count": outcome.timeout_count,
        "converged": outcome.converged,
    }
    report = {
        "manifest": manifest(
            args, graph=source, n=g.n, k=cfg.num_states, init=body["initial"], seed=cfg.seed,
            replications=cfg.replications, max_steps=cfg.max_steps, epsilon=cfg.epsilon,
        ),
        "outcome": body,
    }
    header = ["initial", *[f"P({c})" for c in labels], "mean_time", "ci95_low", "ci95_high", "timeouts"]
    row = [body["initial"], *[outcome.consensus_probability[c] for c in labels],
           outcome.mean_time, outcome.ci95_low, outcome.ci95_high, outcome.timeout_count]
    emit(args, report, header, [row])
    if not outcome.converged:
        print(f"no replication reached consensus within {cfg.max_steps} steps; {diagnose(g)}".rstrip("; "),
              file=sys.stderr)
        return EXIT_STRUCTURAL
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    g, source = load_graph(args)
    rows = validate(g, args.states, args.reps, args.seed, args.max_steps, args.epsilon, args.cap)
    summary = summarize_validation(rows)
    json_rows = [
        {
            "state": gio.format_state(r.initial_state),
            "theoretical": r.theoretical_probabilities,
            "empirical": r.empirical_probabilities,
            "abs_error": r.abs_error,
            "expected_time": r.expected_time,
            "mean_time": _num(r.mean_time),
            "ci95": [_num(r.ci95[0]), _num(r.ci95[1])],
            "p_value": r.p_value,
            "probability_ok": r.probability_ok,
            "time_equal": r.time_equal,
        }
        for r in rows
    ]
    report = {
        "manifest": manifest(args, graph=source, n=g.n, k=args.states, seed=args.seed, replications=args.reps,
                             max_steps=args.max_steps, epsilon=args.epsilon, cap=args.cap),
        "summary": summary,
        "rows": json_rows,
    }
    k = args.states
    header = ["state", *[f"theo({c})" for c in range(1, k + 1)], *[f"emp({c})" for c in range(1, k + 1)],
              "max_error", "E[t]", "mean_t", "ci_low", "ci_high", "p_value"]
    table = [
        [gio.format_state(r.initial_state), *r.theoretical_probabilities, *r.empirical_probabilities,
         r.max_error, r.expected_time, r.mean_time, r.ci95[0], r.ci95[1], r.p_value]
        for r in rows
    ]
    emit(args, report, header, table)
    return 0 if summary["probability_pass"] else EXIT_VALIDATION


def cmd_sweep(args: argparse.Namespace) -> int:
    families = [("ring-bidirectional" if f == "ring" else f) for f in args.families.split(",")]
    cells = sweep(families, int_range(args.nodes), int_range(args.state_range), int_range(args.distances), args.cap)
    rows = []
    json_cells = []
    for c in cells:
        ci = c.ci
        rows.append([c.family, c.nodes, c.states, c.distance,
                     "-" if ci is None else ci.mean, "-" if ci is None else ci.low,
                     "-" if ci is None else ci.high, 0 if ci is None else ci.count])
        json_cells.append(
            {
                "family": c.family, "nodes": c.nodes, "states": c.states, "distance": c.distance,
                "mean": None if ci is None else ci.mean,
                "ci95": None if ci is None else [ci.low, ci.high],
                "count": 0 if ci is None else ci.count,
                "error": c.error or None,
            }
        )
    report = {
        "manifest": manifest(args, families=families, nodes=int_range(args.nodes),
                             states=int_range(args.state_range), distances=int_range(args.distances), cap=args.cap),
        "cells": json_cells,
    }
    emit(args, report, ["family", "nodes", "states", "distance", "mean", "ci_low", "ci_high", "count"], rows)
    return 0


def cmd_density(args: argparse.Namespace) -> int:
    densities = float_range(args.densities)
    result = density_sweep(args.base_nodes, args.states, densities, args.graphs, args.seed,
                           empirical=args.empirical, replications=args.reps, max_steps=args.max_steps, cap=args.cap)
    rows = [[r.density, r.realized_density, gio.format_state(r.state), r.distance, r.base_distance,
             r.ci.mean, r.ci.low, r.ci.high, r.ci.count] for r in result.rows]
    report = {
        "manifest": manifest(args, base_nodes=args.base_nodes, k=args.states, densities=densities,
                             graphs_per_density=args.graphs, seed=args.seed, empirical=args.empirical,
                             replications=args.reps if args.empirical else None, cap=args.cap),
        "rows": [
            {"density": r[0], "realized_density": r[1], "state": r[2], "distance": r[3],
             "base_expected_distance": r[4], "mean": r[5], "ci95": [r[6], r[7]], "graphs": r[8]}
            for r in rows
        ],
        "failures": {str(d): msg for d, msg in result.failures.items()},
    }
    header = ["density", "realized", "state", "distance", "base_D", "mean", "ci_low", "ci_high", "graphs"]
    emit(args, report, header, rows)
    return 0


def cmd_graph(args: argparse.Namespace) -> int:
    g, _ = load_graph(args)
    text = gio.format_edge_list(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gossip-consensus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--topology", help="family:n, family in " + ", ".join(FAMILIES) + " (ring = ring-bidirectional)")
        p.add_argument("--graph", help="edge-list file (first line n, then 'u v' per edge, 1-based)")

    def output_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv", "table"), default="json")
        p.add_argument("--decimals", type=int, default=4, help="decimals in table output")
        p.add_argument("-o", "--output", help="write to file instead of stdout")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")

    def sim_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--reps", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
        p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)

    p = sub.add_parser("analyze", help="exact absorption probabilities and expected consensus times")
    graph_args(p)
    p.add_argument("-k", "--states", type=int, required=True)
    p.add_argument("--matrix", action="store_true", help="include M, N and the state list (json only)")
    output_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo runs from one initial state")
    graph_args(p)
    p.add_argument("-k", "--states", type=int, required=True)
    p.add_argument("--init", required=True, help="initial state, e.g. 1122 or 1,12,3")
    p.add_argument("--trace", help="write per-step states of replication 0 to this file")
    sim_args(p)
    output_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="simulation vs theory for every non-consensus state")
    graph_args(p)
    p.add_argument("-k", "--states", type=int, required=True)
    sim_args(p)
    output_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="consensus time by distance partition over families/nodes/states")
    p.add_argument("--families", default=",".join(SWEEP_FAMILIES))
    p.add_argument("--nodes", default="3-5")
    p.add_argument("--states", dest="state_range", default="2-4")
    p.add_argument("--distances", default="1-3")
    output_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("density", help="consensus time vs edge density of random subgraphs of K_n")
    p.add_argument("--base-nodes", type=int, default=5)
    p.add_argument("-k", "--states", type=int, default=3)
    p.add_argument("--densities", default="0.6:1.0:0.05", help="start:stop:step or comma list")
    p.add_argument("--graphs", type=int, default=30, help="graphs per density")
    p.add_argument("--empirical", action="store_true", help="simulate instead of solving each chain")
    sim_args(p)
    output_args(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("graph", help="write a topology as an edge-list file")
    graph_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InfeasibleDensityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GossipError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
