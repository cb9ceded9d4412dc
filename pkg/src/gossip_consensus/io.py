"""Edge-list files, state strings, and JSON/CSV report serialization.

External formats use 1-based node ids.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Sequence

from .graph import DirectedGraph, from_edge_list


def parse_edge_list(text: str) -> DirectedGraph:
    """Line 1 is ``n``; each other non-empty line is ``u v`` (1-based). ``#`` starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("edge list is empty")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the node count, got {lines[0]!r}") from None
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"edge line {lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        pairs.append((u - 1, v - 1))
    return from_edge_list(n, pairs)


def format_edge_list(g: DirectedGraph) -> str:
    lines = [str(g.n)] + [f"{u + 1} {v + 1}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> DirectedGraph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: DirectedGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def parse_state(text: str) -> tuple[int, ...]:
    """``"1122"`` (one digit per node, node 1 first) or ``"1,12,3"``."""
    text = text.strip()
    if not text:
        raise ValueError("empty state string")
    try:
        if "," in text:
            return tuple(int(p) for p in text.split(","))
        return tuple(int(ch) for ch in text)
    except ValueError:
        raise ValueError(f"invalid state string {text!r}") from None


def format_state(x: Sequence[int]) -> str:
    if all(1 <= v <= 9 for v in x):
        return "".join(str(v) for v in x)
    return ",".join(str(v) for v in x)


def dumps_json(report: dict[str, Any]) -> str:
    # json emits shortest round-trip reprs for floats
    return json.dumps(report, indent=2, allow_nan=True) + "\n"


def dumps_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def format_table(header: Sequence[str], rows: Sequence[Sequence[Any]], decimals: int = 4) -> str:
    """Fixed-width human table."""

    def cell(v: Any) -> str:
        if isinstance(v, float):
            return f"{v:.{decimals}f}"
        return str(v)

    body = [[cell(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(header)]
    out = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    out.append("  ".join("-" * w for w in widths))
    out.extend("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body)
    return "\n".join(out) + "\n"
