"""Graph instances: seeded G(n, p) generation and DIMACS ``.col`` files."""
from __future__ import annotations

from dataclasses import dataclass, field

from cspbench.bench.rng import SplitMix64


class DimacsError(ValueError):
    def __init__(self, message, line=0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class GraphInstance:
    n: int
    edges: list = field(default_factory=list)  # sorted (u, v) with u < v
    k: int = 4
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u},{v}) outside 1..{self.n}")
            norm.add((min(u, v), max(u, v)))
        self.edges = sorted(norm)


def gen_graph(n: int, p: float, seed: int, k: int = 4) -> GraphInstance:
    """G(n, p): each pair u < v (lexicographic order) kept when a draw is below p."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = SplitMix64(seed)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p]
    return GraphInstance(n, edges, k, f"gnp-{n}-{p}-{seed}")


def read_dimacs(text: str, k: int = 4, name: str = "") -> GraphInstance:
    """Parse ``c`` / ``p edge n m`` / ``e u v`` lines.

    Edges listed in both directions are merged; the edge count in the
    problem line must equal the number of ``e`` lines.
    """
    n = m = None
    raw = []
    for ln, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if n is not None:
                raise DimacsError("second problem line", ln)
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise DimacsError("expected 'p edge <n> <m>'", ln)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("non-integer size", ln) from None
        elif parts[0] == "e":
            if n is None:
                raise DimacsError("edge before the problem line", ln)
            if len(parts) != 3:
                raise DimacsError("expected 'e <u> <v>'", ln)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsError("non-integer vertex", ln) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(f"vertex outside 1..{n}", ln)
            if u == v:
                raise DimacsError("self-loop", ln)
            raw.append((u, v))
        else:
            raise DimacsError(f"unknown line type {parts[0]!r}", ln)
    if n is None:
        raise DimacsError("missing problem line")
    if m != len(raw):
        raise DimacsError(f"problem line announces {m} edges, found {len(raw)}")
    return GraphInstance(n, raw, k, name)


def write_dimacs(g: GraphInstance) -> str:
    lines = []
    if g.name:
        lines.append(f"c {g.name}")
    lines.append(f"p edge {g.n} {len(g.edges)}")
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
