"""Directed graphs made of cycles and the structure detectors built on them.

Vertices are 1-based integers. Graphs are immutable; every operation is a
pure function, so values can be shared freely between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    GraphFormatError,
    NonContiguousSharedEdgesError,
    NotTwoCyclesError,
    SimplexAdmissibilityError,
)

Edge = tuple[int, int]

_EDGE_RE = re.compile(r"^(\d+)\s*->\s*(\d+)$")
_LABEL_RE = re.compile(r"^label\s+(\d+)\s+(\S.*)$")


@dataclass(frozen=True)
class DiGraph:
    """A directed graph on vertices 1..n with an ordered, duplicate-free edge set."""

    n: int
    edges: tuple[Edge, ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        seen: set[Edge] = set()
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphFormatError(f"edge {u} -> {v} references a vertex outside 1..{self.n}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge {u} -> {v}")
            seen.add((u, v))

    @cached_property
    def _succ(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in self.vertices()}
        for u, v in self.edges:
            out[u].append(v)
        return {v: tuple(ws) for v, ws in out.items()}

    @cached_property
    def _pred(self) -> dict[int, tuple[int, ...]]:
        inc: dict[int, list[int]] = {v: [] for v in self.vertices()}
        for u, v in self.edges:
            inc[v].append(u)
        return {v: tuple(ws) for v, ws in inc.items()}

    @cached_property
    def _edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def successors(self, v: int) -> tuple[int, ...]:
        return self._succ[v]

    def predecessors(self, v: int) -> tuple[int, ...]:
        return self._pred[v]

    def out_degree(self, v: int) -> int:
        return len(self._succ[v])

    def in_degree(self, v: int) -> int:
        return len(self._pred[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edge_set

    def with_edges(self, extra: Iterable[Edge]) -> "DiGraph":
        """Return a new graph with `extra` edges appended, preserving order."""
        return DiGraph(self.n, self.edges + tuple(extra), self.labels)

    def label(self, v: int) -> str:
        return self.labels.get(v, str(v))


@dataclass(frozen=True)
class VertexRole:
    """Degree bookkeeping for one vertex."""

    vertex: int
    out_degree: int
    in_degree: int

    @property
    def is_distribution(self) -> bool:
        return self.out_degree >= 2

    @property
    def is_collection(self) -> bool:
        return self.in_degree >= 2


@dataclass(frozen=True)
class DeltaClique:
    """A triangle that is not strongly connected.

    `b_point` is its out-degree-2 vertex; `targets` is ordered so that the
    internal edge runs targets[0] -> targets[1].
    """

    b_point: int
    targets: tuple[int, int]


@dataclass(frozen=True)
class CycleDecomposition:
    """The two cycles of a two-cycle graph and their shared structure.

    Cycles are stored in canonical rotation (smallest vertex first) and in
    traversal order. `shared_path` runs from the collection vertex to the
    distribution vertex along the common edges; it is empty when m = 0.
    """

    cycle_short: tuple[int, ...]
    cycle_long: tuple[int, ...]
    k: int
    l: int
    m: int
    shared_path: tuple[int, ...]
    v_d: int
    v_c: int

    @property
    def cycles(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.cycle_short, self.cycle_long)

    def edges_of(self, cycle: tuple[int, ...]) -> tuple[Edge, ...]:
        return cycle_edges(cycle)

    def all_edges(self) -> tuple[Edge, ...]:
        merged = list(cycle_edges(self.cycle_short))
        for e in cycle_edges(self.cycle_long):
            if e not in merged:
                merged.append(e)
        return tuple(merged)


def cycle_edges(cycle: tuple[int, ...]) -> tuple[Edge, ...]:
    """Edges of a cyclic vertex sequence, closing back to the first vertex."""
    q = len(cycle)
    return tuple((cycle[i], cycle[(i + 1) % q]) for i in range(q))


def canonical_cycle(cycle: Iterable[int]) -> tuple[int, ...]:
    """Rotate a cyclic vertex sequence so its smallest vertex comes first."""
    seq = tuple(cycle)
    i = seq.index(min(seq))
    return seq[i:] + seq[:i]


def parse_graph(text: str) -> DiGraph:
    """Parse an edge-list document into a DiGraph.

    Format: one `<int> -> <int>` edge per line, optional `label <int> <name>`
    lines, `#` comments, blank lines ignored. Vertex ids must be contiguous
    from 1.
    """
    edges: list[Edge] = []
    labels: dict[int, str] = {}
    seen: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LABEL_RE.match(line)
        if m:
            labels[int(m.group(1))] = m.group(2).strip()
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise GraphFormatError(f"cannot parse {line!r}", line=lineno)
        u, v = int(m.group(1)), int(m.group(2))
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", line=lineno)
        if u < 1 or v < 1:
            raise GraphFormatError("vertex ids must be positive", line=lineno)
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {u} -> {v}", line=lineno)
        seen.add((u, v))
        edges.append((u, v))
    if not edges:
        raise GraphFormatError("no edges found")
    n = max(max(u, v) for u, v in edges)
    used = {w for e in edges for w in e}
    missing = sorted(set(range(1, n + 1)) - used)
    if missing:
        raise GraphFormatError(f"vertex ids are not contiguous from 1; unused: {missing}")
    bad = sorted(v for v in labels if v > n)
    if bad:
        raise GraphFormatError(f"label for unknown vertex {bad[0]}")
    return DiGraph(n, tuple(edges), labels)


def serialize_graph(g: DiGraph) -> str:
    """Inverse of parse_graph (labels first, then edges)."""
    lines = [f"label {v} {name}" for v, name in sorted(g.labels.items())]
    lines += [f"{u} -> {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def admissibility_violations(g: DiGraph) -> list[str]:
    """Reasons why `g` cannot feed the simplex construction (empty if none)."""
    problems = []
    if g.n < 3:
        problems.append("fewer than 3 vertices")
    for u, v in g.edges:
        if u < v and g.has_edge(v, u):
            problems.append(f"2-cycle between {u} and {v}")
    return problems


def require_simplex_admissible(g: DiGraph) -> None:
    problems = admissibility_violations(g)
    if problems:
        raise SimplexAdmissibilityError("; ".join(problems))


def vertex_roles(g: DiGraph) -> list[VertexRole]:
    return [VertexRole(v, g.out_degree(v), g.in_degree(v)) for v in g.vertices()]


def distribution_vertices(g: DiGraph) -> list[int]:
    return [v for v in g.vertices() if g.out_degree(v) >= 2]


def collection_vertices(g: DiGraph) -> list[int]:
    return [v for v in g.vertices() if g.in_degree(v) >= 2]


def is_strongly_connected(g: DiGraph) -> bool:
    """True iff a directed path exists between every ordered vertex pair."""
    if g.n == 0:
        return True

    def reaches_all(neigh) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            for w in neigh(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == g.n

    return reaches_all(g.successors) and reaches_all(g.predecessors)


def enumerate_cycles(g: DiGraph) -> list[tuple[int, ...]]:
    """All simple directed cycles, once each, in canonical rotation.

    Exhaustive DFS anchored at each cycle's smallest vertex; fine for the
    graph sizes this package targets (corpus graphs have at most 14 vertices).
    """
    require_simplex_admissible(g)
    cycles: list[tuple[int, ...]] = []
    for start in g.vertices():
        # Only traverse vertices >= start so each cycle is found exactly once,
        # anchored at its minimum vertex.
        path = [start]
        on_path = {start}
        stack = [iter(g.successors(start))]
        while stack:
            advanced = False
            for w in stack[-1]:
                if w == start:
                    cycles.append(tuple(path))
                elif w > start and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    stack.append(iter(g.successors(w)))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_path.discard(path.pop())
    cycles.sort(key=lambda c: (len(c), c))
    return cycles


def decompose_two_cycles(g: DiGraph) -> CycleDecomposition:
    """Split a two-cycle graph into its cycles, common path and special vertices."""
    cycles = enumerate_cycles(g)
    if len(cycles) != 2:
        raise NotTwoCyclesError(f"expected exactly 2 simple cycles, found {len(cycles)}")
    a, b = cycles
    if len(a) > len(b) or (len(a) == len(b) and a > b):
        a, b = b, a
    short_edges = set(cycle_edges(a))
    long_edges = set(cycle_edges(b))
    common = short_edges & long_edges
    m = len(common)

    dists = distribution_vertices(g)
    colls = collection_vertices(g)
    if len(dists) != 1 or len(colls) != 1:
        raise NotTwoCyclesError(
            f"two-cycle graphs have one distribution and one collection vertex, "
            f"found {len(dists)} and {len(colls)}"
        )
    v_d, v_c = dists[0], colls[0]

    if m == 0:
        if v_d != v_c:
            raise NonContiguousSharedEdgesError(
                "no common edges but distribution and collection vertices differ"
            )
        shared: tuple[int, ...] = ()
    else:
        # Walk the common edges from the collection vertex; they must chain
        # without interruption up to the distribution vertex.
        heads = {u: v for u, v in common}
        path = [v_c]
        while path[-1] in heads:
            path.append(heads.pop(path[-1]))
        if heads or len(path) != m + 1 or path[-1] != v_d:
            raise NonContiguousSharedEdgesError("common edges do not form one path v_c -> v_d")
        shared = tuple(path)

    return CycleDecomposition(
        cycle_short=a,
        cycle_long=b,
        k=len(a),
        l=len(b),
        m=m,
        shared_path=shared,
        v_d=v_d,
        v_c=v_c,
    )


def find_delta_cliques(g: DiGraph) -> list[DeltaClique]:
    """Every transitive triangle of `g`, keyed by its b-point.

    A triangle with exactly one edge per vertex pair is either a 3-cycle
    (strongly connected, not listed) or transitive: one source with internal
    out-degree 2, a middle vertex, and a sink.
    """
    cliques = []
    for b in g.vertices():
        succ = g.successors(b)
        for i in range(len(succ)):
            for j in range(i + 1, len(succ)):
                a, c = succ[i], succ[j]
                if g.has_edge(a, c):
                    cliques.append(DeltaClique(b, (a, c)))
                elif g.has_edge(c, a):
                    cliques.append(DeltaClique(b, (c, a)))
    cliques.sort(key=lambda d: (d.b_point, d.targets))
    return cliques


def is_b_point(g: DiGraph, v: int) -> bool:
    """True iff `v` has out-degree exactly 2 and heads a transitive triangle."""
    if g.out_degree(v) != 2:
        return False
    a, b = g.successors(v)
    return g.has_edge(a, b) or g.has_edge(b, a)


def is_tournament(g: DiGraph) -> bool:
    """True iff exactly one directed edge exists between every unordered pair."""
    for u in g.vertices():
        for v in range(u + 1, g.n + 1):
            if g.has_edge(u, v) == g.has_edge(v, u):
                return False
    return True
