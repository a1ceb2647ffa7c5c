"""Built-in example graphs: the classic two-cycle networks from the
literature plus the multi-cycle instances used to exercise the closure
machinery, and a parametric two-cycle constructor for sweeps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import InvalidShapeError
from .graphs import DiGraph


@dataclass(frozen=True)
class CorpusEntry:
    """One catalogue row; `graph` is None for entries that cannot be
    produced by the simplex construction (they are listed for context and
    blocked from realisation commands)."""

    name: str
    m: int | None
    k: int | None
    l: int | None
    dimension: int | None
    simplex_realisable: bool
    source: str
    build: Callable[[], DiGraph] | None
    note: str = ""

    @property
    def graph(self) -> DiGraph | None:
        return self.build() if self.build is not None else None


def _g(n: int, edges: list[tuple[int, int]]) -> DiGraph:
    return DiGraph(n, tuple(edges))


def kirk_silber() -> DiGraph:
    # 3-cycle 1>2>3 and 3-cycle 1>2>4 sharing the edge 1>2.
    return _g(4, [(1, 2), (2, 3), (3, 1), (2, 4), (4, 1)])


def kirk_silber_completed() -> DiGraph:
    return kirk_silber().with_edges([(3, 4)])


def bowtie() -> DiGraph:
    # Two 3-cycles sharing only the vertex 2.
    return _g(5, [(1, 2), (2, 3), (3, 1), (2, 4), (4, 5), (5, 2)])


def bowtie_completed() -> DiGraph:
    return bowtie().with_edges([(3, 4), (1, 4)])


def house() -> DiGraph:
    # 3-cycle 1>2>3 and 4-cycle 1>2>4>5 sharing the edge 1>2.
    return _g(5, [(1, 2), (2, 3), (3, 1), (2, 4), (4, 5), (5, 1)])


def house_completed_short(g: DiGraph | None = None) -> DiGraph:
    """Completion pointing toward the 3-cycle (edges from 4 and 5 to 3)."""
    return house().with_edges([(4, 3), (5, 3)])


def house_completed_long() -> DiGraph:
    """Completion pointing toward the 4-cycle (edges from 3 and 1 to 4)."""
    return house().with_edges([(3, 4), (1, 4)])


def two_squares() -> DiGraph:
    """Two 4-cycles sharing one edge (smallest k = l = 4 instance)."""
    return make_two_cycle(4, 4, 1)


def b3_c4() -> DiGraph:
    """A 3-cycle and a 4-cycle sharing two edges; complete as-is, and a
    complete network whose graph is not a tournament (no edge between 2
    and 4)."""
    return _g(4, [(1, 2), (1, 3), (2, 3), (3, 4), (4, 1)])


def donut_raw() -> DiGraph:
    """Four 6-cycles: two branch pairs between two distribution and two
    collection vertices (1 and 5 distribute; 2 and 6 collect)."""
    return _g(
        8,
        [
            (2, 1), (3, 2), (4, 2), (5, 3), (5, 4), (6, 5),
            (1, 7), (7, 6), (1, 8), (8, 6),
        ],
    )


def donut() -> DiGraph:
    """The donut with the two closing edges that make it complete."""
    return donut_raw().with_edges([(7, 8), (3, 4)])


def donut_large() -> DiGraph:
    """A donut with longer branches; the chain of closures started at
    vertex 1 runs around a branch and ends up demanding a third outgoing
    edge at vertex 5."""
    return _g(
        14,
        [
            (2, 1), (3, 2), (4, 2), (5, 3), (5, 4), (6, 5),
            (1, 7), (7, 8), (8, 9), (9, 10), (10, 6),
            (1, 11), (11, 12), (12, 13), (13, 14), (14, 6),
        ],
    )


def depth_two_trap_core() -> DiGraph:
    """Six vertices where closing the triangle at vertex 1 is impossible:
    either orientation of the needed edge pushes a vertex to out-degree 3
    whose three successors form a directed 3-cycle. Not strongly connected
    on its own (nothing enters vertex 1)."""
    return _g(
        6,
        [
            (1, 2), (1, 3), (2, 5), (3, 5), (4, 3), (6, 2),
            (2, 4), (3, 6), (5, 4), (5, 6),
        ],
    )


def depth_two_trap() -> DiGraph:
    """The trap graph made strongly connected with the edge 6 -> 1, which
    immediately heads a triangle (1 -> 2 closes it) and leaves the blocked
    vertex 1 untouched."""
    return depth_two_trap_core().with_edges([(6, 1)])


def make_two_cycle(k: int, l: int, m: int) -> DiGraph:
    """A canonical two-cycle graph with cycle lengths k <= l and m common edges.

    Vertex 1 is the distribution vertex; the short branch, long branch and
    shared path are numbered consecutively after it. For m = 0 the two
    cycles share only vertex 1.
    """
    if not (3 <= k <= l) or not (0 <= m <= k - 1) or (m >= 1 and k == l == m + 1):
        raise InvalidShapeError(f"no two-cycle graph with k={k}, l={l}, m={m}")
    edges: list[tuple[int, int]] = []
    nxt = 2

    def chain(length: int) -> list[int]:
        nonlocal nxt
        ids = list(range(nxt, nxt + length))
        nxt += length
        return ids

    short_branch = chain(k - m - 1)
    long_branch = chain(l - m - 1)
    shared = chain(m) if m >= 1 else []  # v_c first, then up to v_d = 1

    def path(seq: list[int]) -> None:
        edges.extend((seq[i], seq[i + 1]) for i in range(len(seq) - 1))

    if m == 0:
        path([1] + short_branch + [1])
        path([1] + long_branch + [1])
    else:
        path([1] + short_branch + shared + [1])
        path([1] + long_branch + [shared[0]])
    # Dedupe while preserving order (the closing shared path appears twice).
    seen = set()
    unique = [e for e in edges if not (e in seen or seen.add(e))]
    return DiGraph(nxt - 1, tuple(unique))


CORPUS: dict[str, CorpusEntry] = {
    e.name: e
    for e in [
        CorpusEntry("c2-c2", 0, 2, 2, 6, False, "quotient network", None,
                    "cycles of length 2 cannot be drawn without 2-cycles"),
        CorpusEntry("bowtie", 0, 3, 3, 5, True, "Ashwin & Postlethwaite (2013)", bowtie),
        CorpusEntry("b2-b2", 1, 2, 2, 4, False, "quotient network", None,
                    "cycles of length 2 cannot be drawn without 2-cycles"),
        CorpusEntry("kirk-silber", 1, 3, 3, 4, True, "Kirk & Silber (1994)", kirk_silber),
        CorpusEntry("house", 1, 3, 4, 5, True, "classic R^5 example", house),
        CorpusEntry("two-squares", 1, 4, 4, 6, True, "Podvigina (2023)", two_squares),
        CorpusEntry("b3-c4", 2, 3, 4, 4, True, "Brannath (1994)", b3_c4),
        CorpusEntry("torus-6-6", 2, 6, 6, None, False, "phase-oscillator model", None,
                    "lives on a torus, not produced by the simplex construction"),
        CorpusEntry("kirk-silber-completed", None, None, None, 4, True,
                    "Brannath (1994)", kirk_silber_completed,
                    "kirk-silber plus the edge 3 -> 4; three cycles"),
        CorpusEntry("bowtie-completed", None, None, None, 5, True, "",
                    bowtie_completed, "bowtie plus 3 -> 4 and 1 -> 4"),
        CorpusEntry("house-completed-a", None, None, None, 5, True, "",
                    house_completed_short, "house plus 4 -> 3 and 5 -> 3"),
        CorpusEntry("house-completed-b", None, None, None, 5, True, "",
                    house_completed_long, "house plus 3 -> 4 and 1 -> 4"),
        CorpusEntry("donut", None, None, None, 8, True, "", donut,
                    "four 6-cycles with both closing edges present"),
        CorpusEntry("donut-raw", None, None, None, 8, True, "", donut_raw,
                    "four 6-cycles, closures missing at vertices 1 and 5"),
        CorpusEntry("donut-large", None, None, None, 14, True, "", donut_large,
                    "closure chain forces out-degree 3 at vertex 5"),
        CorpusEntry("depth-two-trap", None, None, None, 6, True, "", depth_two_trap,
                    "triangle at vertex 1 cannot be closed in either orientation"),
    ]
}


def get(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        known = ", ".join(sorted(CORPUS))
        raise KeyError(f"unknown corpus graph {name!r}; known: {known}") from None
