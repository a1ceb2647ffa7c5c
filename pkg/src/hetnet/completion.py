"""Edge additions that make the simplex realisation of a graph complete.

A realisation is complete when every distribution vertex has out-degree
exactly two and heads a transitive triangle, so that the corresponding
equilibrium's two-dimensional unstable manifold is trapped between its two
targets. This module computes such additions for two-cycle graphs (with
closed-form minimal counts), predicts which equilibria pick up positive
transverse eigenvalues, generalises the closure to multi-cycle graphs, and
provides an exhaustive search as an independent check on the counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import BudgetExceededError, InvalidShapeError, TwoCycleCreatedError
from .graphs import (
    CycleDecomposition,
    DiGraph,
    Edge,
    canonical_cycle,
    distribution_vertices,
    is_b_point,
)


class Direction(Enum):
    """Which cycle the added edges point toward."""

    SHORT_TO_LONG = "short-to-long"
    LONG_TO_SHORT = "long-to-short"


@dataclass(frozen=True)
class ForceCycle:
    """Point all added edges toward this cycle (minimising its positive
    transverse eigenvalues); the cycle must be one of the decomposition's two."""

    cycle: tuple[int, ...]


DirectionPolicy = Union[Direction, ForceCycle]


class FailureKind(Enum):
    OUT_DEGREE_THREE = "out-degree-three"
    FORCED_THREE_CYCLE = "forced-three-cycle"
    MISSING_DELTA_CLIQUE = "missing-delta-clique"


@dataclass(frozen=True)
class ClosureFailure:
    """Why a distribution vertex cannot be (or is not) the head of a triangle."""

    vertex: int
    kind: FailureKind
    detail: tuple[int, ...]


@dataclass(frozen=True)
class CompletionPlan:
    """An ordered list of edge additions that completes a graph."""

    added_edges: tuple[Edge, ...]
    policy: Direction | None
    count: int
    minimal: bool | None
    target_vertex: int | None

    def apply(self, g: DiGraph) -> DiGraph:
        return g.with_edges(self.added_edges)


@dataclass(frozen=True)
class TransversePrediction:
    """Equilibria of one cycle predicted to carry a positive transverse eigenvalue."""

    cycle: tuple[int, ...]
    positive_count: int
    locations: tuple[int, ...]


def _validate_shape(k: int, l: int, m: int) -> None:
    if not (3 <= k <= l):
        raise InvalidShapeError(f"need 3 <= k <= l, got k={k}, l={l}")
    if not (0 <= m <= k - 1):
        raise InvalidShapeError(f"need 0 <= m <= k-1, got m={m} with k={k}")
    if m >= 1 and k == l == m + 1:
        # Both cycles would consist of the shared path plus the same closing
        # edge, i.e. they would coincide.
        raise InvalidShapeError(f"k = l = m+1 = {k} does not describe two distinct cycles")


def minimal_completion_count(k: int, l: int, m: int) -> int:
    """Minimal number of added edges for a complete realisation of a
    two-cycle graph with cycle lengths k <= l and m common edges."""
    _validate_shape(k, l, m)
    if m == 0 or k > m + 2:
        return k - 1
    if k == m + 2:
        return min(l - (m + 1), k - 1)
    # k == m + 1 (only possible for m >= 2)
    return min(l - (m + 2), k - 1)


def direction_of_minimum(k: int, l: int, m: int) -> Direction:
    """Direction whose construction attains the minimal count.

    For m >= 1 and k <= m+2 the long-to-short count is strictly smaller
    exactly when l < 2(m+1); ties resolve short-to-long.
    """
    _validate_shape(k, l, m)
    if m == 0 or k > m + 2:
        return Direction.SHORT_TO_LONG
    long_to_short = l - (m + 1) if k == m + 2 else l - (m + 2)
    return Direction.LONG_TO_SHORT if long_to_short < k - 1 else Direction.SHORT_TO_LONG


def resolve_policy(policy: DirectionPolicy, dec: CycleDecomposition) -> Direction:
    if isinstance(policy, Direction):
        return policy
    if isinstance(policy, ForceCycle):
        wanted = canonical_cycle(policy.cycle)
        if wanted == dec.cycle_long:
            return Direction.SHORT_TO_LONG
        if wanted == dec.cycle_short:
            return Direction.LONG_TO_SHORT
        raise InvalidShapeError(f"cycle {policy.cycle} is not part of the decomposition")
    raise TypeError(f"not a direction policy: {policy!r}")


def check_completeness(g_prime: DiGraph):
    """True iff every distribution vertex has out-degree exactly 2 and heads
    a transitive triangle; otherwise the list of violations."""
    failures = completeness_failures(g_prime)
    return True if not failures else failures


def completeness_failures(g_prime: DiGraph) -> list[ClosureFailure]:
    failures = []
    for v in distribution_vertices(g_prime):
        succ = g_prime.successors(v)
        if len(succ) >= 3:
            failures.append(ClosureFailure(v, FailureKind.OUT_DEGREE_THREE, tuple(succ)))
        elif not is_b_point(g_prime, v):
            failures.append(ClosureFailure(v, FailureKind.MISSING_DELTA_CLIQUE, tuple(succ)))
    return failures


def is_complete(g_prime: DiGraph) -> bool:
    return not completeness_failures(g_prime)


def complete_two_cycle(
    g: DiGraph, dec: CycleDecomposition, policy: DirectionPolicy
) -> CompletionPlan:
    """Complete a two-cycle graph with the single-target construction.

    Walks the source cycle starting just after the distribution vertex,
    connecting successive vertices to the fixed target (the vertex just
    after the distribution vertex on the sink cycle) until every
    distribution vertex heads a triangle.
    """
    direction = resolve_policy(policy, dec)
    if direction is Direction.SHORT_TO_LONG:
        source_cycle, sink_cycle = dec.cycle_short, dec.cycle_long
    else:
        source_cycle, sink_cycle = dec.cycle_long, dec.cycle_short

    def after(cycle: tuple[int, ...], v: int) -> tuple[int, ...]:
        i = cycle.index(v)
        return cycle[i + 1 :] + cycle[:i]

    target = after(sink_cycle, dec.v_d)[0]
    sources = after(source_cycle, dec.v_d)

    g2 = g
    added: list[Edge] = []
    idx = 0
    while not is_complete(g2):
        if idx >= len(sources):
            raise TwoCycleCreatedError("ran out of source vertices before completion")
        u = sources[idx]
        idx += 1
        if u == target or g2.has_edge(u, target) or g2.has_edge(target, u):
            raise TwoCycleCreatedError(f"adding {u} -> {target} would duplicate or reverse an edge")
        g2 = g2.with_edges([(u, target)])
        added.append((u, target))

    count = len(added)
    return CompletionPlan(
        added_edges=tuple(added),
        policy=direction,
        count=count,
        minimal=count == minimal_completion_count(dec.k, dec.l, dec.m),
        target_vertex=target,
    )


def predict_positive_transverse(
    dec: CycleDecomposition, plan: CompletionPlan
) -> list[TransversePrediction]:
    """Per cycle, the equilibria that carry a positive transverse eigenvalue
    once the plan's edges are realised.

    An equilibrium of a cycle gets a positive transverse eigenvalue for each
    outgoing edge other than its successor edge in that cycle, so the
    prediction reads off the completed edge set directly. The cycle the
    edges point toward keeps a single positive eigenvalue at the
    distribution node (one per common equilibrium when the walk crosses the
    shared path); the source cycle collects one at the distribution node
    plus one at every vertex that gained an outgoing edge.
    """
    all_edges = dec.all_edges() + plan.added_edges
    predictions = []
    for cycle in dec.cycles:
        succ = {cycle[i]: cycle[(i + 1) % len(cycle)] for i in range(len(cycle))}
        members = set(cycle)
        locations = sorted(
            {u for u, v in all_edges if u in members and v != succ[u]}
        )
        predictions.append(
            TransversePrediction(
                cycle=cycle,
                positive_count=len(locations),
                locations=tuple(locations),
            )
        )
    return predictions


def exhaustive_minimality_oracle(
    g: DiGraph, budget: int = 200_000, max_edges: int | None = None
) -> int | None:
    """Smallest number of admissible edge additions making `g` complete.

    Searches breadth-first over forced choices: any completion must contain,
    for each distribution vertex whose two successors are not yet joined, an
    edge between those successors in one of the two orientations. Candidate
    edges never create 1-/2-cycles and never push an out-degree above 2
    (out-degree 3 makes completeness unattainable by definition). Returns
    None when no completion exists within `max_edges` additions; raises
    BudgetExceededError when the search would examine more than `budget`
    states.
    """
    found = minimal_completion_witness(g, budget=budget, max_edges=max_edges)
    return None if found is None else len(found)


def minimal_completion_witness(
    g: DiGraph, budget: int = 200_000, max_edges: int | None = None
) -> tuple[Edge, ...] | None:
    """One minimum-cardinality edge set certifying the oracle's count."""
    if g.n > 14:
        raise BudgetExceededError(f"oracle limited to 14 vertices, got {g.n}")
    if max_edges is None:
        max_edges = 2 * g.n

    def first_unsatisfied(graph: DiGraph) -> tuple[int, tuple[int, ...]] | None:
        for v in distribution_vertices(graph):
            succ = graph.successors(v)
            if len(succ) >= 3:
                return (v, tuple(succ))  # dead branch, handled by caller
            if not is_b_point(graph, v):
                return (v, tuple(succ))
        return None

    frontier: list[tuple[DiGraph, tuple[Edge, ...]]] = [(g, ())]
    seen: set[frozenset[Edge]] = {frozenset()}
    examined = 0
    for _depth in range(max_edges + 1):
        next_frontier: list[tuple[DiGraph, tuple[Edge, ...]]] = []
        for graph, added in frontier:
            examined += 1
            if examined > budget:
                raise BudgetExceededError(f"oracle budget of {budget} states exceeded")
            pending = first_unsatisfied(graph)
            if pending is None:
                return added
            v, succ = pending
            if len(succ) != 2:
                continue
            a, b = succ
            for tail, head in ((a, b), (b, a)):
                if graph.out_degree(tail) >= 2:
                    continue
                if graph.has_edge(head, tail) or graph.has_edge(tail, head):
                    continue
                key = frozenset(added) | {(tail, head)}
                if key in seen:
                    continue
                seen.add(key)
                next_frontier.append((graph.with_edges([(tail, head)]), added + ((tail, head),)))
        frontier = next_frontier
        if not frontier:
            return None
    return None


def delta_closure_general(g: DiGraph):
    """Greedy triangle closure for graphs with any number of cycles.

    Processes the originally unsatisfied distribution vertices in ascending
    id. For each, it adds one edge between the two successors (preferring the
    orientation that keeps all out-degrees at most 2, smaller tail on a tie)
    and then repairs the resulting chain of new distribution vertices by
    connecting each one's other successor to the same head, as in the
    two-cycle construction. A chain is abandoned, and a failure recorded,
    when it would push a vertex to out-degree 3; when both orientations of
    the very first edge would do so and both successor triples contain a
    directed 3-cycle, the failure is the forced-three-cycle kind.

    Returns a CompletionPlan on success, otherwise the list of failures.
    """
    failures: list[ClosureFailure] = []
    g2 = g
    added_total: list[Edge] = []
    needed_pairs: set[frozenset[int]] = set()

    for v in sorted(distribution_vertices(g)):
        succ = g2.successors(v)
        if len(succ) >= 3:
            failures.append(ClosureFailure(v, FailureKind.OUT_DEGREE_THREE, tuple(succ)))
            continue
        if is_b_point(g2, v):
            continue
        a, b = sorted(succ)
        needed_pairs.add(frozenset((a, b)))

        orientations = [(t, h) for t, h in ((a, b), (b, a)) if g2.out_degree(t) <= 1]
        if not orientations:
            all_cyclic = all(
                _successor_three_cycle(g2, tail, head) for tail, head in ((a, b), (b, a))
            )
            kind = FailureKind.FORCED_THREE_CYCLE if all_cyclic else FailureKind.OUT_DEGREE_THREE
            failures.append(ClosureFailure(v, kind, (a, b)))
            continue

        result = _run_chain(g2, orientations[0])
        if isinstance(result, ClosureFailure):
            failures.append(result)
            continue
        chain_edges = result
        g2 = g2.with_edges(chain_edges)
        added_total.extend(chain_edges)

    if failures:
        return failures
    count = len(added_total)
    return CompletionPlan(
        added_edges=tuple(added_total),
        policy=None,
        count=count,
        # Each needed successor pair requires at least one edge of its own,
        # so matching that bound certifies minimality; otherwise unknown.
        minimal=True if count == len(needed_pairs) else None,
        target_vertex=None,
    )


def _successor_three_cycle(g: DiGraph, tail: int, head: int) -> bool:
    """Would `tail`, at out-degree 3 after gaining `tail -> head`, see its
    three successors form a directed 3-cycle?"""
    succ = list(g.successors(tail)) + [head]
    if len(succ) != 3:
        return False
    x, y, z = succ
    forward = g.has_edge(x, y) and g.has_edge(y, z) and g.has_edge(z, x)
    backward = g.has_edge(x, z) and g.has_edge(z, y) and g.has_edge(y, x)
    return forward or backward


def _run_chain(g: DiGraph, first: Edge):
    """Add `first` and then the forced follow-up edges toward the same head.

    Returns the list of edges on success, or the ClosureFailure that blocks
    the chain (no edges are committed in that case).
    """
    tail, head = first
    edges: list[Edge] = [first]
    g2 = g.with_edges([first])
    current = tail
    while True:
        succ = g2.successors(current)
        other = succ[0] if succ[1] == head else succ[1]
        if g2.has_edge(other, head) or g2.has_edge(head, other):
            return edges
        if g2.out_degree(other) >= 2:
            if _successor_three_cycle(g2, other, head):
                kind = FailureKind.FORCED_THREE_CYCLE
            else:
                kind = FailureKind.OUT_DEGREE_THREE
            return ClosureFailure(other, kind, tuple(g2.successors(other)) + (head,))
        g2 = g2.with_edges([(other, head)])
        edges.append((other, head))
        current = other
