"""Polynomial vector fields realising a digraph as a heteroclinic network.

The field is the cubic

    dx_j/dt = tau * x_j * (1 - |x|^2 + sum_{k != j} a_jk x_k^2)

which places an equilibrium on every coordinate axis, keeps all coordinate
subspaces invariant, and is equivariant under sign changes of any
coordinate. Its Jacobian at the axis-k equilibrium is diagonal with entries
tau*a_jk off the axis and the radial value -r on it, so prescribing the
coefficient matrix prescribes the full eigenvalue structure: positive
entries realise edges, negative ones transverse or contracting directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    MisclassifiedSignError,
    SignError,
    SpecMismatchError,
)
from .graphs import DiGraph, Edge, enumerate_cycles, require_simplex_admissible


@dataclass(frozen=True)
class EigenSpec:
    """Eigenvalue magnitudes for a realisation.

    `expanding[(u, v)]` and `contracting[(u, v)]` are positive magnitudes for
    the edge u -> v (expanding seen at the tail, contracting at the head).
    `transverse[(v, d)]` is the signed eigenvalue at the axis-v equilibrium
    in direction d, for non-adjacent ordered pairs; unspecified pairs take
    `default_transverse`, which must be negative. The radial magnitude is
    realised by a uniform time rescaling (the cubic form itself pins the
    radial value at -2).
    """

    expanding: dict[Edge, float] = field(default_factory=dict)
    contracting: dict[Edge, float] = field(default_factory=dict)
    transverse: dict[tuple[int, int], float] = field(default_factory=dict)
    radial: float = 2.0
    default_expanding: float = 1.0
    default_contracting: float = 2.0
    default_transverse: float = -1.0

    def __post_init__(self):
        if self.radial <= 0:
            raise SignError(f"radial magnitude must be positive, got {self.radial}")
        if self.default_expanding <= 0 or self.default_contracting <= 0:
            raise SignError("default expanding/contracting magnitudes must be positive")
        if self.default_transverse >= 0:
            raise SignError(
                f"default transverse value must be negative, got {self.default_transverse}"
            )
        for name, table in (("expanding", self.expanding), ("contracting", self.contracting)):
            for key, value in table.items():
                if value <= 0:
                    raise SignError(f"{name} magnitude for {key} must be positive, got {value}")


@dataclass(frozen=True)
class Equilibrium:
    """The axis equilibrium xi_j, represented in the positive orthant."""

    axis: int
    position: np.ndarray

    @property
    def symbol(self) -> str:
        return f"xi_{self.axis}"

    def __repr__(self):
        return f"Equilibrium(axis={self.axis})"


@dataclass(frozen=True)
class QuasiSimpleCycle:
    """A simple cycle of the graph viewed inside the realisation: each
    connection lies in the coordinate plane of its two equilibria."""

    equilibria: tuple[int, ...]
    planes: tuple[tuple[int, int], ...]
    axes: tuple[int, ...]

    def __len__(self):
        return len(self.equilibria)


@dataclass(frozen=True)
class EquilibriumEigenvalues:
    """Classified Jacobian spectrum at one equilibrium of a cycle.

    Transverse values are ordered with the cycle's own non-adjacent vertices
    first (in traversal order from two steps ahead) and off-cycle directions
    after them in ascending axis id; `transverse_directions` records the
    axis behind each slot. That ordering is what the transition-matrix
    permutation block acts on.
    """

    vertex: int
    radial: float
    contracting: float
    expanding: float
    transverse: tuple[float, ...]
    transverse_directions: tuple[int, ...]


@dataclass(frozen=True)
class EigenvalueTable:
    cycle: tuple[int, ...]
    rows: tuple[EquilibriumEigenvalues, ...]

    @property
    def n_t(self) -> int:
        return len(self.rows[0].transverse) if self.rows else 0


class VectorField:
    """Immutable realisation of a digraph; evaluation and Jacobians are pure."""

    def __init__(self, matrix: np.ndarray, edges: tuple[Edge, ...] = (), radial: float = 2.0):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SpecMismatchError(f"coefficient matrix must be square, got {matrix.shape}")
        self.n = matrix.shape[0]
        self.radial = float(radial)
        self.time_scale = self.radial / 2.0
        a = matrix.copy()
        np.fill_diagonal(a, 0.0)
        a.setflags(write=False)
        self.a = a
        self.edges = tuple(edges)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.sum(x * x)
        return self.time_scale * x * (1.0 - s + self.a @ (x * x))

    def eval_many(self, states: np.ndarray) -> np.ndarray:
        """Vectorised evaluation over rows of `states` (shape m x n)."""
        sq = states * states
        s = np.sum(sq, axis=1, keepdims=True)
        return self.time_scale * states * (1.0 - s + sq @ self.a.T)

    def equilibria(self) -> list[Equilibrium]:
        out = []
        for j in range(1, self.n + 1):
            pos = np.zeros(self.n)
            pos[j - 1] = 1.0
            pos.setflags(write=False)
            out.append(Equilibrium(axis=j, position=pos))
        return out

    def equilibrium(self, axis: int) -> Equilibrium:
        return self.equilibria()[axis - 1]

    @cached_property
    def _edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def eigenvalue_at(self, axis: int, direction: int) -> float:
        """Jacobian eigenvalue at the axis equilibrium in a coordinate direction."""
        if direction == axis:
            return -self.radial
        return self.time_scale * self.a[direction - 1, axis - 1]

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.n,
            "matrix": [float(v) for v in self.a.reshape(-1)],
            "time_scale": self.time_scale,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "VectorField":
        n = int(data["dimension"])
        matrix = np.array(data["matrix"], dtype=float).reshape(n, n)
        radial = 2.0 * float(data.get("time_scale", 1.0))
        return cls(matrix, radial=radial)


def build_vector_field(g_prime: DiGraph, spec: EigenSpec | None = None) -> VectorField:
    """Assemble the coefficient matrix realising `g_prime`.

    For an edge u -> v the entry a[v, u] is the (positive) expanding
    magnitude and a[u, v] the negated contracting magnitude; every remaining
    off-diagonal ordered pair takes its transverse value.
    """
    require_simplex_admissible(g_prime)
    spec = spec or EigenSpec()

    for key in spec.expanding:
        if not g_prime.has_edge(*key):
            raise SpecMismatchError(f"expanding value given for non-edge {key}")
    for key in spec.contracting:
        if not g_prime.has_edge(*key):
            raise SpecMismatchError(f"contracting value given for non-edge {key}")
    for at, direction in spec.transverse:
        if g_prime.has_edge(at, direction) or g_prime.has_edge(direction, at):
            raise SpecMismatchError(
                f"transverse value given for adjacent pair ({at}, {direction})"
            )

    n = g_prime.n
    tau = spec.radial / 2.0
    a = np.zeros((n, n))
    for k in range(1, n + 1):
        for j in range(1, n + 1):
            if j == k:
                continue
            if g_prime.has_edge(k, j):
                value = spec.expanding.get((k, j), spec.default_expanding)
            elif g_prime.has_edge(j, k):
                value = -spec.contracting.get((j, k), spec.default_contracting)
            else:
                value = spec.transverse.get((k, j), spec.default_transverse)
            # Store value/tau so the realised eigenvalue is the prescribed one
            # after the uniform time rescaling that sets the radial value.
            a[j - 1, k - 1] = value / tau
    return VectorField(a, edges=g_prime.edges, radial=spec.radial)


def jacobian_at(vf: VectorField, eq: Equilibrium) -> np.ndarray:
    """Analytic Jacobian at an axis equilibrium (diagonal)."""
    diag = np.array([vf.eigenvalue_at(eq.axis, d) for d in range(1, vf.n + 1)])
    return np.diag(diag)


def extract_quasi_simple_cycles(g_prime: DiGraph) -> list[QuasiSimpleCycle]:
    """One QuasiSimpleCycle per simple directed cycle of the graph."""
    out = []
    for cyc in enumerate_cycles(g_prime):
        q = len(cyc)
        planes = tuple((cyc[i], cyc[(i + 1) % q]) for i in range(q))
        out.append(QuasiSimpleCycle(equilibria=cyc, planes=planes, axes=cyc))
    return out


def transverse_order(cycle: tuple[int, ...], position: int, n: int) -> tuple[int, ...]:
    """Slot order of the transverse directions at one cycle equilibrium:
    the cycle's own non-adjacent vertices (from two steps ahead, in cycle
    order) and then all off-cycle axes ascending."""
    q = len(cycle)
    in_cycle = tuple(cycle[(position + 2 + i) % q] for i in range(q - 3))
    off_cycle = tuple(d for d in range(1, n + 1) if d not in cycle)
    return in_cycle + off_cycle


def classify_eigenvalues(vf: VectorField, cycle: QuasiSimpleCycle) -> EigenvalueTable:
    """Split each equilibrium's spectrum into radial, contracting, expanding
    and transverse parts relative to the cycle."""
    q = len(cycle.equilibria)
    rows = []
    for i, v in enumerate(cycle.equilibria):
        pred = cycle.equilibria[(i - 1) % q]
        succ = cycle.equilibria[(i + 1) % q]
        contracting = vf.eigenvalue_at(v, pred)
        expanding = vf.eigenvalue_at(v, succ)
        if contracting >= 0:
            raise MisclassifiedSignError(
                f"contracting eigenvalue at {v} toward {pred} is {contracting} >= 0"
            )
        if expanding <= 0:
            raise MisclassifiedSignError(
                f"expanding eigenvalue at {v} toward {succ} is {expanding} <= 0"
            )
        dirs = transverse_order(cycle.equilibria, i, vf.n)
        rows.append(
            EquilibriumEigenvalues(
                vertex=v,
                radial=-vf.radial,
                contracting=contracting,
                expanding=expanding,
                transverse=tuple(vf.eigenvalue_at(v, d) for d in dirs),
                transverse_directions=dirs,
            )
        )
    return EigenvalueTable(cycle=cycle.equilibria, rows=tuple(rows))


def positive_transverse_locations(table: EigenvalueTable) -> tuple[int, ...]:
    """Cycle equilibria carrying at least one positive transverse eigenvalue."""
    return tuple(row.vertex for row in table.rows if any(t > 0 for t in row.transverse))
