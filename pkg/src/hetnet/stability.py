"""Transition matrices and return-map stability conditions for one cycle.

In logarithmic cross-section coordinates (log of the expanding coordinate
followed by logs of the transverse ones) the section-to-section map is
affine; only the linear parts matter for the return map, so each step along
the cycle contributes a basic matrix

    M_j = A_j . B_j,   B_j = [first column b, identity elsewhere],
    b_1 = c_j / e_j,   b_{s+1} = -t_{j,s} / e_j,

where A_j is the identity for a trivial global map and otherwise a
block-diagonal permutation: a cyclic block of dimension (cycle length - 2)
on the expanding/in-cycle coordinates and the identity on the off-cycle
transverse ones. Products of the M_j over one full turn give the return
map; the dominant eigenvalue must be real and exceed 1, and its eigenvector
must have coordinates of one sign, for the cycle to be a stability
candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import (
    ConvergenceFailureError,
    DimensionMismatchError,
    ShapeMismatchError,
)
from .realisation import EigenvalueTable, EquilibriumEigenvalues

_SIGN_TOL = 1e-10


class Verdict(Enum):
    CANDIDATE_STABLE = "candidate-stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TransitionMatrix:
    """Basic transition matrix for the step leaving one equilibrium."""

    index: int
    vertex: int
    matrix: np.ndarray
    b_column: tuple[float, ...]
    permutation_trivial: bool

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ReturnMapProduct:
    """One full turn of transition matrices, based at `base_vertex`."""

    base_index: int
    base_vertex: int
    matrix: np.ndarray
    abs_determinant: float
    dominant: complex
    dominant_is_complex: bool
    eigenvector: np.ndarray | None
    alpha: tuple[float, ...] | None
    beta: tuple[float, ...] | None


@dataclass(frozen=True)
class StabilityVerdict:
    dominant: complex
    dominant_is_complex: bool
    lambda_exceeds_one: bool
    eigenvector_signs_uniform: bool
    abs_determinant: float
    verdict: Verdict


def cyclic_permutation_block(dim: int) -> np.ndarray:
    """dim x dim cyclic shift: ones on the subdiagonal and top-right corner."""
    a = np.zeros((dim, dim))
    a[0, -1] = 1.0
    for i in range(1, dim):
        a[i, i - 1] = 1.0
    return a


def global_permutation(size: int, cycle_length: int, trivial: bool) -> np.ndarray:
    if trivial:
        return np.eye(size)
    dim = cycle_length - 2
    if dim > size:
        raise DimensionMismatchError(
            f"permutation block of dimension {dim} does not fit in size {size}"
        )
    p = np.eye(size)
    p[:dim, :dim] = cyclic_permutation_block(dim)
    return p


def basic_transition_matrix(
    j: int, table: EigenvalueTable, global_map_trivial: bool | None = None
) -> TransitionMatrix:
    """Assemble M_j for the j-th equilibrium (0-based position) of `table`.

    By default the permutation is trivial for 3-cycles (where the cyclic
    block is 1 x 1 anyway) and non-trivial for longer cycles; pass
    `global_map_trivial` to override.
    """
    rows = table.rows
    if not (0 <= j < len(rows)):
        raise DimensionMismatchError(f"index {j} out of range for a {len(rows)}-cycle")
    row = rows[j]
    n_t = table.n_t
    if len(row.transverse) != n_t:
        raise DimensionMismatchError("inconsistent transverse counts in table")
    size = n_t + 1
    e = row.expanding
    b = [(-row.contracting) / e] + [(-t) / e for t in row.transverse]
    bmat = np.eye(size)
    bmat[:, 0] = b
    q = len(table.cycle)
    trivial = (q == 3) if global_map_trivial is None else global_map_trivial
    m = global_permutation(size, q, trivial) @ bmat
    return TransitionMatrix(
        index=j,
        vertex=row.vertex,
        matrix=m,
        b_column=tuple(b),
        permutation_trivial=trivial,
    )


def transition_matrices(
    table: EigenvalueTable, global_map_trivial: bool | None = None
) -> list[TransitionMatrix]:
    return [basic_transition_matrix(j, table, global_map_trivial) for j in range(len(table.rows))]


def _structured_columns(m: np.ndarray):
    """Recognise the two product shapes with named entries.

    Lower-triangular with unit diagonal after the first column: alpha only.
    First two columns arbitrary with identity elsewhere: alpha and beta.
    """
    size = m.shape[0]
    eye = np.eye(size)
    if size >= 2 and np.array_equal(m[:, 1:], eye[:, 1:]):
        return tuple(m[:, 0]), None
    if size >= 3 and np.array_equal(m[:, 2:], eye[:, 2:]):
        return tuple(m[:, 0]), tuple(m[:, 1])
    return None, None


def return_map_products(matrices: list[TransitionMatrix]) -> list[ReturnMapProduct]:
    """One full-turn product per cyclic rotation (cross-section base point)."""
    q = len(matrices)
    products = []
    for base in range(q):
        order = [matrices[(base + i) % q].matrix for i in range(q)]
        prod = np.eye(matrices[base].size)
        for m in order:
            prod = m @ prod
        alpha, beta = _structured_columns(prod)
        lam, vec, is_complex = dominant_eigenvalue_matrix(prod)
        products.append(
            ReturnMapProduct(
                base_index=base,
                base_vertex=matrices[base].vertex,
                matrix=prod,
                abs_determinant=abs(float(np.linalg.det(prod))),
                dominant=lam,
                dominant_is_complex=is_complex,
                eigenvector=vec,
                alpha=alpha,
                beta=beta,
            )
        )
    return products


def _charpoly_roots(m: np.ndarray) -> np.ndarray:
    """Roots of the characteristic polynomial, written out for size <= 3."""
    size = m.shape[0]
    if size == 1:
        return np.array([m[0, 0]], dtype=complex)
    if size == 2:
        tr = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        return np.roots([1.0, -tr, det]).astype(complex)
    tr = np.trace(m)
    sum_minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = np.linalg.det(m)
    return np.roots([1.0, -tr, sum_minors, -det]).astype(complex)


def _power_iteration(m: np.ndarray, max_iter: int = 10_000, tol: float = 1e-13):
    """Dominant eigenpair by power iteration.

    When the iteration stalls (a conjugate pair dominates), the pair is
    recovered from the two-step recurrence satisfied by the iterates and the
    value is flagged complex; raises on genuine non-convergence.
    """
    size = m.shape[0]
    rng = np.random.default_rng(7)
    v = rng.standard_normal(size)
    v /= np.linalg.norm(v)
    lam_old = None
    for _ in range(max_iter):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0 + 0.0j, v, False
        v = w / norm
        lam = float(v @ (m @ v))
        if lam_old is not None and abs(lam - lam_old) < tol * max(1.0, abs(lam)):
            residual = np.linalg.norm(m @ v - lam * v)
            if residual < 1e-9 * max(1.0, abs(lam), float(np.abs(m).max())):
                i = int(np.argmax(np.abs(v)))
                if v[i] < 0:
                    v = -v
                return complex(lam), v, False
        lam_old = lam
    # A dominant conjugate pair makes the iterates satisfy a two-term
    # recurrence x_{k+2} = p x_{k+1} + q x_k; its roots give the pair.
    x0 = v
    x1 = m @ x0
    x2 = m @ x1
    coeffs, *_ = np.linalg.lstsq(np.column_stack([x1, x0]), x2, rcond=None)
    p, q = float(coeffs[0]), float(coeffs[1])
    roots = np.roots([1.0, -p, -q]).astype(complex)
    lam = roots[np.argmax(np.abs(roots))]
    if abs(lam.imag) > 1e-9 * max(1.0, abs(lam)):
        return complex(lam), None, True
    raise ConvergenceFailureError("power iteration did not converge")


def dominant_eigenvalue_matrix(m: np.ndarray):
    """(dominant eigenvalue, eigenvector or None, is_complex) of a small matrix."""
    size = m.shape[0]
    if size > 6:
        raise DimensionMismatchError(f"return-map products are expected to be <= 6x6, got {size}")
    if size <= 3:
        roots = _charpoly_roots(m)
        lam = roots[np.argmax(np.abs(roots))]
        if abs(lam.imag) > 1e-9 * max(1.0, abs(lam)):
            return complex(lam), None, True
        lam = complex(lam.real)
        vec = _eigenvector_for(m, lam.real)
        return lam, vec, False
    return _power_iteration(m)


def _eigenvector_for(m: np.ndarray, lam: float) -> np.ndarray:
    """Unit null vector of (m - lam I) via SVD, sign-normalised."""
    u, s, vt = np.linalg.svd(m - lam * np.eye(m.shape[0]))
    vec = vt[-1]
    # Fix the overall sign deterministically: largest-magnitude entry positive.
    i = int(np.argmax(np.abs(vec)))
    if vec[i] < 0:
        vec = -vec
    return vec


def dominant_eigenvalue(product: ReturnMapProduct):
    """Dominant eigenpair of a return-map product."""
    return product.dominant, product.eigenvector


def verdict(product: ReturnMapProduct) -> StabilityVerdict:
    """Evaluate the two necessary conditions on a return-map product.

    Unstable when the determinant modulus is at most 1 or the dominant
    eigenvalue is real with modulus at most 1; a candidate for stability
    when the dominant eigenvalue is real, exceeds 1, and its eigenvector has
    strictly one-signed coordinates; inconclusive otherwise (including any
    zero coordinate within tolerance, and complex dominant values).
    """
    lam = product.dominant
    is_complex = product.dominant_is_complex
    lam_real = lam.real
    exceeds = (not is_complex) and lam_real > 1.0

    uniform = False
    if product.eigenvector is not None:
        v = product.eigenvector
        scale = np.max(np.abs(v))
        if scale > 0:
            v = v / scale
            uniform = bool(np.all(v > _SIGN_TOL) or np.all(v < -_SIGN_TOL))

    if product.abs_determinant <= 1.0:
        result = Verdict.UNSTABLE
    elif (not is_complex) and abs(lam_real) <= 1.0:
        result = Verdict.UNSTABLE
    elif exceeds and uniform:
        result = Verdict.CANDIDATE_STABLE
    else:
        result = Verdict.INCONCLUSIVE

    return StabilityVerdict(
        dominant=lam,
        dominant_is_complex=is_complex,
        lambda_exceeds_one=exceeds,
        eigenvector_signs_uniform=uniform,
        abs_determinant=product.abs_determinant,
        verdict=result,
    )


@dataclass(frozen=True)
class CaseAReport:
    """Lower-triangular (3-cycle, trivial global map) reduction."""

    table_cycle: tuple[int, ...]
    positive_at: int
    lam: float
    alpha: tuple[float, ...]
    product: np.ndarray
    eigenvector: np.ndarray | None
    u_last_sign_matches_first: bool | None
    closed_form_residual: float | None
    verdict: StabilityVerdict


@dataclass(frozen=True)
class CaseBReport:
    """Row-swapping (4-cycle) reduction with the displayed 3x3 matrices."""

    table_cycle: tuple[int, ...]
    positive_at: tuple[int, int]
    matrices: tuple[np.ndarray, ...]
    product: np.ndarray
    alpha: tuple[float, float, float]
    beta: tuple[float, float, float]
    third_column_exact: bool
    abs_determinant: float
    contraction_ratio: float
    det_condition: bool
    lam: complex
    lam_is_complex: bool
    eigenvector: np.ndarray | None
    third_coordinate_residual: float | None
    verdict: StabilityVerdict


def _swap_transverse_slots(table: EigenvalueTable, s1: int, s2: int) -> EigenvalueTable:
    """Relabel two transverse coordinate slots consistently at every row."""

    def swap(t: tuple, i: int, j: int) -> tuple:
        lst = list(t)
        lst[i], lst[j] = lst[j], lst[i]
        return tuple(lst)

    rows = tuple(
        EquilibriumEigenvalues(
            vertex=r.vertex,
            radial=r.radial,
            contracting=r.contracting,
            expanding=r.expanding,
            transverse=swap(r.transverse, s1, s2),
            transverse_directions=swap(r.transverse_directions, s1, s2),
        )
        for r in table.rows
    )
    return EigenvalueTable(cycle=table.cycle, rows=rows)


def house_case_a_check(table: EigenvalueTable) -> CaseAReport:
    """Analyse a 3-cycle whose only positive transverse eigenvalue sits at a
    single equilibrium.

    All basic matrices are lower triangular with unit diagonal past the
    first column, so the full-turn product has first column (alpha_1, ...,
    alpha_N) and identity elsewhere, with alpha_1 the product of all
    contraction ratios. The dominant eigenvector then satisfies
    u_i = alpha_i / (lambda - 1) * u_1 for i >= 2, so every coordinate
    whose alpha is positive shares the sign of u_1 once lambda > 1.
    """
    if len(table.cycle) != 3:
        raise ShapeMismatchError(f"need a 3-cycle, got length {len(table.cycle)}")
    if table.n_t < 1:
        raise ShapeMismatchError("need at least one transverse direction")
    positives = [
        (i, s) for i, row in enumerate(table.rows) for s, t in enumerate(row.transverse) if t > 0
    ]
    if len(positives) != 1:
        raise ShapeMismatchError(
            f"need exactly one positive transverse eigenvalue, found {len(positives)}"
        )
    (row_idx, slot) = positives[0]
    if slot != 0:
        table = _swap_transverse_slots(table, 0, slot)

    mats = transition_matrices(table, global_map_trivial=True)
    products = return_map_products(mats)
    prod = products[0]
    alpha, beta = prod.alpha, prod.beta
    if alpha is None or beta is not None:
        raise ShapeMismatchError("product is not lower triangular with identity tail")

    # The product's eigenvalues are alpha_1 together with 1 (repeated), so
    # alpha_1 is the decisive value even when it is below 1, and it is known
    # exactly; recomputing the eigenvector at that exact value avoids the
    # accuracy loss of root-finding near the repeated eigenvalue.
    lam = float(alpha[0])
    vec = prod.eigenvector
    matches: bool | None = None
    residual: float | None = None
    if lam > 1.0:
        vec = _eigenvector_for(prod.matrix, lam)
        prod = replace(prod, dominant=complex(lam), dominant_is_complex=False, eigenvector=vec)
        if abs(vec[0]) > _SIGN_TOL:
            matches = bool(np.sign(vec[-1]) == np.sign(vec[0]))
            residual = float(abs(vec[-1] * (lam - 1.0) - alpha[-1] * vec[0]))
    return CaseAReport(
        table_cycle=table.cycle,
        positive_at=table.rows[row_idx].vertex,
        lam=lam,
        alpha=alpha,
        product=prod.matrix,
        eigenvector=vec,
        u_last_sign_matches_first=matches,
        closed_form_residual=residual,
        verdict=verdict(prod),
    )


def house_case_b_check(table: EigenvalueTable) -> CaseBReport:
    """Analyse a 4-cycle with two positive transverse eigenvalues: one in
    the in-cycle slot at some equilibrium and one in the off-cycle slot at
    its successor.

    With the row-swapping permutation the product of the four matrices has
    its first two columns filled, third column exactly (0, 0, 1)^T, the
    (1,2) and (2,2) entries always positive, and determinant modulus equal
    to the product of the contraction ratios. The third eigenvector
    coordinate satisfies (lambda - 1) u_3 = alpha_3 u_1 + beta_3 u_2, whose
    sign is not controlled in general.
    """
    if len(table.cycle) != 4:
        raise ShapeMismatchError(f"need a 4-cycle, got length {len(table.cycle)}")
    if table.n_t != 2:
        raise ShapeMismatchError(f"need exactly two transverse directions, got {table.n_t}")
    positives = {
        (i, s) for i, row in enumerate(table.rows) for s, t in enumerate(row.transverse) if t > 0
    }
    if len(positives) != 2:
        raise ShapeMismatchError(
            f"need exactly two positive transverse eigenvalues, found {len(positives)}"
        )
    starts = [
        i
        for i in range(4)
        if (i, 0) in positives and ((i + 1) % 4, 1) in positives
    ]
    if len(starts) != 1:
        raise ShapeMismatchError(
            "positive eigenvalues must sit in the in-cycle slot of one equilibrium "
            "and the off-cycle slot of its successor"
        )
    start = starts[0]

    mats = transition_matrices(table, global_map_trivial=False)
    rotated = mats[start:] + mats[:start]
    prod_mat = np.eye(3)
    for m in rotated:
        prod_mat = m.matrix @ prod_mat

    third_exact = bool(np.array_equal(prod_mat[:, 2], np.array([0.0, 0.0, 1.0])))
    alpha = (float(prod_mat[0, 0]), float(prod_mat[1, 0]), float(prod_mat[2, 0]))
    beta = (float(prod_mat[0, 1]), float(prod_mat[1, 1]), float(prod_mat[2, 1]))
    abs_det = abs(float(np.linalg.det(prod_mat)))
    ratio = float(np.prod([(-r.contracting) / r.expanding for r in table.rows]))

    lam, vec, is_complex = dominant_eigenvalue_matrix(prod_mat)
    residual = None
    if vec is not None and not is_complex:
        residual = float(
            abs((lam.real - 1.0) * vec[2] - alpha[2] * vec[0] - beta[2] * vec[1])
        )
    prod = ReturnMapProduct(
        base_index=start,
        base_vertex=table.rows[start].vertex,
        matrix=prod_mat,
        abs_determinant=abs_det,
        dominant=lam,
        dominant_is_complex=is_complex,
        eigenvector=vec,
        alpha=alpha,
        beta=beta,
    )
    return CaseBReport(
        table_cycle=table.cycle,
        positive_at=(table.rows[start].vertex, table.rows[(start + 1) % 4].vertex),
        matrices=tuple(m.matrix for m in rotated),
        product=prod_mat,
        alpha=alpha,
        beta=beta,
        third_column_exact=third_exact,
        abs_determinant=abs_det,
        contraction_ratio=ratio,
        det_condition=abs_det > 1.0,
        lam=lam,
        lam_is_complex=is_complex,
        eigenvector=vec,
        third_coordinate_residual=residual,
        verdict=verdict(prod),
    )
