import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetnet import corpus
from hetnet.errors import MisclassifiedSignError, SignError, SpecMismatchError
from hetnet.graphs import DiGraph, enumerate_cycles
from hetnet.realisation import (
    EigenSpec,
    QuasiSimpleCycle,
    VectorField,
    build_vector_field,
    classify_eigenvalues,
    extract_quasi_simple_cycles,
    jacobian_at,
    positive_transverse_locations,
    transverse_order,
)


def triangle_field(**kwargs):
    g = DiGraph(3, ((1, 2), (2, 3), (3, 1)))
    return g, build_vector_field(g, EigenSpec(**kwargs))


def numeric_jacobian(vf, x0, h=1e-6):
    n = vf.n
    jac = np.zeros((n, n))
    for i in range(n):
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (vf(xp) - vf(xm)) / (2 * h)
    return jac


ALL_REALISATIONS = [
    corpus.kirk_silber_completed,
    corpus.bowtie_completed,
    corpus.house_completed_short,
    corpus.house_completed_long,
    corpus.donut,
    corpus.b3_c4,
]


class TestBuild:
    def test_triangle_matrix(self):
        _, vf = triangle_field(default_contracting=1.0)
        expected = np.array([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], dtype=float)
        assert np.array_equal(vf.a, expected)

    def test_field_vanishes_at_axis_equilibria(self):
        for build in ALL_REALISATIONS:
            vf = build_vector_field(build())
            for eq in vf.equilibria():
                assert np.max(np.abs(vf(eq.position))) < 1e-12

    def test_distribution_node_has_two_positive_entries(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        diag = np.diag(jacobian_at(vf, vf.equilibrium(2)))
        assert np.count_nonzero(diag > 0) == 2  # toward 3 and 4

    def test_spec_mismatch_on_non_edge_magnitudes(self):
        g = DiGraph(3, ((1, 2), (2, 3), (3, 1)))
        with pytest.raises(SpecMismatchError):
            build_vector_field(g, EigenSpec(expanding={(1, 3): 1.0}))
        with pytest.raises(SpecMismatchError):
            build_vector_field(g, EigenSpec(transverse={(1, 2): -1.0}))

    def test_sign_errors(self):
        with pytest.raises(SignError):
            EigenSpec(default_transverse=0.5)
        with pytest.raises(SignError):
            EigenSpec(expanding={(1, 2): -1.0})
        with pytest.raises(SignError):
            EigenSpec(radial=-2.0)

    def test_radial_rescaling_preserves_other_eigenvalues(self):
        g = DiGraph(3, ((1, 2), (2, 3), (3, 1)))
        vf = build_vector_field(g, EigenSpec(radial=4.0))
        assert vf.eigenvalue_at(1, 1) == -4.0
        assert vf.eigenvalue_at(1, 2) == 1.0  # expanding default survives
        assert vf.eigenvalue_at(1, 3) == -2.0  # contracting default survives

    def test_json_round_trip(self):
        vf = build_vector_field(corpus.house())
        data = json.loads(json.dumps(vf.to_json_dict()))
        vf2 = VectorField.from_json_dict(data)
        x = np.array([0.3, 0.1, 0.4, 0.2, 0.5])
        assert np.allclose(vf(x), vf2(x), atol=1e-15)


class TestJacobian:
    def test_triangle_at_xi1(self):
        _, vf = triangle_field(default_contracting=1.0)
        assert np.array_equal(np.diag(jacobian_at(vf, vf.equilibrium(1))), [-2, 1, -1])

    def test_house_case_a_has_positive_transverse_at_xi2(self):
        vf = build_vector_field(corpus.house_completed_short())
        diag = np.diag(jacobian_at(vf, vf.equilibrium(2)))
        assert diag[3] > 0  # direction of 4: the second original outgoing edge

    @pytest.mark.parametrize("build", ALL_REALISATIONS)
    def test_matches_finite_differences(self, build):
        vf = build_vector_field(build())
        for eq in vf.equilibria():
            analytic = jacobian_at(vf, eq)
            numeric = numeric_jacobian(vf, eq.position.copy())
            assert np.max(np.abs(analytic - numeric)) < 1e-6


class TestInvariance:
    @given(st.integers(min_value=0, max_value=2**5 - 1), st.integers(min_value=0, max_value=999))
    @settings(max_examples=60, deadline=None)
    def test_sign_change_equivariance(self, mask, seed):
        vf = build_vector_field(corpus.house_completed_long())
        rng = np.random.default_rng(seed)
        x = rng.uniform(-1.5, 1.5, size=5)
        sigma = np.array([(-1.0 if mask >> i & 1 else 1.0) for i in range(5)])
        assert np.max(np.abs(vf(sigma * x) - sigma * vf(x))) < 1e-12

    def test_zero_coordinates_stay_exactly_zero(self):
        vf = build_vector_field(corpus.bowtie_completed())
        x = np.array([0.0, 0.7, 0.0, 0.2, 0.4])
        fx = vf(x)
        assert fx[0] == 0.0 and fx[2] == 0.0

    def test_eigenvalue_sign_iff_edge(self):
        g = corpus.donut()
        vf = build_vector_field(g)
        for k in g.vertices():
            for j in g.vertices():
                if j == k:
                    continue
                assert (vf.eigenvalue_at(k, j) > 0) == g.has_edge(k, j)


class TestCycles:
    def test_completed_kirk_silber_has_three(self):
        cycles = extract_quasi_simple_cycles(corpus.kirk_silber_completed())
        assert len(cycles) == 3
        lengths = sorted(len(c) for c in cycles)
        assert lengths == [3, 3, 4]

    def test_triangle_single(self):
        cycles = extract_quasi_simple_cycles(DiGraph(3, ((1, 2), (2, 3), (3, 1))))
        assert len(cycles) == 1
        assert cycles[0].planes == ((1, 2), (2, 3), (3, 1))

    def test_count_matches_enumeration_on_completed_bowtie(self):
        g = corpus.bowtie_completed()
        assert len(extract_quasi_simple_cycles(g)) == len(enumerate_cycles(g))


class TestClassification:
    def test_triangle_no_transverse(self):
        g, vf = triangle_field(default_contracting=1.0)
        (cycle,) = extract_quasi_simple_cycles(g)
        table = classify_eigenvalues(vf, cycle)
        for row in table.rows:
            assert row.contracting == -1.0
            assert row.expanding == 1.0
            assert row.transverse == ()
        assert table.n_t == 0

    def test_house_case_a_signs(self):
        g = corpus.house_completed_short()
        vf = build_vector_field(g)
        cycle = next(c for c in extract_quasi_simple_cycles(g) if c.equilibria == (1, 2, 3))
        table = classify_eigenvalues(vf, cycle)
        positives = {
            (row.vertex, d)
            for row in table.rows
            for d, t in zip(row.transverse_directions, row.transverse)
            if t > 0
        }
        assert positives == {(2, 4)}
        assert positive_transverse_locations(table) == (2,)

    def test_house_case_b_signs(self):
        g = corpus.house_completed_long()
        vf = build_vector_field(g)
        cycle = next(c for c in extract_quasi_simple_cycles(g) if c.equilibria == (1, 2, 4, 5))
        table = classify_eigenvalues(vf, cycle)
        positives = {
            (row.vertex, d)
            for row in table.rows
            for d, t in zip(row.transverse_directions, row.transverse)
            if t > 0
        }
        assert positives == {(1, 4), (2, 3)}

    def test_transverse_slot_order(self):
        # in-cycle directions (from two steps ahead) come first, off-cycle after
        assert transverse_order((1, 2, 4, 5), 0, 5) == (4, 3)
        assert transverse_order((1, 2, 4, 5), 2, 5) == (1, 3)
        assert transverse_order((1, 2, 3), 1, 5) == (4, 5)

    def test_misclassified_sign_raises(self):
        g, vf = triangle_field()
        bogus = QuasiSimpleCycle((1, 3, 2), ((1, 3), (3, 2), (2, 1)), (1, 3, 2))
        with pytest.raises(MisclassifiedSignError):
            classify_eigenvalues(vf, bogus)
