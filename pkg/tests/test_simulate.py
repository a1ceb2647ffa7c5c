import numpy as np
import pytest

from hetnet import corpus
from hetnet.graphs import DeltaClique, DiGraph
from hetnet.realisation import VectorField, build_vector_field
from hetnet.simulate import (
    IntegratorConfig,
    detect_extra_equilibrium,
    fan_angles,
    integrate,
    verify_completeness_numerically,
    verify_connection,
    verify_delta_clique,
)


def triangle_field():
    return build_vector_field(DiGraph(3, ((1, 2), (2, 3), (3, 1))))


class TestConfig:
    def test_epsilon_must_exceed_delta(self):
        with pytest.raises(ValueError):
            IntegratorConfig(delta=1e-3, epsilon=1e-4)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            IntegratorConfig(method="euler")


class TestIntegrate:
    def test_stationary_at_equilibrium(self):
        vf = triangle_field()
        x0 = vf.equilibrium(1).position.copy()
        cfg = IntegratorConfig(max_time=5.0)
        traj = integrate(vf, x0, cfg, stop=lambda t, x: False)
        assert np.max(np.abs(traj.states - x0)) < 1e-10

    def test_axis_dynamics_match_logistic_closed_form(self):
        # on an invariant axis the flow is du/dt = 2u(1-u) for u = x^2
        vf = triangle_field()
        x0 = np.array([0.5, 0.0, 0.0])
        traj = integrate(vf, x0, IntegratorConfig(max_time=12.0))
        u0 = 0.25
        for t, state in zip(traj.times, traj.states):
            u = u0 * np.exp(2 * t) / (1 - u0 + u0 * np.exp(2 * t))
            assert abs(state[0] ** 2 - u) < 1e-8
        assert traj.reason == "equilibrium"
        assert abs(traj.final[0] - 1.0) < 1e-3

    def test_zero_coordinates_stay_exactly_zero(self):
        vf = build_vector_field(corpus.house_completed_long())
        x0 = np.array([0.3, 0.0, 0.2, 0.0, 0.9])
        traj = integrate(vf, x0, IntegratorConfig(max_time=20.0))
        assert np.all(traj.states[:, 1] == 0.0)
        assert np.all(traj.states[:, 3] == 0.0)

    def test_trajectory_equivariance(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        rng = np.random.default_rng(13)
        x0 = rng.uniform(0.1, 0.9, size=4)
        sigma = np.array([1.0, -1.0, 1.0, -1.0])
        cfg = IntegratorConfig(max_time=8.0)
        plain = integrate(vf, x0, cfg, stop=lambda t, x: False)
        flipped = integrate(vf, sigma * x0, cfg, stop=lambda t, x: False)
        m = min(len(plain.times), len(flipped.times))
        assert np.allclose(plain.times[:m], flipped.times[:m], atol=1e-12)
        assert np.max(np.abs(flipped.states[:m] - sigma * plain.states[:m])) < 1e-9

    def test_rk4_fixed_step(self):
        vf = triangle_field()
        cfg = IntegratorConfig(method="rk4", step=1e-2, max_time=15.0)
        traj = integrate(vf, np.array([0.5, 0.0, 0.0]), cfg)
        assert traj.reason == "equilibrium"

    def test_csv_export(self):
        vf = triangle_field()
        traj = integrate(vf, np.array([0.5, 0.0, 0.0]), IntegratorConfig(max_time=1.0))
        lines = traj.to_csv().strip().splitlines()
        assert lines[0] == "t,x1,x2,x3"
        assert len(lines) == len(traj.times) + 1


class TestConnections:
    def test_triangle_edge(self):
        chk = verify_connection(triangle_field(), (1, 2))
        assert chk.passed
        assert chk.achieved_distance < 1e-4
        assert chk.plane_confinement_error == 0.0

    def test_all_completed_kirk_silber_edges(self):
        g = corpus.kirk_silber_completed()
        vf = build_vector_field(g)
        for edge in g.edges:
            assert verify_connection(vf, edge).passed

    def test_non_edge_rejected(self):
        with pytest.raises(ValueError):
            verify_connection(triangle_field(), (1, 3))


class TestFans:
    def test_angles_are_interior(self):
        theta = fan_angles(100)
        assert len(theta) == 100
        assert theta[0] > 0 and theta[-1] < np.pi / 2

    def test_completed_kirk_silber_contained(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        fan = verify_delta_clique(vf, DeltaClique(2, (3, 4)), 100)
        assert fan.samples == 100
        assert sum(fan.absorbed_by.values()) == 100
        assert set(fan.absorbed_by) <= {3, 4}
        assert fan.escaped == 0
        assert not fan.extra_equilibrium_suspected
        assert fan.contained

    def test_boundary_angles_reach_single_targets(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        fan = verify_delta_clique(
            vf, DeltaClique(2, (3, 4)), cfg=IntegratorConfig(), angles=np.array([0.0])
        )
        assert fan.absorbed_by == {3: 1}
        fan = verify_delta_clique(
            vf, DeltaClique(2, (3, 4)), cfg=IntegratorConfig(), angles=np.array([np.pi / 2])
        )
        assert fan.absorbed_by == {4: 1}

    def test_raw_kirk_silber_splits_toward_extra_equilibrium(self):
        vf = build_vector_field(corpus.kirk_silber())
        fan = verify_delta_clique(vf, DeltaClique(2, (3, 4)), 100)
        assert fan.extra_equilibrium_suspected
        assert not fan.contained
        assert len(fan.absorbed_by) == 2  # interior basin split
        assert sum(fan.absorbed_by.values()) + fan.escaped == fan.samples

    def test_fan_with_fixed_step_integrator(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        cfg = IntegratorConfig(method="rk4", step=5e-3, max_time=60.0)
        fan = verify_delta_clique(vf, DeltaClique(2, (3, 4)), 10, cfg)
        assert fan.absorbed_by == {4: 10}
        assert fan.escaped == 0

    def test_epsilon_shrink_keeps_classifications(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        kwargs = dict(tolerance=1e-10, max_time=100.0, delta=1e-5)
        a = verify_delta_clique(vf, DeltaClique(2, (3, 4)), 10,
                                IntegratorConfig(epsilon=1e-3, **kwargs))
        b = verify_delta_clique(vf, DeltaClique(2, (3, 4)), 10,
                                IntegratorConfig(epsilon=1e-4, **kwargs))
        assert a.absorbed_by == b.absorbed_by

    def test_wrong_b_point_rejected(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        with pytest.raises(ValueError):
            verify_delta_clique(vf, DeltaClique(1, (2, 3)))  # vertex 1 has one outgoing


class TestCompleteness:
    @pytest.mark.parametrize(
        "build",
        [
            corpus.kirk_silber_completed,
            corpus.bowtie_completed,
            corpus.house_completed_short,
            corpus.house_completed_long,
            corpus.donut,
        ],
    )
    def test_completed_graphs_verify(self, build):
        g = build()
        vf = build_vector_field(g)
        report = verify_completeness_numerically(vf, g)
        assert report.passed
        assert all(c.passed for c in report.connections)
        assert all(f.escaped == 0 for f in report.fans)

    def test_raw_house_fails_at_distribution_node(self):
        g = corpus.house()
        vf = build_vector_field(g)
        report = verify_completeness_numerically(vf, g)
        assert not report.passed
        bad = [f for f in report.fans if not f.contained]
        assert [f.b_point for f in bad] == [2]


class TestExtraEquilibrium:
    def test_symmetric_triangle_diagonal_point(self):
        # interior equilibrium of the restricted cubic: 1 - 3s^2 + (e - c)s^2 = 0,
        # so s = 1/2 with the default magnitudes e = 1, c = 2
        point = detect_extra_equilibrium(triangle_field(), (1, 2, 3))
        assert point is not None
        assert np.allclose(point, [0.5, 0.5, 0.5], atol=1e-10)

    def test_triangle_with_sink_has_none(self):
        vf = build_vector_field(corpus.kirk_silber_completed())
        assert detect_extra_equilibrium(vf, (2, 3, 4)) is None

    def test_degenerate_zero_coefficients(self):
        vf = VectorField(np.zeros((3, 3)))
        assert detect_extra_equilibrium(vf, (1, 2, 3)) is None

    def test_linear_system_oracle_agreement(self):
        # the interior equilibrium solves a linear system in the squared
        # coordinates; compare the search result against that solve
        vf = triangle_field()
        idx = [0, 1, 2]
        a = vf.a[np.ix_(idx, idx)]
        m = a - 1.0
        np.fill_diagonal(m, -1.0)
        u = np.linalg.solve(m, -np.ones(3))
        assert np.all(u > 0)
        point = detect_extra_equilibrium(vf, (1, 2, 3))
        assert np.max(np.abs(point[idx] - np.sqrt(u))) < 1e-10
