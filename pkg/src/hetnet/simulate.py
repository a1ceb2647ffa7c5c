"""Numerical verification of realisations: connections, triangle containment
of two-dimensional unstable manifolds, and interior-equilibrium detection.

The vector field carries a factor x_j in every component, so a coordinate
that starts at exactly zero stays exactly zero through every Runge-Kutta
stage; invariant subspaces are respected to the bit, not to a tolerance.
Fans of initial conditions are integrated as one batched system sharing an
adaptive step, which keeps per-sample work deterministic and fast.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergedError, NonFiniteError, StepUnderflowError
from .graphs import DeltaClique, DiGraph, distribution_vertices, find_delta_cliques
from .realisation import VectorField

ESCAPE_RADIUS = 2.0  # all axis equilibria sit at distance 1 from the origin


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration and verification parameters.

    `method` is "rkf45" (embedded adaptive 4(5), the default) or "rk4"
    (fixed step). `delta` is the capture radius around equilibria, `epsilon`
    the launch offset; epsilon > delta keeps launches outside their own
    capture ball.
    """

    method: str = "rkf45"
    step: float = 1e-3
    tolerance: float = 1e-10
    max_time: float = 100.0
    delta: float = 1e-4
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.method not in ("rkf45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.epsilon > self.delta > 0):
            raise ValueError("need epsilon > delta > 0")
        if self.max_time <= 0 or self.step <= 0 or self.tolerance <= 0:
            raise ValueError("step, tolerance and max_time must be positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    reason: str  # "equilibrium" | "max_time" | "stopped"

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        n = self.states.shape[1]
        header = "t," + ",".join(f"x{j}" for j in range(1, n + 1))
        rows = [
            f"{t:.12g}," + ",".join(f"{x:.12g}" for x in state)
            for t, state in zip(self.times, self.states)
        ]
        return "\n".join([header] + rows) + "\n"


@dataclass(frozen=True)
class ConnectionCheck:
    source: int
    target: int
    achieved_distance: float
    transit_time: float
    passed: bool
    plane_confinement_error: float


@dataclass(frozen=True)
class FanResult:
    """Outcome of launching a fan of samples in a 2D unstable eigenspace.

    `escaped` counts samples that left the radius-2 ball or timed out
    without entering any equilibrium's capture ball. The suspicion flag is
    raised when a sample stalls away from all axis equilibria or when the
    fan interior splits between two basins, both signatures of an invariant
    set that is not part of the network.
    """

    b_point: int
    samples: int
    absorbed_by: dict[int, int]
    escaped: int
    extra_equilibrium_suspected: bool

    @property
    def contained(self) -> bool:
        return self.escaped == 0 and not self.extra_equilibrium_suspected


@dataclass(frozen=True)
class CompletenessReport:
    passed: bool
    connections: list[ConnectionCheck] = field(default_factory=list)
    fans: list[FanResult] = field(default_factory=list)


# Fehlberg 4(5) tableau.
_B21 = (1 / 4,)
_B3 = (3 / 32, 9 / 32)
_B4 = (1932 / 2197, -7200 / 2197, 7296 / 2197)
_B5 = (439 / 216, -8.0, 3680 / 513, -845 / 4104)
_B6 = (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40)
_W4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_W5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_H_MAX = 0.5


def _rkf45_step(f, x: np.ndarray, h: float):
    """One embedded trial step; returns (5th-order state, max abs error)."""
    k1 = f(x)
    k2 = f(x + h * (_B21[0] * k1))
    k3 = f(x + h * (_B3[0] * k1 + _B3[1] * k2))
    k4 = f(x + h * (_B4[0] * k1 + _B4[1] * k2 + _B4[2] * k3))
    k5 = f(x + h * (_B5[0] * k1 + _B5[1] * k2 + _B5[2] * k3 + _B5[3] * k4))
    k6 = f(x + h * (_B6[0] * k1 + _B6[1] * k2 + _B6[2] * k3 + _B6[3] * k4 + _B6[4] * k5))
    ks = (k1, k2, k3, k4, k5, k6)
    x5 = x + h * sum(w * k for w, k in zip(_W5, ks) if w != 0.0)
    x4 = x + h * sum(w * k for w, k in zip(_W4, ks) if w != 0.0)
    return x5, float(np.max(np.abs(x5 - x4)))


def _rk4_step(f, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _adaptive_steps(f, x0: np.ndarray, cfg: IntegratorConfig):
    """Yield (t, x) after each accepted step until max_time; the caller
    decides when to stop consuming."""
    x = x0
    t = 0.0
    h = cfg.step if cfg.method == "rk4" else min(1e-2, _H_MAX)
    h_min = 1e-14 * cfg.max_time
    while t < cfg.max_time:
        h_try = min(h, cfg.max_time - t)
        if cfg.method == "rk4":
            x_new = _rk4_step(f, x, h_try)
            if not np.all(np.isfinite(x_new)):
                raise NonFiniteError(f"state became non-finite near t={t}")
            h_used = h_try
        else:
            x_new, err = _rkf45_step(f, x, h_try)
            if not np.all(np.isfinite(x_new)):
                raise NonFiniteError(f"state became non-finite near t={t}")
            if err > cfg.tolerance:
                h = h_try * max(0.2, 0.9 * (cfg.tolerance / err) ** 0.2)
                if h < h_min:
                    raise StepUnderflowError(f"step size underflow near t={t}")
                continue
            h_used = h_try
            growth = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (cfg.tolerance / err) ** 0.2))
            h = min(h_try * growth, _H_MAX)
        t += h_used
        x = x_new
        yield t, x


def _near_axis_equilibrium(x: np.ndarray, delta: float) -> int | None:
    """Axis index (1-based) whose signed unit point lies within delta, if any."""
    s = float(np.sum(x * x))
    for j in range(x.shape[0]):
        d2 = s - x[j] * x[j] + (abs(x[j]) - 1.0) ** 2  # distance^2 to sign(x_j)*e_j
        if d2 < delta * delta:
            return j + 1
    return None


def integrate(
    vf: VectorField,
    x0: np.ndarray,
    cfg: IntegratorConfig | None = None,
    stop=None,
) -> Trajectory:
    """Integrate from `x0` until within delta of an axis equilibrium,
    `stop(t, x)` returns truthy, or time runs out."""
    cfg = cfg or IntegratorConfig()
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("initial state is not finite")
    times = [0.0]
    states = [x.copy()]
    reason = "max_time"
    for t, x in _adaptive_steps(vf, x, cfg):
        times.append(t)
        states.append(x.copy())
        if stop is not None and stop(t, x):
            reason = "stopped"
            break
        if _near_axis_equilibrium(x, cfg.delta) is not None:
            reason = "equilibrium"
            break
    return Trajectory(np.array(times), np.array(states), reason)


def verify_connection(
    vf: VectorField, edge: tuple[int, int], cfg: IntegratorConfig | None = None
) -> ConnectionCheck:
    """Follow the one-dimensional connection for one edge.

    Launches just off the tail equilibrium toward the head axis and checks
    the trajectory enters the head's capture ball. All coordinates outside
    the connection plane start at exactly zero and must stay there.
    """
    cfg = cfg or IntegratorConfig()
    u, v = edge
    if (u, v) not in vf._edge_set:
        raise ValueError(f"edge {u} -> {v} is not part of the realised graph")
    n = vf.n
    x0 = np.zeros(n)
    x0[u - 1] = 1.0
    x0[v - 1] = cfg.epsilon
    target = np.zeros(n)
    target[v - 1] = 1.0
    off_plane = [j for j in range(n) if j not in (u - 1, v - 1)]

    best = float(np.linalg.norm(x0 - target))
    transit = 0.0
    confinement = 0.0
    passed = False
    for t, x in _adaptive_steps(vf, x0, cfg):
        if float(np.linalg.norm(x)) > 10.0 * ESCAPE_RADIUS:
            raise DivergedError(f"connection {u} -> {v} left the verification region")
        if off_plane:
            confinement = max(confinement, float(np.max(np.abs(x[off_plane]))))
        d = float(np.linalg.norm(x - target))
        if d < best:
            best = d
        if d < cfg.delta:
            passed = True
            transit = t
            break
        if _near_axis_equilibrium(x, cfg.delta) is not None:
            transit = t
            break
        transit = t
    return ConnectionCheck(
        source=u,
        target=v,
        achieved_distance=best,
        transit_time=transit,
        passed=passed,
        plane_confinement_error=confinement,
    )


def fan_angles(n_samples: int) -> np.ndarray:
    """Evenly spaced interior angles in (0, pi/2); boundary rays are the
    one-dimensional connections themselves and are checked separately."""
    return (np.arange(1, n_samples + 1) / (n_samples + 1)) * (np.pi / 2.0)


def verify_delta_clique(
    vf: VectorField,
    clique: DeltaClique,
    n_samples: int = 100,
    cfg: IntegratorConfig | None = None,
    angles: np.ndarray | None = None,
) -> FanResult:
    """Launch a fan across the 2D unstable eigenspace of the triangle head
    and classify where each sample ends up.

    The whole fan is integrated as one batch with a shared adaptive step;
    classification per sample happens at accepted steps (absorbed into an
    equilibrium ball, escaped past radius 2, or still running).
    """
    cfg = cfg or IntegratorConfig()
    b = clique.b_point
    t1, t2 = clique.targets
    positives = [
        d for d in range(1, vf.n + 1) if d != b and vf.eigenvalue_at(b, d) > 0
    ]
    if len(positives) != 2:
        raise ValueError(
            f"fan needs exactly two positive eigenvalues at {b}, found {len(positives)}"
        )
    if set(positives) != {t1, t2}:
        raise ValueError(
            f"unstable directions {positives} at {b} do not match targets {clique.targets}"
        )

    theta = fan_angles(n_samples) if angles is None else np.asarray(angles, dtype=float)
    m = theta.shape[0]
    n = vf.n
    x = np.zeros((m, n))
    x[:, b - 1] = 1.0
    x[:, t1 - 1] = cfg.epsilon * np.cos(theta)
    x[:, t2 - 1] = cfg.epsilon * np.sin(theta)

    active = np.ones(m, dtype=bool)
    absorbed_at = np.zeros(m, dtype=int)  # 0 = none, else axis id
    escaped = np.zeros(m, dtype=bool)
    stalled = np.zeros(m, dtype=bool)
    delta2 = cfg.delta * cfg.delta

    def classify(states: np.ndarray) -> None:
        live = np.flatnonzero(active)
        if live.size == 0:
            return
        xs = states[live]
        sq = xs * xs
        s = sq.sum(axis=1)
        d2 = s[:, None] - sq + (np.abs(xs) - 1.0) ** 2  # to each signed axis point
        nearest = np.argmin(d2, axis=1)
        hit = d2[np.arange(live.size), nearest] < delta2
        out = s > ESCAPE_RADIUS * ESCAPE_RADIUS
        for pos, idx in enumerate(live):
            if hit[pos]:
                absorbed_at[idx] = int(nearest[pos]) + 1
                active[idx] = False
                # park the sample on its equilibrium: exact fixed point, so it
                # stops constraining the shared adaptive step
                states[idx] = 0.0
                states[idx, nearest[pos]] = 1.0
            elif out[pos]:
                escaped[idx] = True
                active[idx] = False
                states[idx] = 0.0

    t = 0.0
    h = cfg.step if cfg.method == "rk4" else min(1e-2, _H_MAX)
    h_min = 1e-14 * cfg.max_time
    while t < cfg.max_time and np.any(active):
        h_try = min(h, cfg.max_time - t)
        if cfg.method == "rk4":
            h_used = h_try
            x_new = _rk4_step(vf.eval_many, x, h_used)
        else:
            x_new, err = _rkf45_step(vf.eval_many, x, h_try)
            if not np.all(np.isfinite(x_new)):
                raise NonFiniteError(f"fan state became non-finite near t={t}")
            if err > cfg.tolerance:
                h = h_try * max(0.2, 0.9 * (cfg.tolerance / err) ** 0.2)
                if h < h_min:
                    raise StepUnderflowError(f"fan step size underflow near t={t}")
                continue
            h_used = h_try
            growth = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (cfg.tolerance / err) ** 0.2))
            h = min(h_try * growth, _H_MAX)
        t += h_used
        x = x_new
        classify(x)

    # Timed out: whatever is still running either stalled near an interior
    # invariant set or kept wandering without entering a capture ball.
    for idx in np.flatnonzero(active):
        stalled[idx] = float(np.max(np.abs(vf(x[idx])))) < 1e-3
        escaped[idx] = True
        active[idx] = False

    absorbed_by: dict[int, int] = {}
    for idx in range(m):
        if absorbed_at[idx]:
            j = int(absorbed_at[idx])
            absorbed_by[j] = absorbed_by.get(j, 0) + 1
    n_escaped = int(np.count_nonzero(escaped))

    # A fan interior split across two basins means a separatrix crosses the
    # fan, i.e. some invariant object off the network attracts the boundary
    # between them; a genuine triangle sends the whole interior to one target.
    interior_split = len(absorbed_by) >= 2
    suspected = bool(np.any(stalled)) or interior_split
    return FanResult(
        b_point=b,
        samples=m,
        absorbed_by=absorbed_by,
        escaped=n_escaped,
        extra_equilibrium_suspected=suspected,
    )


def verify_completeness_numerically(
    vf: VectorField,
    g_prime: DiGraph,
    cfg: IntegratorConfig | None = None,
    n_samples: int = 100,
) -> CompletenessReport:
    """Check every edge's connection and every distribution node's fan."""
    cfg = cfg or IntegratorConfig()
    cliques = find_delta_cliques(g_prime)
    by_b_point = {}
    for c in cliques:
        by_b_point.setdefault(c.b_point, c)

    connections = [verify_connection(vf, e, cfg) for e in g_prime.edges]
    fans = []
    for v in distribution_vertices(g_prime):
        clique = by_b_point.get(v)
        if clique is None:
            # no triangle at this node: fan across its two unstable directions
            succ = g_prime.successors(v)
            if len(succ) != 2:
                continue
            clique = DeltaClique(v, (succ[0], succ[1]))
        fans.append(verify_delta_clique(vf, clique, n_samples, cfg))
    passed = all(c.passed for c in connections) and all(f.contained for f in fans)
    return CompletenessReport(passed=passed, connections=connections, fans=fans)


def detect_extra_equilibrium(
    vf: VectorField,
    region: tuple[int, int, int],
    cfg: IntegratorConfig | None = None,
    max_iter: int = 60,
) -> np.ndarray | None:
    """Search for an interior equilibrium in the subspace of three axes.

    Runs a damped Newton iteration on the restricted field from the
    barycenter direction. Returns the full-space point when the iteration
    lands on an isolated interior equilibrium with residual below 1e-10,
    otherwise None (sinks of triangles and degenerate fields fail the
    interiority and nondegeneracy checks).
    """
    cfg = cfg or IntegratorConfig()
    idx = [j - 1 for j in region]
    if len(set(idx)) != 3:
        raise ValueError("region must name three distinct axes")

    def restricted(y: np.ndarray) -> np.ndarray:
        x = np.zeros(vf.n)
        x[idx] = y
        return vf(x)[idx]

    def jac(y: np.ndarray) -> np.ndarray:
        # analytic Jacobian of the restricted cubic
        a = vf.a[np.ix_(idx, idx)]
        s = float(np.sum(y * y))
        bracket = 1.0 - s + a @ (y * y)
        jj = np.diag(bracket) + y[:, None] * (-2.0 * y[None, :] + a * (2.0 * y[None, :]))
        return vf.time_scale * jj

    y = np.full(3, 1.0 / np.sqrt(3.0))
    for _ in range(max_iter):
        g = restricted(y)
        if float(np.max(np.abs(g))) < 1e-13:
            break
        try:
            step = np.linalg.solve(jac(y), -g)
        except np.linalg.LinAlgError:
            return None
        damping = 1.0
        base = float(np.linalg.norm(g))
        for _ in range(25):
            y_new = y + damping * step
            if float(np.linalg.norm(restricted(y_new))) < base:
                break
            damping *= 0.5
        else:
            return None
        y = y_new
    residual = float(np.max(np.abs(restricted(y))))
    if residual >= 1e-10:
        return None
    y = np.abs(y)  # sign-change equivariance: report the positive-orthant copy
    if np.any(y < 1e-6):  # boundary of the orthant: not an interior point
        return None
    j = jac(y)
    if abs(float(np.linalg.det(j))) < 1e-8:
        return None  # continuum of equilibria, not an isolated one
    point = np.zeros(vf.n)
    point[idx] = y
    return point
