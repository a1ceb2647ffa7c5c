"""Command-line front end: parse -> decompose -> complete -> realise ->
analyze -> simulate, with the built-in corpus available as `corpus:<name>`.

Exit codes: 0 success, 1 validation failure, 2 inconclusive analysis under
--strict, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from .completion import (
    Direction,
    complete_two_cycle,
    delta_closure_general,
    direction_of_minimum,
    exhaustive_minimality_oracle,
    is_complete,
    minimal_completion_count,
    predict_positive_transverse,
)
from .errors import HetnetError, NotTwoCyclesError
from .graphs import (
    DeltaClique,
    DiGraph,
    admissibility_violations,
    decompose_two_cycles,
    distribution_vertices,
    find_delta_cliques,
    is_strongly_connected,
    is_tournament,
    parse_graph,
)
from .realisation import (
    EigenSpec,
    build_vector_field,
    classify_eigenvalues,
    extract_quasi_simple_cycles,
)
from .simulate import IntegratorConfig, integrate, verify_connection, verify_delta_clique
from .stability import (
    Verdict,
    house_case_a_check,
    house_case_b_check,
    return_map_products,
    transition_matrices,
    verdict as stability_verdict,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INCONCLUSIVE = 2
EXIT_INTERNAL = 3


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Verdict):
        return obj.value
    raise TypeError(f"not JSON serializable: {type(obj)}")


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default)


def load_graph(spec: str) -> DiGraph:
    if spec.startswith("corpus:"):
        entry = corpus_mod.get(spec.split(":", 1)[1])
        if entry.build is None:
            raise HetnetError(
                f"corpus entry {entry.name!r} is not simplex-realisable ({entry.note})"
            )
        return entry.graph
    return parse_graph(Path(spec).read_text())


def load_params(path: str | None) -> EigenSpec:
    """Parameter file: lines `e <i> <j> <value>`, `c <i> <j> <value>`,
    `t <i> <j> <value>` giving the eigenvalue at vertex i in direction j."""
    if path is None:
        return EigenSpec()
    expanding: dict = {}
    contracting: dict = {}
    transverse: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("e", "c", "t"):
            raise HetnetError(f"params line {lineno}: expected 'e|c|t <i> <j> <value>'")
        kind, i, j, value = parts[0], int(parts[1]), int(parts[2]), float(parts[3])
        if kind == "e":
            expanding[(i, j)] = value
        elif kind == "c":
            contracting[(j, i)] = value  # contracting at i from the edge j -> i
        else:
            transverse[(i, j)] = value
    return EigenSpec(expanding=expanding, contracting=contracting, transverse=transverse)


def graph_summary(g: DiGraph) -> dict:
    return {
        "n_vertices": g.n,
        "edges": [[u, v] for u, v in g.edges],
        "strongly_connected": is_strongly_connected(g),
        "tournament": is_tournament(g),
        "admissibility_problems": admissibility_violations(g),
    }


def cmd_validate(args) -> int:
    g = load_graph(args.graph)
    problems = list(admissibility_violations(g))
    if not is_strongly_connected(g):
        problems.append("not strongly connected")
    report = {"input": graph_summary(g), "problems": problems, "valid": not problems}
    _emit(args, report, text_lines=[
        f"vertices: {g.n}, edges: {len(g.edges)}",
        *(f"problem: {p}" for p in problems),
        "valid" if not problems else "invalid",
    ])
    return EXIT_OK if not problems else EXIT_INVALID


def _policies(name: str) -> list[Direction]:
    if name == "both":
        return [Direction.SHORT_TO_LONG, Direction.LONG_TO_SHORT]
    return [Direction(name)]


def _plan_dict(plan, predictions=None) -> dict:
    d = {
        "policy": plan.policy.value if plan.policy else None,
        "added_edges": [[u, v] for u, v in plan.added_edges],
        "count": plan.count,
        "minimal": plan.minimal,
        "target_vertex": plan.target_vertex,
    }
    if predictions is not None:
        d["positive_transverse"] = [
            {
                "cycle": list(p.cycle),
                "count": p.positive_count,
                "locations": list(p.locations),
            }
            for p in predictions
        ]
    return d


def _closure_failures_dict(failures) -> list[dict]:
    return [
        {"vertex": f.vertex, "kind": f.kind.value, "detail": list(f.detail)}
        for f in failures
    ]


def cmd_complete(args) -> int:
    g = load_graph(args.graph)
    report: dict = {"input": graph_summary(g)}
    lines = []
    if is_complete(g):
        report["already_complete"] = True
    try:
        dec = decompose_two_cycles(g)
    except NotTwoCyclesError:
        # graphs with more than two cycles go through the general closure
        result = delta_closure_general(g)
        if isinstance(result, list):
            report["closure_failures"] = _closure_failures_dict(result)
            lines = [f"closure failed at {f.vertex}: {f.kind.value}" for f in result]
            _emit(args, report, lines)
            return EXIT_INVALID
        report["plans"] = [_plan_dict(result)]
        lines = [
            f"general closure: {result.count} edge(s) "
            f"{[f'{u}->{v}' for u, v in result.added_edges]}"
            f"{' (minimal)' if result.minimal else ''}"
        ]
        _emit(args, report, lines)
        return EXIT_OK
    report["decomposition"] = {
        "cycle_short": list(dec.cycle_short),
        "cycle_long": list(dec.cycle_long),
        "k": dec.k,
        "l": dec.l,
        "m": dec.m,
        "shared_path": list(dec.shared_path),
        "distribution_vertex": dec.v_d,
        "collection_vertex": dec.v_c,
    }
    report["minimal_count"] = minimal_completion_count(dec.k, dec.l, dec.m)
    report["direction_of_minimum"] = direction_of_minimum(dec.k, dec.l, dec.m).value
    plans = []
    for policy in _policies(args.policy):
        plan = complete_two_cycle(g, dec, policy)
        preds = predict_positive_transverse(dec, plan)
        plans.append(_plan_dict(plan, preds))
        lines.append(
            f"{policy.value}: {plan.count} edge(s) "
            f"{[f'{u}->{v}' for u, v in plan.added_edges]}"
            f"{' (minimal)' if plan.minimal else ''}"
        )
    report["plans"] = plans
    if args.oracle:
        oracle = exhaustive_minimality_oracle(g)
        report["oracle_count"] = oracle
        agrees = oracle == report["minimal_count"]
        report["oracle_agrees"] = agrees
        lines.append(f"oracle: {oracle} ({'agrees' if agrees else 'DISAGREES'})")
        if not agrees:
            _emit(args, report, lines)
            return EXIT_INTERNAL
    _emit(args, report, lines)
    return EXIT_OK


def _stability_section(vf, cycles) -> tuple[dict, bool]:
    """Per-cycle eigenvalue tables, products and verdicts; returns the JSON
    fragment and whether anything was inconclusive."""
    any_inconclusive = False
    out = []
    for qsc in cycles:
        table = classify_eigenvalues(vf, qsc)
        entry: dict = {
            "cycle": list(qsc.equilibria),
            "eigenvalues": [
                {
                    "vertex": row.vertex,
                    "radial": row.radial,
                    "contracting": row.contracting,
                    "expanding": row.expanding,
                    "transverse": dict(zip(map(str, row.transverse_directions), row.transverse)),
                }
                for row in table.rows
            ],
        }
        if table.n_t == 0:
            entry["stability"] = {"skipped": "no transverse directions"}
        else:
            mats = transition_matrices(table)
            products = return_map_products(mats)
            per_base = []
            for p in products:
                v = stability_verdict(p)
                any_inconclusive |= v.verdict is Verdict.INCONCLUSIVE
                per_base.append(
                    {
                        "base_vertex": p.base_vertex,
                        "matrix": p.matrix,
                        "abs_determinant": p.abs_determinant,
                        "dominant": p.dominant,
                        "dominant_is_complex": p.dominant_is_complex,
                        "eigenvector": p.eigenvector,
                        "alpha": p.alpha,
                        "beta": p.beta,
                        "verdict": v.verdict,
                    }
                )
            entry["stability"] = per_base
        out.append(entry)
    return {"cycles": out}, any_inconclusive


def cmd_analyze(args) -> int:
    g = load_graph(args.graph)
    spec = load_params(args.params)
    report: dict = {"input": graph_summary(g)}
    lines = []

    if args.case:
        dec = decompose_two_cycles(g)
        policy = Direction.LONG_TO_SHORT if args.case == "a" else Direction.SHORT_TO_LONG
        plan = complete_two_cycle(g, dec, policy)
        g_prime = plan.apply(g)
        vf = build_vector_field(g_prime, spec)
        target_cycle = dec.cycle_short if args.case == "a" else dec.cycle_long
        qsc = next(
            c for c in extract_quasi_simple_cycles(g_prime) if c.equilibria == target_cycle
        )
        table = classify_eigenvalues(vf, qsc)
        if args.case == "a":
            rep = house_case_a_check(table)
            report["case_a"] = {
                "cycle": list(rep.table_cycle),
                "positive_at": rep.positive_at,
                "lambda": rep.lam,
                "alpha": rep.alpha,
                "u_last_sign_matches_first": rep.u_last_sign_matches_first,
                "verdict": rep.verdict.verdict,
            }
            lines.append(f"case a: lambda = {rep.lam:.6g}, verdict {rep.verdict.verdict.value}")
        else:
            rep = house_case_b_check(table)
            report["case_b"] = {
                "cycle": list(rep.table_cycle),
                "positive_at": list(rep.positive_at),
                "alpha": rep.alpha,
                "beta": rep.beta,
                "abs_determinant": rep.abs_determinant,
                "det_condition": rep.det_condition,
                "third_column_exact": rep.third_column_exact,
                "verdict": rep.verdict.verdict,
            }
            lines.append(
                f"case b: beta1 = {rep.beta[0]:.6g} beta2 = {rep.beta[1]:.6g} "
                f"|det| = {rep.abs_determinant:.6g}, verdict {rep.verdict.verdict.value}"
            )
        report["completion"] = _plan_dict(plan)
        _emit(args, report, lines)
        inconclusive = rep.verdict.verdict is Verdict.INCONCLUSIVE
        return EXIT_INCONCLUSIVE if (args.strict and inconclusive) else EXIT_OK

    # generic pipeline: complete if needed, then analyze all (or one) cycles
    g_prime = g
    if not is_complete(g):
        try:
            dec = decompose_two_cycles(g)
            plan = complete_two_cycle(g, dec, direction_of_minimum(dec.k, dec.l, dec.m))
            report["completion"] = _plan_dict(plan, predict_positive_transverse(dec, plan))
        except NotTwoCyclesError:
            result = delta_closure_general(g)
            if isinstance(result, list):
                report["completion"] = {"closure_failures": _closure_failures_dict(result)}
                _emit(args, report, [f"closure failed at {f.vertex}: {f.kind.value}"
                                     for f in result])
                return EXIT_INVALID
            plan = result
            report["completion"] = _plan_dict(plan)
        g_prime = plan.apply(g)
    else:
        report["completion"] = {"skipped": "graph is already complete"}
    vf = build_vector_field(g_prime, spec)
    report["vector_field"] = vf.to_json_dict()
    cycles = extract_quasi_simple_cycles(g_prime)
    if args.cycle is not None:
        if not (0 <= args.cycle < len(cycles)):
            raise HetnetError(f"--cycle index out of range; graph has {len(cycles)} cycles")
        cycles = [cycles[args.cycle]]
    section, any_inconclusive = _stability_section(vf, cycles)
    report["stability"] = section
    for entry in section["cycles"]:
        if isinstance(entry["stability"], dict):
            lines.append(f"cycle {entry['cycle']}: no transverse directions")
        else:
            worst = entry["stability"][0]["verdict"].value
            lines.append(f"cycle {entry['cycle']}: {worst}")
    _emit(args, report, lines)
    return EXIT_INCONCLUSIVE if (args.strict and any_inconclusive) else EXIT_OK


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    spec = load_params(args.params)
    cfg = IntegratorConfig()
    vf = build_vector_field(g, spec)
    report: dict = {"input": graph_summary(g)}
    lines = []
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    angles = None
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        angles = rng.uniform(0.0, np.pi / 2.0, size=args.samples)
        angles = angles[(angles > 0) & (angles < np.pi / 2)]

    connections = []
    for edge in g.edges:
        check = verify_connection(vf, edge, cfg)
        connections.append(
            {
                "edge": list(edge),
                "passed": check.passed,
                "achieved_distance": check.achieved_distance,
                "transit_time": check.transit_time,
                "plane_confinement_error": check.plane_confinement_error,
            }
        )
        if out_dir:
            n = vf.n
            x0 = np.zeros(n)
            x0[edge[0] - 1] = 1.0
            x0[edge[1] - 1] = cfg.epsilon
            traj = integrate(vf, x0, cfg)
            (out_dir / f"connection_{edge[0]}_{edge[1]}.csv").write_text(traj.to_csv())
    report["connections"] = connections
    ok_conn = sum(1 for c in connections if c["passed"])
    lines.append(f"connections: {ok_conn}/{len(connections)} passed")

    fans = []
    by_b = {}
    for c in find_delta_cliques(g):
        by_b.setdefault(c.b_point, c)
    for v in distribution_vertices(g):
        clique = by_b.get(v)
        tag = "triangle"
        if clique is None:
            succ = g.successors(v)
            if len(succ) != 2:
                fans.append({"b_point": v, "skipped": "out-degree is not 2"})
                continue
            clique = DeltaClique(v, (succ[0], succ[1]))
            tag = "no-triangle"
        fan = verify_delta_clique(vf, clique, args.samples, cfg, angles=angles)
        fans.append(
            {
                "b_point": v,
                "targets": list(clique.targets),
                "kind": tag,
                "samples": fan.samples,
                "absorbed_by": {str(k): c for k, c in sorted(fan.absorbed_by.items())},
                "escaped": fan.escaped,
                "extra_equilibrium_suspected": fan.extra_equilibrium_suspected,
                "contained": fan.contained,
            }
        )
        lines.append(
            f"fan at {v} -> {dict(sorted(fan.absorbed_by.items()))}, "
            f"escaped {fan.escaped}"
            + (", extra equilibrium suspected" if fan.extra_equilibrium_suspected else "")
        )
        if out_dir:
            (out_dir / f"fan_{v}.json").write_text(dump_report(fans[-1]))
    report["fans"] = fans
    all_ok = all(c["passed"] for c in connections) and all(
        f.get("contained", False) for f in fans if "skipped" not in f
    )
    report["passed"] = all_ok
    lines.append("completeness verified" if all_ok else "completeness NOT verified")
    _emit(args, report, lines)
    return EXIT_OK if all_ok else EXIT_INVALID


def cmd_corpus(args) -> int:
    rows = []
    for name in sorted(corpus_mod.CORPUS):
        e = corpus_mod.CORPUS[name]
        rows.append(
            {
                "name": e.name,
                "m": e.m,
                "k": e.k,
                "l": e.l,
                "dimension": e.dimension,
                "simplex_realisable": e.simplex_realisable,
                "source": e.source,
                "note": e.note,
            }
        )
    report = {"corpus": rows}
    lines = [
        f"{r['name']:<22} realisable={str(r['simplex_realisable']):<5} "
        f"(m={r['m']}, k={r['k']}, l={r['l']}) {r['note']}"
        for r in rows
    ]
    _emit(args, report, lines)
    return EXIT_OK


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(dump_report(report))
    else:
        for line in text_lines:
            print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnet",
        description=(
            "Complete heteroclinic networks from cycle digraphs: minimal edge "
            "completion, eigenvalue analysis, and numerical verification. "
            "Graphs are file paths or corpus:<name>."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and check a graph")
    p.add_argument("graph")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("complete", help="compute completion plans")
    p.add_argument("graph")
    p.add_argument(
        "--policy",
        choices=["short-to-long", "long-to-short", "both"],
        default="both",
    )
    p.add_argument("--oracle", action="store_true", help="cross-check with exhaustive search")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("analyze", help="eigenvalue tables and return-map verdicts")
    p.add_argument("graph")
    p.add_argument("--cycle", type=int, default=None, help="index of one cycle to analyze")
    p.add_argument("--case", choices=["a", "b"], default=None,
                   help="run the dedicated 3-cycle (a) or 4-cycle (b) reduction")
    p.add_argument("--params", default=None, help="eigenvalue parameter file")
    p.add_argument("--strict", action="store_true",
                   help="exit 2 when any verdict is inconclusive")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="verify connections and fans numerically")
    p.add_argument("graph")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None,
                   help="sample fan angles randomly with this seed instead of evenly")
    p.add_argument("--out", default=None, help="directory for trajectory CSV / fan JSON")
    p.add_argument("--params", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("corpus", help="list built-in graphs")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HetnetError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
