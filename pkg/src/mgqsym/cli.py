"""Command-line entry point.

Subcommands: analyze (structure + automorphism count), present (presentation
JSON), verify (proof suites), characters (enumeration, faithfulness, oracle
comparison), witness (projection-pair model evaluation).  Reports are
deterministic: identical input and flags give byte-identical output for any
worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import characters as chars_mod
from . import matmodel, multigraph, verify
from .errors import MgqsymError
from .ncalg import to_text
from .presentation import banica_lift, build_presentation, export_json, permissible_subpresentation


def _dump(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    return _as_text(obj) + "\n"


def _as_text(obj, indent: str = "") -> str:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{indent}{k}:")
                lines.append(_as_text(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_as_text(v, indent + "  ") for v in obj)
    return f"{indent}{obj}"


def _numeric_context(p, g, tol: float, budget: int):
    cs = chars_mod.enumerate_characters(p, budget)
    models = []
    if cs:
        base = [matmodel.character_to_model(c, p) for c in cs[: min(3, len(cs))]]
        models.append(matmodel.combine(base, "direct-sum") if len(base) > 1 else base[0])
    return verify.NumericContext(characters=cs, models=models, tol=tol)


def cmd_analyze(args) -> int:
    g = multigraph.load(args.graph)
    report = {
        "vertices": list(g.vertices),
        "edges": [g.edge_label(e) for e in g.edges],
        "n_max": g.n_max,
        "uniform": g.is_uniform(),
        "permissible_pairs": [
            f"{g.vertices[v]},{r}" for (v, r) in g.permissible_pairs()
        ],
        "permissible_count": len(g.permissible_pairs()),
        "automorphisms": len(multigraph.automorphisms(g, args.nodes)),
        "arcs": {
            f"({g.vertices[i]},{g.vertices[j]})": g.multiplicity(i, j)
            for (i, j) in sorted(g.arcs())
        },
    }
    sys.stdout.write(_dump(report, args.format))
    return 0


def cmd_present(args) -> int:
    g = multigraph.load(args.graph)
    if args.which == "banica":
        p = banica_lift(g)
    else:
        p = build_presentation(g, include_rv=not args.no_rv)
    if args.which == "qprime":
        retained, closure = permissible_subpresentation(p, g, args.depth)
        obj = json.loads(export_json(p))
        obj["retained_generators"] = retained
        obj["closure_all_proved"] = closure.all_proved
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        return 0
    sys.stdout.write(export_json(p) + "\n")
    return 0


def cmd_verify(args) -> int:
    g = multigraph.load(args.graph)
    p = build_presentation(g, include_rv=not args.no_rv)
    numeric = _numeric_context(p, g, args.tol, args.nodes)
    suites = args.suite or list(verify.ALL_SUITES)
    reports = verify.run_all_suites(
        p,
        g,
        suites=suites,
        max_insertions=args.depth,
        node_budget=args.engine_nodes,
        workers=args.workers,
        numeric=numeric,
    )
    if args.explain:
        for rep in reports:
            for ob in rep.obligations:
                if ob.oid == args.explain:
                    rules = p.rules
                    if rep.suite == "banica_lift":
                        rules = banica_lift(g).rules
                    sys.stdout.write(verify.explain(ob, rules) + "\n")
                    return 0
        sys.stderr.write(f"no obligation with id {args.explain!r}\n")
        return 1
    payload = {"graph": args.graph_name or args.graph, "suites": [r.to_dict() for r in reports]}
    sys.stdout.write(_dump(payload, args.format))
    any_failed = any(
        ob.status == verify.FAILED for r in reports for ob in r.obligations
    )
    any_open = any(
        ob.status == verify.UNDECIDED for r in reports for ob in r.obligations
    )
    if any_failed:
        return 1
    return 2 if any_open else 0


def cmd_characters(args) -> int:
    g = multigraph.load(args.graph)
    p = build_presentation(g, include_rv=not args.no_rv)
    cs = chars_mod.enumerate_characters(p, args.nodes)
    full = chars_mod.faithfulness_report(p, g, "full", chars=cs)
    perm = chars_mod.faithfulness_report(p, g, "permissible", chars=cs)
    comparison = None
    exit_code = 0
    try:
        rep = chars_mod.compare_with_automorphisms(p, g, args.nodes, chars=cs)
        comparison = {
            "automorphisms": rep.automorphism_count,
            "permissible_characters": rep.character_count,
            "matched": rep.matched,
            "bijection": rep.bijection,
        }
    except MgqsymError as exc:
        comparison = {"error": str(exc)}
        exit_code = 1
    payload = {
        "graph": args.graph_name or args.graph,
        "characters": len(cs),
        "faithfulness": {
            "full": _faith_dict(full),
            "permissible": _faith_dict(perm),
        },
        "automorphism_comparison": comparison,
    }
    if args.cycles:
        amb = p.ambient
        payload["assignments"] = [
            _cycles(c, amb) for c in cs[: args.cycles]
        ]
    sys.stdout.write(_dump(payload, args.format))
    return exit_code


def _faith_dict(rep):
    return {
        "subalgebra": rep.subalgebra,
        "characters": rep.character_count,
        "distinct_actions": rep.distinct_action_count,
        "kernel_pairs": rep.kernel_pair_count,
        "kernel_pair_sample": [list(t) for t in rep.kernel_pair_sample],
        "faithful": rep.faithful,
    }


def _cycles(c, amb) -> str:
    seen = set()
    parts = []
    for start in range(amb.n_pairs):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = c.assignment[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = c.assignment[nxt]
        if len(cyc) > 1:
            parts.append("(" + " ".join(amb.pair_name(x) for x in cyc) + ")")
    return "".join(parts) if parts else "id"


def cmd_witness(args) -> int:
    g = multigraph.load(args.graph)
    p = build_presentation(g)
    model = matmodel.pauli_witness(g, args.theta, p)
    rel = matmodel.check_relations(model, p, args.tol)
    from .presentation import edge_matrix

    em = edge_matrix(p, g)
    ev = matmodel.evaluate_edge_matrix(model, em, args.tol)
    payload = {
        "graph": args.graph_name or args.graph,
        "theta": args.theta,
        "relations": rel.to_dict(),
        "edge_matrix": ev,
        "witness": rel.passed and ev["biunitary"] <= args.tol and ev["magic"] > args.tol,
    }
    sys.stdout.write(_dump(payload, args.format))
    return 0 if payload["witness"] else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgqsym",
        description="quantum symmetry presentations of finite multigraphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--graph", required=True, help="graph file (JSON or 'src dst' lines)")
        sp.add_argument("--graph-name", default=None, help="display name for reports")
        sp.add_argument("--depth", type=int, default=3, help="max proof insertions")
        sp.add_argument("--nodes", type=int, default=10**7, help="search node budget")
        sp.add_argument(
            "--engine-nodes", type=int, default=200_000, help="prover node budget per obligation"
        )
        sp.add_argument("--tol", type=float, default=1e-10, help="numeric tolerance")
        sp.add_argument("--no-rv", action="store_true", help="drop the label-sum relations")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("analyze", help="structure, uniformity, automorphism count")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("present", help="presentation JSON export")
    common(sp)
    sp.add_argument("--which", choices=("q", "qprime", "banica"), default="q")
    sp.set_defaults(func=cmd_present)

    sp = sub.add_parser("verify", help="run the verification suites")
    common(sp)
    sp.add_argument("--suite", action="append", choices=verify.ALL_SUITES, default=None)
    sp.add_argument("--explain", default=None, help="print the trace of one obligation id")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("characters", help="enumerate classical characters")
    common(sp)
    sp.add_argument("--cycles", type=int, default=0, help="print up to K assignments in cycle form")
    sp.set_defaults(func=cmd_characters)

    sp = sub.add_parser("witness", help="projection-pair model on a complete-underlying graph")
    common(sp)
    sp.add_argument("--theta", type=float, required=True, help="angle in (0, pi/2)")
    sp.set_defaults(func=cmd_witness)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if not (0 < args.tol < 1):
        parser.error("--tol must lie in (0, 1)")
    if args.depth < 0 or args.nodes <= 0 or args.workers <= 0:
        parser.error("budgets and workers must be positive")
    try:
        return args.func(args)
    except MgqsymError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
