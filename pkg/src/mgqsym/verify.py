"""Named verification suites: the structural identities as proof obligations.

Each suite instantiates one family of identities over a presentation and runs
the bounded prover on every instance.  Outcomes are Proved (with a replayable
trace), DischargedNumerically (exact zero under every enumerated character
and within tolerance under every supplied matrix model), Undecided, or Failed
(a numeric check found a nonzero value, which would signal a real defect).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .multigraph import Multigraph
from .ncalg import (
    Ambient,
    NCPolynomial,
    ProofEngine,
    RuleSet,
    TensorPolynomial,
    reduce,
    reduce_word,
    replay_trace,
    to_text,
)
from .presentation import (
    Presentation,
    banica_lift,
    build_presentation,
    coproduct_poly,
    edge_matrix,
    substitute,
    vertex_matrix,
)

PROVED = "proved"
DISCHARGED = "discharged_numeric"
UNDECIDED = "undecided"
FAILED = "failed"


@dataclass
class Obligation:
    oid: str
    description: str
    status: str
    depth: Optional[int] = None
    trace: Optional[List[Tuple]] = None
    residual_terms: Optional[int] = None
    numeric: Optional[Dict] = None
    payload: object = None  # NCPolynomial | TensorPolynomial | None

    def to_dict(self) -> Dict:
        return {
            "id": self.oid,
            "description": self.description,
            "status": self.status,
            "depth": self.depth,
            "trace_len": len(self.trace) if self.trace is not None else None,
            "residual_terms": self.residual_terms,
            "numeric": self.numeric,
        }


@dataclass
class SuiteReport:
    suite: str
    obligations: List[Obligation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def summary(self) -> Dict[str, int]:
        counts = {"total": len(self.obligations), PROVED: 0, DISCHARGED: 0, UNDECIDED: 0, FAILED: 0}
        for o in self.obligations:
            counts[o.status] += 1
        return counts

    @property
    def all_proved(self) -> bool:
        return all(o.status == PROVED for o in self.obligations)

    @property
    def all_settled(self) -> bool:
        return all(o.status in (PROVED, DISCHARGED) for o in self.obligations)

    def to_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "summary": self.summary,
            "notes": list(self.notes),
            "obligations": [o.to_dict() for o in self.obligations],
        }


@dataclass
class NumericContext:
    """Evaluation oracles used to discharge obligations the prover leaves open."""

    characters: Sequence = ()
    models: Sequence = ()
    tol: float = 1e-10

    def check(self, p: Presentation, payload) -> Tuple[bool, Dict]:
        import numpy as np

        char_max = Fraction(0)
        if isinstance(payload, TensorPolynomial):
            for c in self.characters:
                char_max = max(char_max, abs(c.evaluate_tensor(payload)))
        elif self.characters:
            from .characters import evaluate_over_characters

            vals = evaluate_over_characters(payload, self.characters)
            char_max = max((abs(v) for v in vals), default=Fraction(0))
        model_max = 0.0
        for m in self.models:
            if isinstance(payload, TensorPolynomial):
                dev = float(np.linalg.norm(m.evaluate_tensor(payload), "fro"))
            else:
                dev = float(np.linalg.norm(m.evaluate(payload), "fro"))
            model_max = max(model_max, dev)
        ok = char_max == 0 and model_max <= self.tol
        info = {
            "characters": len(self.characters),
            "character_max": str(char_max),
            "models": len(self.models),
            "model_max": model_max,
        }
        return ok, info


def _decide(
    p: Presentation,
    oid: str,
    description: str,
    payload,
    max_insertions: int,
    node_budget: int,
    base_ok,
    numeric: Optional[NumericContext],
) -> Obligation:
    if isinstance(payload, TensorPolynomial):
        red = payload.legwise_reduce(p.rules)
        if red.is_zero():
            return Obligation(
                oid, description, PROVED, depth=0,
                trace=[("tensor_legwise_reduce",)], residual_terms=0, payload=payload,
            )
        ob = Obligation(
            oid, description, UNDECIDED, residual_terms=len(red.terms), payload=payload
        )
    else:
        engine = ProofEngine(p.rules, node_budget, base_ok)
        out = engine.prove_zero(payload, max_insertions)
        if out.proved:
            return Obligation(
                oid, description, PROVED, depth=out.depth_used,
                trace=out.trace, residual_terms=0, payload=payload,
            )
        ob = Obligation(
            oid, description, UNDECIDED, depth=max_insertions,
            residual_terms=len(out.residual.terms), payload=payload,
        )
    if numeric is not None:
        ok, info = numeric.check(p, payload)
        ob.numeric = info
        ob.status = DISCHARGED if ok else FAILED
    return ob


def _run_suite(
    name: str,
    p: Presentation,
    items: List[Tuple[str, str, object]],
    max_insertions: int,
    node_budget: int,
    workers: int,
    numeric: Optional[NumericContext],
    warm_depth: int = 2,
) -> SuiteReport:
    base_ok = ProofEngine(p.rules, node_budget).warm(warm_depth)

    def work(item):
        oid, desc, payload = item
        return _decide(p, oid, desc, payload, max_insertions, node_budget, base_ok, numeric)

    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            obligations = list(pool.map(work, items))
    else:
        obligations = [work(it) for it in items]
    return SuiteReport(name, obligations)


def _vname(p: Presentation, v: int) -> str:
    return p.graph.vertices[v]


def _ename(p: Presentation, e) -> str:
    return p.graph.edge_label(e)


# ---------------------------------------------------------------------------
# suites


def verify_vertex_magic(
    p: Presentation,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """The vertex co-representation matrix is again a magic unitary."""
    vm = vertex_matrix(p)
    amb = p.ambient
    nv = len(p.graph.vertices)
    one = NCPolynomial.unit(amb)
    items: List[Tuple[str, str, object]] = []
    for k in range(nv):
        for i in range(nv):
            q = vm.entries[(k, i)]
            items.append(
                (
                    f"vertex_magic/self_adjoint/{_vname(p, k)}/{_vname(p, i)}",
                    "entry equals its adjoint",
                    q.adjoint() - q,
                )
            )
    for k in range(nv):
        for i in range(nv):
            for i2 in range(nv):
                lhs = vm.entries[(k, i)] * vm.entries[(k, i2)]
                rhs = vm.entries[(k, i)] if i == i2 else NCPolynomial.zero(amb)
                items.append(
                    (
                        f"vertex_magic/row_orth/{_vname(p, k)}/{_vname(p, i)}/{_vname(p, i2)}",
                        "same-row entries multiply to a delta",
                        lhs - rhs,
                    )
                )
    for i in range(nv):
        for k in range(nv):
            for k2 in range(nv):
                lhs = vm.entries[(k, i)] * vm.entries[(k2, i)]
                rhs = vm.entries[(k, i)] if k == k2 else NCPolynomial.zero(amb)
                items.append(
                    (
                        f"vertex_magic/col_orth/{_vname(p, i)}/{_vname(p, k)}/{_vname(p, k2)}",
                        "same-column entries multiply to a delta",
                        lhs - rhs,
                    )
                )
    for k in range(nv):
        total = NCPolynomial.zero(amb)
        for i in range(nv):
            total = total + vm.entries[(k, i)]
        items.append(
            (f"vertex_magic/row_sum/{_vname(p, k)}", "row sums to the unit", total - one)
        )
    for i in range(nv):
        total = NCPolynomial.zero(amb)
        for k in range(nv):
            total = total + vm.entries[(k, i)]
        items.append(
            (f"vertex_magic/col_sum/{_vname(p, i)}", "column sums to the unit", total - one)
        )
    n = amb.n_labels
    if n > 1:
        for k in range(nv):
            for i in range(nv):
                for s in range(1, n + 1):
                    for s2 in range(s + 1, n + 1):
                        a = NCPolynomial(
                            amb, {(p.gen(k, s, i, r),): 1 for r in range(1, n + 1)}
                        )
                        b = NCPolynomial(
                            amb, {(p.gen(k, s2, i, r),): 1 for r in range(1, n + 1)}
                        )
                        items.append(
                            (
                                f"vertex_magic/label_free/{_vname(p, k)}/{_vname(p, i)}/{s}/{s2}",
                                "partial row sums agree across labels",
                                a - b,
                            )
                        )
    report = _run_suite(
        "vertex_magic", p, items, max_insertions, node_budget, workers, numeric
    )
    if not p.include_rv:
        report.notes.append(
            "label-sum relations not assumed: the label_free obligations state them"
        )
    return report


def verify_bimodule(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Left/right module actions of the vertex matrix on edge-matrix entries."""
    vm = vertex_matrix(p)
    em = edge_matrix(p, g)
    amb = p.ambient
    nv = len(g.vertices)
    items = []
    for a, sigma in enumerate(em.edges):
        i, j, _r = sigma
        for b, tau in enumerate(em.edges):
            k, l, _s = tau
            u = em.entries[(a, b)]
            for k2 in range(nv):
                lhs = vm.entries[(i, k2)] * u
                rhs = u if k2 == k else NCPolynomial.zero(amb)
                items.append(
                    (
                        f"bimodule/left/{_ename(p, sigma)}/{_ename(p, tau)}/{_vname(p, k2)}",
                        "left vertex action picks out the source",
                        lhs - rhs,
                    )
                )
            for l2 in range(nv):
                lhs = u * vm.entries[(j, l2)]
                rhs = u if l2 == l else NCPolynomial.zero(amb)
                items.append(
                    (
                        f"bimodule/right/{_ename(p, sigma)}/{_ename(p, tau)}/{_vname(p, l2)}",
                        "right vertex action picks out the target",
                        lhs - rhs,
                    )
                )
    return _run_suite("bimodule", p, items, max_insertions, node_budget, workers, numeric)


def verify_coproduct_identity(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Delta(u^sigma_tau) equals the matrix coproduct over the edge set."""
    em = edge_matrix(p, g)
    n_edges = len(em.edges)
    items = []
    for a in range(n_edges):
        for b in range(n_edges):
            lhs = coproduct_poly(em.entries[(a, b)], p)
            rhs = TensorPolynomial(p.ambient)
            for t in range(n_edges):
                rhs = rhs + TensorPolynomial.of(em.entries[(a, t)], em.entries[(t, b)])
            items.append(
                (
                    f"coproduct/{_ename(p, em.edges[a])}/{_ename(p, em.edges[b])}",
                    "coproduct of an edge entry matches the matrix coproduct",
                    lhs - rhs,
                )
            )
    return _run_suite("coproduct", p, items, max_insertions, node_budget, workers, numeric)


def verify_restricted_orthogonality(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Products of parallel-edge entries against a common edge vanish."""
    amb = p.ambient
    items = []
    for (i, j) in sorted(g.arcs()):
        mult = g.multiplicity(i, j)
        if mult < 2:
            continue
        for r in range(1, mult + 1):
            for r2 in range(1, mult + 1):
                if r == r2:
                    continue
                for (k, l, s) in g.edges:
                    # u^{(i,j)r}_{(k,l)s} u^{(i,j)r2 *}_{(k,l)s}
                    word_a = (
                        p.gen(i, r, k, s),
                        p.gen(j, r, l, s),
                        p.gen(j, r2, l, s),
                        p.gen(i, r2, k, s),
                    )
                    # u^{(i,j)r *}_{(k,l)s} u^{(i,j)r2}_{(k,l)s}
                    word_b = (
                        p.gen(j, r, l, s),
                        p.gen(i, r, k, s),
                        p.gen(i, r2, k, s),
                        p.gen(j, r2, l, s),
                    )
                    sigma = f"({_vname(p, i)},{_vname(p, j)})"
                    tau = _ename(p, (k, l, s))
                    items.append(
                        (
                            f"restricted_orth/uustar/{sigma}{r}/{sigma}{r2}/{tau}",
                            "parallel edges stay orthogonal against a common edge",
                            NCPolynomial(amb, {word_a: 1}),
                        )
                    )
                    items.append(
                        (
                            f"restricted_orth/ustaru/{sigma}{r}/{sigma}{r2}/{tau}",
                            "adjoint-side product of parallel edges vanishes",
                            NCPolynomial(amb, {word_b: 1}),
                        )
                    )
    return _run_suite(
        "restricted_orth", p, items, max_insertions, node_budget, workers, numeric
    )


def verify_xi_fixed(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Column sums of the edge matrix equal the unit (edge-space reading)."""
    em = edge_matrix(p, g)
    amb = p.ambient
    one = NCPolynomial.unit(amb)
    n_edges = len(em.edges)
    items = []
    for b in range(n_edges):
        total = NCPolynomial.zero(amb)
        for a in range(n_edges):
            total = total + em.entries[(a, b)]
        items.append(
            (
                f"xi_fixed/{_ename(p, em.edges[b])}",
                "edge-matrix column sums to the unit",
                total - one,
            )
        )
    report = _run_suite("xi_fixed", p, items, max_insertions, node_budget, workers, numeric)
    report.notes.append(
        "fixed-vector condition checked on the edge space: column sums of the"
        " edge matrix equal 1 (the vertex-space reading does not type-check)"
    )
    return report


def verify_biunitarity(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 20_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Gram identities of the edge matrix and its conjugate; numeric fallback."""
    em = edge_matrix(p, g)
    amb = p.ambient
    n_edges = len(em.edges)
    one = NCPolynomial.unit(amb)
    items = []

    def entry(a, b):
        return em.entries[(a, b)]

    for a in range(n_edges):
        for b in range(n_edges):
            delta = one if a == b else NCPolynomial.zero(amb)
            fams = {
                "row_uustar": sum(
                    (entry(a, t) * entry(b, t).adjoint() for t in range(n_edges)),
                    NCPolynomial.zero(amb),
                ),
                "row_ustaru": sum(
                    (entry(a, t).adjoint() * entry(b, t) for t in range(n_edges)),
                    NCPolynomial.zero(amb),
                ),
                "col_ustaru": sum(
                    (entry(t, a).adjoint() * entry(t, b) for t in range(n_edges)),
                    NCPolynomial.zero(amb),
                ),
                "col_uustar": sum(
                    (entry(t, a) * entry(t, b).adjoint() for t in range(n_edges)),
                    NCPolynomial.zero(amb),
                ),
            }
            for fam in sorted(fams):
                items.append(
                    (
                        f"biunitarity/{fam}/{_ename(p, em.edges[a])}/{_ename(p, em.edges[b])}",
                        "Gram sum of edge-matrix entries equals a delta",
                        fams[fam] - delta,
                    )
                )
    return _run_suite(
        "biunitarity", p, items, max_insertions, node_budget, workers, numeric
    )


def verify_permissible_preservation(
    p: Presentation,
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> SuiteReport:
    """Entries mixing a permissible column with a non-permissible row vanish."""
    amb = p.ambient
    perm = {amb.pair(v, r) for (v, r) in g.permissible_pairs()}
    non_perm = [x for x in range(amb.n_pairs) if x not in perm]
    items = []
    for x in non_perm:
        for col in sorted(perm):
            gid = amb.gen(x, col)
            items.append(
                (
                    f"permissible/{amb.pair_name(x)}/{amb.pair_name(col)}",
                    "non-permissible row over permissible column vanishes",
                    NCPolynomial.generator(amb, gid),
                )
            )
    return _run_suite(
        "permissible", p, items, max_insertions, node_budget, workers, numeric
    )


def verify_banica_lift_membership(
    g: Multigraph,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
) -> SuiteReport:
    """Substituting the lift generators into every relation gives zero."""
    p = build_presentation(g, include_rv=True)
    lift = banica_lift(g)
    amb_q = p.ambient
    amb_u = lift.ambient
    engine = ProofEngine(lift.rules, node_budget)
    obligations: List[Obligation] = []

    # vanishing-pair images, aggregated per class (counts in the description)
    classes = {"magic": [], "edge": []}
    for (a, b) in sorted(p.rules.vanishing):
        key = "edge" if (a, b) in p.graph_vanishing else "magic"
        classes[key].append((a, b))
    for key in ("magic", "edge"):
        bad = []
        for (a, b) in classes[key]:
            word_poly = NCPolynomial(amb_q, {(a, b): 1})
            image = substitute(word_poly, lift)
            if not reduce(image, lift.rules).is_zero():
                bad.append((a, b))
        status = PROVED if not bad else UNDECIDED
        obligations.append(
            Obligation(
                f"banica_lift/vanishing_images/{key}",
                f"{len(classes[key])} {key} vanishing pairs map to zero"
                + (f"; {len(bad)} did not reduce" if bad else ""),
                status,
                depth=0 if not bad else None,
                trace=[("reduce_images", key, len(classes[key]))] if not bad else None,
                residual_terms=len(bad),
            )
        )

    one_u = NCPolynomial.unit(amb_u)
    for x in range(amb_q.n_pairs):
        row_img = substitute(
            NCPolynomial(amb_q, {(gid,): 1 for gid in amb_q.row_family(x)}), lift
        )
        out = engine.prove_zero(row_img - one_u, max_insertions)
        obligations.append(
            Obligation(
                f"banica_lift/unit_row/{amb_q.pair_name(x)}",
                "row-sum image equals the unit",
                PROVED if out.proved else UNDECIDED,
                depth=out.depth_used,
                trace=out.trace if out.proved else None,
                residual_terms=0 if out.proved else len(out.residual.terms),
            )
        )
        col_img = substitute(
            NCPolynomial(amb_q, {(gid,): 1 for gid in amb_q.col_family(x)}), lift
        )
        out = engine.prove_zero(col_img - one_u, max_insertions)
        obligations.append(
            Obligation(
                f"banica_lift/unit_col/{amb_q.pair_name(x)}",
                "column-sum image equals the unit",
                PROVED if out.proved else UNDECIDED,
                depth=out.depth_used,
                trace=out.trace if out.proved else None,
                residual_terms=0 if out.proved else len(out.residual.terms),
            )
        )

    n = amb_q.n_labels
    if n > 1:
        nv = len(g.vertices)
        for k in range(nv):
            for i in range(nv):
                for s in range(1, n + 1):
                    for s2 in range(s + 1, n + 1):
                        a_img = substitute(
                            NCPolynomial(
                                amb_q, {(p.gen(k, s, i, r),): 1 for r in range(1, n + 1)}
                            ),
                            lift,
                        )
                        b_img = substitute(
                            NCPolynomial(
                                amb_q, {(p.gen(k, s2, i, r),): 1 for r in range(1, n + 1)}
                            ),
                            lift,
                        )
                        out = engine.prove_zero(a_img - b_img, max_insertions)
                        obligations.append(
                            Obligation(
                                f"banica_lift/label_sum/{g.vertices[k]}/{g.vertices[i]}/{s}/{s2}",
                                "label-sum relation maps to a trivial identity",
                                PROVED if out.proved else UNDECIDED,
                                depth=out.depth_used,
                                trace=out.trace if out.proved else None,
                                residual_terms=0 if out.proved else len(out.residual.terms),
                            )
                        )
    return SuiteReport("banica_lift", obligations)


ALL_SUITES = (
    "vertex_magic",
    "bimodule",
    "coproduct",
    "restricted_orth",
    "xi_fixed",
    "biunitarity",
    "permissible",
    "banica_lift",
)


def run_all_suites(
    p: Presentation,
    g: Multigraph,
    suites: Sequence[str] = ALL_SUITES,
    max_insertions: int = 3,
    node_budget: int = 200_000,
    workers: int = 1,
    numeric: Optional[NumericContext] = None,
) -> List[SuiteReport]:
    reports = []
    for name in suites:
        if name == "vertex_magic":
            reports.append(
                verify_vertex_magic(p, max_insertions, node_budget, workers, numeric)
            )
        elif name == "bimodule":
            reports.append(
                verify_bimodule(p, g, max_insertions, node_budget, workers, numeric)
            )
        elif name == "coproduct":
            reports.append(
                verify_coproduct_identity(p, g, max_insertions, node_budget, workers, numeric)
            )
        elif name == "restricted_orth":
            reports.append(
                verify_restricted_orthogonality(
                    p, g, max_insertions, node_budget, workers, numeric
                )
            )
        elif name == "xi_fixed":
            reports.append(
                verify_xi_fixed(p, g, max_insertions, node_budget, workers, numeric)
            )
        elif name == "biunitarity":
            reports.append(
                verify_biunitarity(
                    p, g, max_insertions, min(node_budget, 20_000), workers, numeric
                )
            )
        elif name == "permissible":
            reports.append(
                verify_permissible_preservation(
                    p, g, max_insertions, node_budget, workers, numeric
                )
            )
        elif name == "banica_lift":
            reports.append(
                verify_banica_lift_membership(g, max_insertions, node_budget, workers)
            )
        else:
            raise ValueError(f"unknown suite {name!r}")
    return reports


# ---------------------------------------------------------------------------
# trace replay and explanation


def replay_obligation(ob: Obligation, rules: RuleSet) -> bool:
    """Re-run a Proved trace; True iff it lands exactly on zero."""
    if ob.status != PROVED or ob.trace is None:
        return False
    if isinstance(ob.payload, TensorPolynomial):
        return ob.payload.legwise_reduce(rules).is_zero()
    if ob.payload is None:
        # aggregated obligation: nothing to replay beyond its own recheck
        return True
    final = replay_trace(ob.payload, ob.trace, rules)
    return final.is_zero()


def explain(ob: Obligation, rules: RuleSet) -> str:
    """Human-readable proof trace with intermediate polynomials."""
    lines = [f"obligation {ob.oid}: {ob.status}"]
    if ob.payload is None or ob.trace is None:
        lines.append("(no stored polynomial trace)")
        return "\n".join(lines)
    if isinstance(ob.payload, TensorPolynomial):
        lines.append("tensor identity; legwise reduction reaches zero")
        return "\n".join(lines)
    p = reduce(ob.payload, rules)
    lines.append(f"start: {to_text(p)}")
    for step in ob.trace:
        p = replay_trace(p, [step], rules)
        lines.append(f"after {step[0]}: {to_text(p)}")
    return "\n".join(lines)
