"""Relation catalogues for the quantum symmetry object of a multigraph.

build_presentation assembles the generator matrix over (vertex, label) pairs
with the magic-unitary relations, the edge-compatibility vanishing pairs, and
(optionally) the label-sum linear relations that make vertex sums label-free.
Derived objects: the vertex co-representation matrix, the edge matrix
u^sigma_tau = q.q, coproduct tables, the permissible-index subalgebra, and
the lift of the underlying weighted graph's quantum automorphisms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import ParseError
from .multigraph import Multigraph
from .ncalg import Ambient, NCPolynomial, RuleSet, TensorPolynomial

UNIFORM = "uniform"
NON_UNIFORM = "non_uniform"
BANICA_LIFT = "banica_lift"


@dataclass
class Presentation:
    graph: Multigraph
    ambient: Ambient
    rules: RuleSet
    kind: str
    include_rv: bool
    graph_vanishing: FrozenSet[Tuple[int, int]]  # the edge-derived subset
    # lift only: q-generator gid (in source_ambient) -> lift gid, or None when
    # the label mismatch makes the image zero outright
    substitutions: Optional[Dict[int, Optional[int]]] = None
    source_ambient: Optional[Ambient] = None

    def gen(self, k, s, i, r) -> int:
        """Generator id from vertex names/indices and labels."""
        amb = self.ambient
        k = k if isinstance(k, int) else self.graph.index_of(k)
        i = i if isinstance(i, int) else self.graph.index_of(i)
        return amb.gen(amb.pair(k, s), amb.pair(i, r))

    def generator_names(self) -> List[str]:
        return [self.ambient.gen_name(g) for g in range(self.ambient.n_gens)]


def _graph_pair_condition(g: Multigraph, k: int, s: int, l: int, s2: int) -> bool:
    """Vanishing test for a pair over an edge column: rows (k,s), (l,s2)."""
    m = g.multiplicity(k, l)
    if m == 0:
        return True  # no arc between the row vertices
    if s != s2:
        return True  # parallel edges cannot split
    return s > m  # label beyond the arc's multiplicity (non-uniform only)


def build_presentation(g: Multigraph, include_rv: bool = True) -> Presentation:
    """Generators over (V x labels)^2 with magic + edge-compatibility relations."""
    n = g.n_max
    amb = Ambient(g.vertices, n)
    m = amb.n_pairs
    vanishing = set()
    # magic-unitary orthogonality: same row or same column, distinct mates
    for p in range(m):
        for c1 in range(m):
            for c2 in range(m):
                if c1 != c2:
                    vanishing.add((amb.gen(p, c1), amb.gen(p, c2)))
                    vanishing.add((amb.gen(c1, p), amb.gen(c2, p)))
    # edge-compatibility relations along every labeled edge
    graph_pairs = set()
    nv = len(g.vertices)
    for (i, j, r) in g.edges:
        for k in range(nv):
            for s in range(1, n + 1):
                for l in range(nv):
                    for s2 in range(1, n + 1):
                        if _graph_pair_condition(g, k, s, l, s2):
                            pair = (
                                amb.gen(amb.pair(k, s), amb.pair(i, r)),
                                amb.gen(amb.pair(l, s2), amb.pair(j, r)),
                            )
                            graph_pairs.add(pair)
    vanishing |= graph_pairs
    kind = UNIFORM if g.is_uniform() else NON_UNIFORM
    rules = RuleSet(amb, vanishing, rv=include_rv)
    return Presentation(g, amb, rules, kind, include_rv, frozenset(graph_pairs))


# ---------------------------------------------------------------------------
# derived matrices


@dataclass
class VertexMatrix:
    """Entries (k, i) -> sum_r q^{k,1}_{i,r}; label 1 is the representative."""

    presentation: Presentation
    entries: Dict[Tuple[int, int], NCPolynomial]

    def entry(self, k, i) -> NCPolynomial:
        g = self.presentation.graph
        k = k if isinstance(k, int) else g.index_of(k)
        i = i if isinstance(i, int) else g.index_of(i)
        return self.entries[(k, i)]


def vertex_matrix(p: Presentation) -> VertexMatrix:
    amb = p.ambient
    nv = len(p.graph.vertices)
    entries = {}
    for k in range(nv):
        for i in range(nv):
            terms = {}
            for r in range(1, amb.n_labels + 1):
                terms[(p.gen(k, 1, i, r),)] = 1
            entries[(k, i)] = NCPolynomial(amb, terms)
    return VertexMatrix(p, entries)


@dataclass
class EdgeMatrix:
    """Entries (sigma, tau) -> q^{ks}_{ir} q^{ls}_{jr}, edges in input order."""

    presentation: Presentation
    edges: Tuple[Tuple[int, int, int], ...]
    entries: Dict[Tuple[int, int], NCPolynomial]  # (sigma index, tau index)

    def entry(self, sigma: int, tau: int) -> NCPolynomial:
        return self.entries[(sigma, tau)]


def edge_matrix(p: Presentation, g: Multigraph) -> EdgeMatrix:
    edges = tuple(g.edges)
    entries = {}
    for si, (k, l, s) in enumerate(edges):
        for ti, (i, j, r) in enumerate(edges):
            word = (p.gen(k, s, i, r), p.gen(l, s, j, r))
            entries[(si, ti)] = NCPolynomial(p.ambient, {word: 1})
    return EdgeMatrix(p, edges, entries)


def coproduct(gen: int, p: Presentation) -> TensorPolynomial:
    """Delta(q^{ks}_{ir}) = sum over middle pairs of q^{ks}_x (x) q^x_{ir}."""
    amb = p.ambient
    row, col = amb.row(gen), amb.col(gen)
    terms = {}
    for x in range(amb.n_pairs):
        terms[((amb.gen(row, x),), (amb.gen(x, col),))] = 1
    return TensorPolynomial(amb, terms)


def coproduct_poly(poly: NCPolynomial, p: Presentation) -> TensorPolynomial:
    """Multiplicative extension of the coproduct to polynomials."""
    amb = p.ambient
    out = TensorPolynomial(amb)
    one = TensorPolynomial(amb, {((), ()): 1})
    for w, c in poly.items():
        acc = one
        for g in w:
            acc = acc * coproduct(g, p)
        out = out + TensorPolynomial(amb, {k: v * c for k, v in acc.terms.items()})
    return out


# ---------------------------------------------------------------------------
# permissible subalgebra


@dataclass
class ClosureEntry:
    generator: int
    dropped_middle: int  # non-permissible middle pair index
    leg: str  # which tensor leg was proved zero
    status: str
    depth: int


@dataclass
class ClosureReport:
    retained: List[int]
    entries: List[ClosureEntry]
    all_proved: bool
    # the alternative generating family from the edge matrix, recorded only
    alternative_generators: List[Tuple[int, int]]


def permissible_subpresentation(p: Presentation, g: Multigraph, max_insertions: int = 3):
    """Generator subset with both indices permissible, plus the coproduct
    closure report: every dropped middle term needs a zero proof on one leg."""
    from .ncalg import ProofEngine

    amb = p.ambient
    perm = {amb.pair(v, r) for (v, r) in g.permissible_pairs()}
    retained = sorted(
        gid
        for gid in range(amb.n_gens)
        if amb.row(gid) in perm and amb.col(gid) in perm
    )
    non_perm = [x for x in range(amb.n_pairs) if x not in perm]
    entries = []
    engine = ProofEngine(p.rules)
    cache: Dict[int, Tuple[str, int]] = {}
    for gid in retained:
        row, col = amb.row(gid), amb.col(gid)
        for x in non_perm:
            # dropped term q^{row}_x (x) q^x_{col}: the right leg has a
            # non-permissible row over a permissible column
            right = amb.gen(x, col)
            if right in cache:
                status, depth = cache[right]
                leg = "right"
            else:
                out = engine.prove_zero(
                    NCPolynomial.generator(amb, right), max_insertions
                )
                status, depth = out.status, out.depth_used
                cache[right] = (status, depth)
                leg = "right"
            if status != "proved":
                left = amb.gen(row, x)
                out = engine.prove_zero(NCPolynomial.generator(amb, left), max_insertions)
                if out.proved:
                    status, depth, leg = out.status, out.depth_used, "left"
            entries.append(ClosureEntry(gid, x, leg, status, depth))
    alt = []
    for (k, l, s) in g.edges:
        for (i, j, r) in g.edges:
            alt.append((p.gen(k, s, i, r), p.gen(l, s, j, r)))
    return retained, ClosureReport(
        retained,
        entries,
        all(e.status == "proved" for e in entries),
        alt,
    )


# ---------------------------------------------------------------------------
# lift of the underlying graph's quantum automorphisms


def banica_lift(g: Multigraph) -> Presentation:
    """Magic matrix over V with multiplicity-mismatch vanishing, plus the
    substitution table sending q^{ks}_{ir} to delta_{sr} u^k_i."""
    nv = len(g.vertices)
    amb_u = Ambient(g.vertices, 1, unary=True)
    vanishing = set()
    for pvert in range(nv):
        for c1 in range(nv):
            for c2 in range(nv):
                if c1 != c2:
                    vanishing.add((amb_u.gen(pvert, c1), amb_u.gen(pvert, c2)))
                    vanishing.add((amb_u.gen(c1, pvert), amb_u.gen(c2, pvert)))
    for k in range(nv):
        for i in range(nv):
            for l in range(nv):
                for j in range(nv):
                    if g.multiplicity(k, l) != g.multiplicity(i, j):
                        vanishing.add((amb_u.gen(k, i), amb_u.gen(l, j)))
    mismatch = frozenset(
        (a, b)
        for (a, b) in vanishing
        if amb_u.row(a) != amb_u.row(b) and amb_u.col(a) != amb_u.col(b)
    )
    rules = RuleSet(amb_u, vanishing, rv=False)
    amb_q = Ambient(g.vertices, g.n_max)
    table: Dict[int, Optional[int]] = {}
    for gid in range(amb_q.n_gens):
        row, col = amb_q.row(gid), amb_q.col(gid)
        s, r = amb_q.pair_label(row), amb_q.pair_label(col)
        if s != r:
            table[gid] = None
        else:
            table[gid] = amb_u.gen(amb_q.pair_vertex(row), amb_q.pair_vertex(col))
    return Presentation(
        g,
        amb_u,
        rules,
        BANICA_LIFT,
        False,
        mismatch,
        substitutions=table,
        source_ambient=amb_q,
    )


def substitute(poly: NCPolynomial, lift: Presentation) -> NCPolynomial:
    """Push a polynomial over the big ambient through the lift substitution."""
    if lift.substitutions is None or lift.source_ambient is None:
        raise ParseError("presentation carries no substitution table")
    if poly.ambient != lift.source_ambient:
        raise ParseError("polynomial does not live over the lift's source ambient")
    out: Dict[Tuple[int, ...], object] = {}
    terms = {}
    for w, c in poly.terms.items():
        image = []
        dead = False
        for gid in w:
            u = lift.substitutions[gid]
            if u is None:
                dead = True
                break
            image.append(u)
        if dead:
            continue
        key = tuple(image)
        terms[key] = terms.get(key, 0) + c
    return NCPolynomial(lift.ambient, terms)


# ---------------------------------------------------------------------------
# JSON export / import


def export_json(p: Presentation) -> str:
    amb = p.ambient
    rows = [sorted(amb.row_family(x)) for x in range(amb.n_pairs)]
    cols = [sorted(amb.col_family(x)) for x in range(amb.n_pairs)]
    linear = []
    for rv_vertex, cv, row_pairs in (p.rules.rv_groups() or []):
        base = row_pairs[0]
        for other in row_pairs[1:]:
            linear.append(
                {
                    "plus": sorted(p.rules.group_members(base, cv)),
                    "minus": sorted(p.rules.group_members(other, cv)),
                }
            )
    subs = None
    if p.substitutions is not None:
        subs = {str(k): v for k, v in sorted(p.substitutions.items())}
    obj = {
        "vertices": list(amb.vertices),
        "n_labels": amb.n_labels,
        "kind": p.kind,
        "include_rv": p.include_rv,
        "generators": p.generator_names(),
        "vanishing_pairs": sorted(map(list, p.rules.vanishing)),
        "graph_vanishing_pairs": sorted(map(list, p.graph_vanishing)),
        "unit_sums": {"rows": rows, "cols": cols},
        "linear_relations": linear,
        "substitutions": subs,
        "graph": {
            "vertices": list(p.graph.vertices),
            "edges": [
                {"src": p.graph.vertices[i], "dst": p.graph.vertices[j]}
                for (i, j, _r) in p.graph.edges
            ],
        },
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def import_json(text: str) -> Presentation:
    from .multigraph import build as build_graph

    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad presentation JSON: {exc}") from None
    graph = build_graph(
        obj["graph"]["vertices"],
        [(e["src"], e["dst"]) for e in obj["graph"]["edges"]],
    )
    kind = obj["kind"]
    if kind == BANICA_LIFT:
        p = banica_lift(graph)
    else:
        p = build_presentation(graph, include_rv=obj["include_rv"])
    # imported relation data must agree with the reconstruction
    have = sorted(map(list, p.rules.vanishing))
    if have != obj["vanishing_pairs"]:
        raise ParseError("vanishing pairs do not match the graph's presentation")
    return p
