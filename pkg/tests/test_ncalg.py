"""Free *-algebra arithmetic, rewriting, and the bounded prover."""

import random
from fractions import Fraction

import pytest

from mgqsym import build_presentation
from mgqsym.errors import MixedAmbient
from mgqsym.ncalg import (
    NCPolynomial,
    ProofEngine,
    from_text,
    reduce,
    replay_trace,
    to_text,
)

from conftest import figure1_graph, single_edge_graph, two_arc_graph


@pytest.fixture(scope="module")
def two_arc():
    g = two_arc_graph()
    return g, build_presentation(g)


@pytest.fixture(scope="module")
def figure1():
    g = figure1_graph()
    return g, build_presentation(g)


def random_poly(amb, rng, max_terms=4, max_len=3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        w = tuple(rng.randrange(amb.n_gens) for _ in range(rng.randint(0, max_len)))
        terms[w] = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
    return NCPolynomial(amb, terms)


def test_multiply_unit_law(two_arc):
    _g, p = two_arc
    amb = p.ambient
    rng = random.Random(7)
    one = NCPolynomial.unit(amb)
    for _ in range(20):
        q = random_poly(amb, rng)
        assert one * q == q
        assert q * one == q


def test_multiply_vanishing_pair_reduces_to_zero(two_arc):
    _g, p = two_arc
    amb = p.ambient
    g1 = p.gen("a", 1, "a", 1)
    g2 = p.gen("a", 1, "a", 2)  # same row, distinct columns
    prod = NCPolynomial.generator(amb, g1) * NCPolynomial.generator(amb, g2)
    assert reduce(prod, p.rules).is_zero()


def test_square_of_same_row_sum(two_arc):
    # (g + h)^2 -> g + h for distinct same-row g, h: by hand the expansion is
    # g.g + g.h + h.g + h.h and the cross terms die by row orthogonality
    _g, p = two_arc
    amb = p.ambient
    g1 = p.gen("a", 1, "a", 1)
    g2 = p.gen("a", 1, "b", 2)
    s = NCPolynomial.generator(amb, g1) + NCPolynomial.generator(amb, g2)
    assert reduce(s * s, p.rules) == s


def test_adjoint_examples(two_arc):
    _g, p = two_arc
    amb = p.ambient
    g1, g2 = p.gen("a", 1, "a", 1), p.gen("b", 2, "a", 2)
    gh = NCPolynomial(amb, {(g1, g2): 1})
    assert gh.adjoint() == NCPolynomial(amb, {(g2, g1): 1})
    one = NCPolynomial.unit(amb)
    assert one.adjoint() == one
    mixed = NCPolynomial(amb, {(g1, g2): 2, (g2,): -3})
    assert mixed.adjoint() == NCPolynomial(amb, {(g2, g1): 2, (g2,): -3})


def test_adjoint_involution_and_antihomomorphism(two_arc):
    _g, p = two_arc
    amb = p.ambient
    rng = random.Random(11)
    for _ in range(25):
        a, b = random_poly(amb, rng), random_poly(amb, rng)
        assert a.adjoint().adjoint() == a
        assert (a * b).adjoint() == b.adjoint() * a.adjoint()


def test_reduce_idempotent_and_nonincreasing(two_arc):
    _g, p = two_arc
    amb = p.ambient
    rng = random.Random(13)
    for _ in range(30):
        q = random_poly(amb, rng, max_terms=5, max_len=4)
        r = reduce(q, p.rules)
        assert reduce(r, p.rules) == r
        assert len(r.terms) <= len(q.terms)
        if q.terms:
            assert max((len(w) for w in r.terms), default=0) <= max(
                len(w) for w in q.terms
            )


def test_reduce_idempotency_rule(two_arc):
    _g, p = two_arc
    amb = p.ambient
    g1 = p.gen("a", 1, "b", 2)
    assert reduce(NCPolynomial(amb, {(g1, g1): 1}), p.rules) == NCPolynomial.generator(
        amb, g1
    )


def test_reduce_edge_relation_instance(figure1):
    # q^{ks}_{ir} q^{ls'}_{jr} = 0 when no arc joins the row vertices,
    # instantiated over the edge (a,b)1 with rows at c and a
    _g, p = figure1
    amb = p.ambient
    w = (p.gen("c", 1, "a", 1), p.gen("a", 1, "b", 1))
    assert reduce(NCPolynomial(amb, {w: 1}), p.rules).is_zero()


def test_mixed_ambient_raises(two_arc, figure1):
    _g1, p1 = two_arc
    _g2, p2 = figure1
    a = NCPolynomial.unit(p1.ambient)
    b = NCPolynomial.unit(p2.ambient)
    with pytest.raises(MixedAmbient):
        a * b


def test_text_round_trip(two_arc):
    _g, p = two_arc
    amb = p.ambient
    rng = random.Random(17)
    for _ in range(25):
        q = random_poly(amb, rng)
        assert from_text(to_text(q), amb) == q
    assert from_text("0", amb).is_zero()
    assert to_text(NCPolynomial.zero(amb)) == "0"


def test_prove_zero_trivial(two_arc):
    _g, p = two_arc
    engine = ProofEngine(p.rules)
    out = engine.prove_zero(NCPolynomial.zero(p.ambient))
    assert out.proved and out.depth_used == 0


def test_prove_zero_permissible_instance(figure1):
    # non-permissible row (c,3) over permissible column (a,1): one insertion
    # of the column family at (b,1) kills every term
    _g, p = figure1
    engine = ProofEngine(p.rules)
    poly = NCPolynomial.generator(p.ambient, p.gen("c", 3, "a", 1))
    out = engine.prove_zero(poly, 3)
    assert out.proved and out.depth_used == 1
    assert replay_trace(poly, out.trace, p.rules).is_zero()


def test_prove_zero_restricted_orthogonality_instance(two_arc):
    # u^{(a,b)1} u^{(a,b)2 *} against (a,b)1: dies by column orthogonality
    _g, p = two_arc
    amb = p.ambient
    word = (
        p.gen("a", 1, "a", 1),
        p.gen("b", 1, "b", 1),
        p.gen("b", 2, "b", 1),
        p.gen("a", 2, "a", 1),
    )
    out = ProofEngine(p.rules).prove_zero(NCPolynomial(amb, {word: 1}), 3)
    assert out.proved and out.depth_used == 0


def test_prove_equal_syntactic(two_arc):
    _g, p = two_arc
    engine = ProofEngine(p.rules)
    q = NCPolynomial.generator(p.ambient, p.gen("a", 1, "b", 1))
    assert engine.prove_equal(q, q).proved


def test_prove_equal_vertex_entries(two_arc):
    # Q^k_i Q^k_{i'} = delta Q^k_i on the two-arc graph
    from mgqsym.presentation import vertex_matrix

    _g, p = two_arc
    vm = vertex_matrix(p)
    engine = ProofEngine(p.rules)
    assert engine.prove_equal(
        vm.entries[(0, 0)] * vm.entries[(0, 0)], vm.entries[(0, 0)]
    ).proved
    out = engine.prove_zero(vm.entries[(0, 0)] * vm.entries[(0, 1)], 3)
    assert out.proved


def test_prove_sum_factorization(two_arc):
    # sum_s P_s R_s = 1 with P_s = sum_k q^{ks}_{a1}, R_s = sum_l q^{ls}_{b1},
    # over the edge (a,b)1: cross terms die, the rest collapses to the unit
    g, p = two_arc
    amb = p.ambient
    total = NCPolynomial.zero(amb)
    for s in (1, 2):
        ps = NCPolynomial(amb, {(p.gen(k, s, 0, 1),): 1 for k in range(2)})
        rs = NCPolynomial(amb, {(p.gen(l, s, 1, 1),): 1 for l in range(2)})
        total = total + ps * rs
    out = ProofEngine(p.rules).prove_zero(total - NCPolynomial.unit(amb), 3)
    assert out.proved
    assert replay_trace(total - NCPolynomial.unit(amb), out.trace, p.rules).is_zero()


def test_proved_traces_replay_to_zero(two_arc):
    # soundness: replay every trace produced across a spread of identities
    from mgqsym.presentation import edge_matrix, vertex_matrix

    g, p = two_arc
    amb = p.ambient
    engine = ProofEngine(p.rules)
    vm = vertex_matrix(p)
    em = edge_matrix(p, g)
    one = NCPolynomial.unit(amb)
    polys = []
    for k in range(2):
        total = NCPolynomial.zero(amb)
        for i in range(2):
            total = total + vm.entries[(k, i)]
        polys.append(total - one)
    for b in range(4):
        total = NCPolynomial.zero(amb)
        for a in range(4):
            total = total + em.entries[(a, b)]
        polys.append(total - one)
    polys.append(vm.entries[(0, 0)] * vm.entries[(1, 0)])
    for poly in polys:
        out = engine.prove_zero(poly, 3)
        assert out.proved
        assert replay_trace(poly, out.trace, p.rules).is_zero()


def test_cross_oracle_consistency(two_arc):
    # a symbolically proved identity evaluates to exactly zero under every
    # character of the same presentation
    from mgqsym.characters import enumerate_characters
    from mgqsym.presentation import vertex_matrix

    g, p = two_arc
    chars = enumerate_characters(p)
    vm = vertex_matrix(p)
    poly = vm.entries[(0, 0)] * vm.entries[(1, 0)]
    assert ProofEngine(p.rules).prove_zero(poly, 3).proved
    for c in chars:
        assert c.evaluate(poly) == 0
