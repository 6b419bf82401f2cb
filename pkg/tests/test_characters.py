"""Character enumeration, edge actions, faithfulness, oracle comparison."""

import math

import pytest

from mgqsym import build_presentation
from mgqsym.characters import (
    Character,
    character_to_automorphism,
    check_character,
    compare_with_automorphisms,
    edge_action_of,
    edge_matrix_cache,
    enumerate_characters,
    evaluate_over_characters,
    faithfulness_report,
    restrict_to_permissible,
    vertex_action_of,
)
from mgqsym.errors import NotAPermutation, SearchBudgetExceeded
from mgqsym.multigraph import automorphisms
from mgqsym.ncalg import NCPolynomial

from conftest import (
    figure1_graph,
    loop_graph,
    single_edge_graph,
    triangle_doubled_graph,
    two_arc_graph,
)


def test_counts_small(corpus, presentations, corpus_characters):
    assert len(corpus_characters["loop"]) == 1
    assert len(corpus_characters["single"]) == 1
    assert len(corpus_characters["two_arc"]) == 8
    assert len(corpus_characters["triangle_doubled"]) == 24


def test_figure1_count_against_closed_form(corpus, corpus_characters):
    # oracle: |Aut| times the free permutations of the non-permissible labels
    g = corpus["figure1"]
    autos = len(automorphisms(g))
    perm = set(g.permissible_pairs())
    free = 1
    for v in range(len(g.vertices)):
        missing = sum(
            1 for r in range(1, g.n_max + 1) if (v, r) not in perm
        )
        free *= math.factorial(missing)
    assert len(corpus_characters["figure1"]) == autos * free  # 240 * 36


def test_characters_satisfy_relations_posthoc(presentations, corpus_characters):
    for name in ("loop", "single", "two_arc", "triangle_doubled"):
        for c in corpus_characters[name]:
            check_character(presentations[name], c)
    p = presentations["figure1"]
    for c in corpus_characters["figure1"][::97]:
        check_character(p, c)


def test_corrupted_assignment_rejected(presentations):
    p = presentations["single"]
    # swap both columns: maps (a,1)->(b,1) and (b,1)->(a,1), which violates
    # the edge-compatibility relations of the single edge
    bad = Character((1, 0))
    with pytest.raises(NotAPermutation):
        check_character(p, bad)


def test_without_label_sums_more_characters():
    g = figure1_graph()
    with_rv = enumerate_characters(build_presentation(g, include_rv=True))
    without = enumerate_characters(build_presentation(g, include_rv=False))
    assert len(without) > len(with_rv)


def test_budget_guard():
    g = figure1_graph()
    p = build_presentation(g)
    with pytest.raises(SearchBudgetExceeded):
        enumerate_characters(p, budget=50)


def test_identity_character_identity_edge_action(corpus, presentations, corpus_characters):
    for name in ("loop", "single", "two_arc"):
        p = presentations[name]
        g = corpus[name]
        em = edge_matrix_cache(p, g)
        ident = Character(tuple(range(p.ambient.n_pairs)))
        assert ident in corpus_characters[name]
        assert edge_action_of(ident, em) == tuple(range(len(g.edges)))


def test_two_arc_label_swap_action(corpus, presentations, corpus_characters):
    # the character fixing vertices and swapping the labels on the (a,b) arc
    # must swap the edges (a,b)1 <-> (a,b)2
    g = corpus["two_arc"]
    p = presentations["two_arc"]
    em = edge_matrix_cache(p, g)
    amb = p.ambient
    swap = {amb.pair(0, 1): amb.pair(0, 2), amb.pair(0, 2): amb.pair(0, 1)}
    assignment = tuple(swap.get(x, x) for x in range(amb.n_pairs))
    target = Character(assignment)
    assert target in corpus_characters["two_arc"]
    action = edge_action_of(target, em)
    e1 = em.edges.index((0, 1, 1))
    e2 = em.edges.index((0, 1, 2))
    assert action[e1] == e2 and action[e2] == e1


def test_figure1_non_permissible_swap_gives_identity_action(corpus, presentations, corpus_characters):
    # permuting only the non-permissible labels (c,3..5)/(d,3..5) fixes all
    # vertices and edges: the induced edge action is the identity
    g = corpus["figure1"]
    p = presentations["figure1"]
    amb = p.ambient
    em = edge_matrix_cache(p, g)
    swap = {}
    for v in (2, 3):  # vertices c and d
        swap[amb.pair(v, 3)] = amb.pair(v, 4)
        swap[amb.pair(v, 4)] = amb.pair(v, 3)
    assignment = tuple(swap.get(x, x) for x in range(amb.n_pairs))
    ch = Character(assignment)
    check_character(p, ch)
    assert ch in corpus_characters["figure1"]
    assert edge_action_of(ch, em) == tuple(range(len(g.edges)))
    assert vertex_action_of(ch, p) == (0, 1, 2, 3)


def test_vertex_actions_are_permutations(corpus, presentations, corpus_characters):
    for name in ("two_arc", "triangle_doubled"):
        p = presentations[name]
        for c in corpus_characters[name]:
            vertex_action_of(c, p)  # raises NotAPermutation on failure


def test_edge_action_functoriality(corpus, presentations, corpus_characters):
    # composing characters as permutations of the pair set composes their
    # edge actions
    for name in ("two_arc", "triangle_doubled"):
        p = presentations[name]
        g = corpus[name]
        em = edge_matrix_cache(p, g)
        chars = corpus_characters[name]
        for c1 in chars[:4]:
            for c2 in chars[:4]:
                comp = Character(
                    tuple(c2.assignment[c1.assignment[x]] for x in range(p.ambient.n_pairs))
                )
                check_character(p, comp)
                a1 = edge_action_of(c1, em)
                a2 = edge_action_of(c2, em)
                expected = tuple(a2[a1[t]] for t in range(len(g.edges)))
                assert edge_action_of(comp, em) == expected


def test_faithfulness_figure1(corpus, presentations, corpus_characters):
    g = corpus["figure1"]
    p = presentations["figure1"]
    chars = corpus_characters["figure1"]
    full = faithfulness_report(p, g, "full", chars=chars)
    assert full.kernel_pair_count > 0
    assert full.kernel_pair_sample
    assert not full.faithful
    perm = faithfulness_report(p, g, "permissible", chars=chars)
    assert perm.kernel_pair_count == 0
    assert perm.faithful
    assert perm.character_count == perm.distinct_action_count == 240


def test_faithfulness_uniform_reports_match(corpus, presentations, corpus_characters):
    for name in ("two_arc", "triangle_doubled"):
        g, p = corpus[name], presentations[name]
        chars = corpus_characters[name]
        full = faithfulness_report(p, g, "full", chars=chars)
        perm = faithfulness_report(p, g, "permissible", chars=chars)
        assert full.character_count == perm.character_count
        assert full.kernel_pair_count == perm.kernel_pair_count == 0


def test_compare_with_automorphisms(corpus, presentations, corpus_characters):
    expected = {"single": 1, "two_arc": 8, "triangle_doubled": 24, "figure1": 240, "loop": 1}
    for name, count in expected.items():
        rep = compare_with_automorphisms(
            presentations[name], corpus[name], chars=corpus_characters[name]
        )
        assert rep.bijection
        assert rep.automorphism_count == rep.character_count == rep.matched == count


def test_character_to_automorphism_structure(corpus, presentations, corpus_characters):
    g = corpus["two_arc"]
    p = presentations["two_arc"]
    autos = {
        (a.vertex_map, tuple(sorted(a.edge_maps))) for a in automorphisms(g)
    }
    for c in corpus_characters["two_arc"]:
        a = character_to_automorphism(p, g, c)
        assert (a.vertex_map, tuple(sorted(a.edge_maps))) in autos


def test_restriction_dedup_counts(corpus, presentations, corpus_characters):
    g = corpus["figure1"]
    p = presentations["figure1"]
    reps = restrict_to_permissible(p, g, corpus_characters["figure1"])
    assert len(reps) == 240


def test_vectorized_character_evaluation(presentations, corpus_characters):
    p = presentations["two_arc"]
    amb = p.ambient
    chars = corpus_characters["two_arc"]
    poly = NCPolynomial(
        amb,
        {
            (p.gen("a", 1, "a", 1),): 1,
            (p.gen("a", 1, "a", 1), p.gen("b", 1, "b", 1)): -2,
        },
    )
    fast = evaluate_over_characters(poly, chars)
    slow = [c.evaluate(poly) for c in chars]
    assert fast == slow
