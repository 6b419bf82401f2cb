"""Multigraph model, labeling, and the brute-force automorphism oracle."""

import itertools
import math

import pytest

from mgqsym import build, underlying
from mgqsym.errors import (
    EmptyEdgeList,
    IsolatedVertex,
    ParseError,
    SearchBudgetExceeded,
    UnknownEndpoint,
    UnknownVertex,
)
from mgqsym.multigraph import automorphisms, from_json, from_text

from conftest import (
    figure1_graph,
    loop_graph,
    single_edge_graph,
    triangle_doubled_graph,
    two_arc_graph,
)


def brute_force_automorphism_count(g):
    """Independent oracle: multiplicity-preserving vertex maps x label maps."""
    n = len(g.vertices)
    total = 0
    for perm in itertools.permutations(range(n)):
        if all(
            g.multiplicity(perm[i], perm[j]) == g.multiplicity(i, j)
            for i in range(n)
            for j in range(n)
        ):
            count = 1
            for (i, j) in g.arcs():
                count *= math.factorial(g.multiplicity(i, j))
            total += count
    return total


def test_build_figure1():
    g = figure1_graph()
    assert g.n_max == 5
    assert len(g.edges) == 7
    assert not g.is_uniform()


def test_build_loop():
    g = loop_graph()
    assert g.n_max == 1
    assert g.edges == ((0, 0, 1),)
    assert g.is_uniform()


def test_build_labels_in_input_order():
    g = two_arc_graph()
    assert g.edges == ((0, 1, 1), (0, 1, 2), (1, 0, 1), (1, 0, 2))
    assert g.n_max == 2


def test_build_errors():
    with pytest.raises(IsolatedVertex):
        build(["a", "b", "c"], [("a", "b")])
    with pytest.raises(UnknownEndpoint):
        build(["a", "b"], [("a", "x")])
    with pytest.raises(EmptyEdgeList):
        build(["a"], [])
    with pytest.raises(ParseError):
        build(["a", "a"], [("a", "a")])


def test_multiplicity():
    g = figure1_graph()
    assert g.multiplicity("a", "b") == 5
    assert g.multiplicity("b", "a") == 0
    assert loop_graph().multiplicity("v", "v") == 1
    with pytest.raises(UnknownVertex):
        g.multiplicity("a", "z")


def test_is_uniform():
    assert not figure1_graph().is_uniform()
    assert two_arc_graph().is_uniform()
    assert loop_graph().is_uniform()
    assert triangle_doubled_graph().is_uniform()


def test_underlying():
    und = underlying(figure1_graph())
    assert und.arcs == ((0, 1), (2, 3))
    assert und.weight[(0, 1)] == 5 and und.weight[(2, 3)] == 2
    assert und.adjacency() == [
        [0, 1, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 0, 0],
    ]
    assert und.adjacency(weighted=True)[0][1] == 5

    und = underlying(loop_graph())
    assert und.arcs == ((0, 0),) and und.weight[(0, 0)] == 1

    und = underlying(two_arc_graph())
    assert und.arcs == ((0, 1), (1, 0))
    assert set(und.weight.values()) == {2}


def test_permissible_pairs_against_edge_scan():
    for g in (figure1_graph(), loop_graph(), two_arc_graph(), triangle_doubled_graph()):
        expected = set()
        for (i, j, r) in g.edges:
            expected.add((i, r))
            expected.add((j, r))
        assert set(g.permissible_pairs()) == expected


def test_permissible_counts():
    assert len(figure1_graph().permissible_pairs()) == 14
    assert loop_graph().permissible_pairs() == [(0, 1)]
    assert len(two_arc_graph().permissible_pairs()) == 4


def test_permissible_full_iff_uniform():
    for g in (loop_graph(), single_edge_graph(), two_arc_graph(), triangle_doubled_graph()):
        full = {(v, r) for v in range(len(g.vertices)) for r in range(1, g.n_max + 1)}
        assert set(g.permissible_pairs()) == full
    g = figure1_graph()
    full = {(v, r) for v in range(4) for r in range(1, 6)}
    assert set(g.permissible_pairs()) < full


def test_edge_count_is_multiplicity_total():
    for g in (figure1_graph(), two_arc_graph(), triangle_doubled_graph()):
        n = len(g.vertices)
        total = sum(g.multiplicity(i, j) for i in range(n) for j in range(n))
        assert total == len(g.edges)


@pytest.mark.parametrize(
    "factory,expected",
    [
        (figure1_graph, 240),
        (two_arc_graph, 8),
        (single_edge_graph, 1),
        (loop_graph, 1),
        (triangle_doubled_graph, 24),
    ],
)
def test_automorphism_counts(factory, expected):
    g = factory()
    autos = automorphisms(g)
    assert len(autos) == expected
    assert brute_force_automorphism_count(g) == expected


def test_automorphisms_preserve_multiplicities():
    g = figure1_graph()
    n = len(g.vertices)
    for a in automorphisms(g):
        for i in range(n):
            for j in range(n):
                assert g.multiplicity(a.vertex_map[i], a.vertex_map[j]) == g.multiplicity(i, j)


def test_automorphism_group_axioms():
    for g in (two_arc_graph(), triangle_doubled_graph()):
        autos = automorphisms(g)
        keys = {(a.vertex_map, tuple(sorted(a.edge_maps))) for a in autos}
        for a in autos:
            inv = a.inverse()
            assert (inv.vertex_map, tuple(sorted(inv.edge_maps))) in keys
        for a in autos[:6]:
            for b in autos[:6]:
                c = a.compose(b)
                assert (c.vertex_map, tuple(sorted(c.edge_maps))) in keys


def test_automorphism_edge_application():
    g = two_arc_graph()
    for a in automorphisms(g):
        images = {a.apply_edge(e) for e in g.edges}
        assert images == set(g.edges)


def test_automorphism_budget_guard():
    g = figure1_graph()
    with pytest.raises(SearchBudgetExceeded):
        automorphisms(g, budget=10)


def test_json_and_text_parsers_agree():
    text = "a b\na b\nb a  # comment\nb a\n"
    json_text = (
        '{"vertices": ["a", "b"], "edges": ['
        '{"src": "a", "dst": "b"}, {"src": "a", "dst": "b"},'
        '{"src": "b", "dst": "a"}, {"src": "b", "dst": "a"}]}'
    )
    g1 = from_text(text)
    g2 = from_json(json_text)
    assert g1.vertices == g2.vertices
    assert g1.edges == g2.edges
    assert g1 == two_arc_graph()


def test_parser_errors():
    with pytest.raises(ParseError):
        from_text("a b c\n")
    with pytest.raises(EmptyEdgeList):
        from_text("# nothing\n")
    with pytest.raises(ParseError):
        from_json("[1, 2]")
    with pytest.raises(ParseError):
        from_json("{not json")
