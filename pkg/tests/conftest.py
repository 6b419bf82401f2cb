"""Shared corpus graphs and cached heavyweight objects."""

from __future__ import annotations

import pytest

from mgqsym import build, build_presentation


def loop_graph():
    return build(["v"], [("v", "v")])


def single_edge_graph():
    return build(["a", "b"], [("a", "b")])


def two_arc_graph():
    return build(["a", "b"], [("a", "b"), ("a", "b"), ("b", "a"), ("b", "a")])


def triangle_doubled_graph():
    return build(
        ["a", "b", "c"],
        [("a", "b"), ("a", "b"), ("b", "c"), ("b", "c"), ("c", "a"), ("c", "a")],
    )


def figure1_graph():
    return build(["a", "b", "c", "d"], [("a", "b")] * 5 + [("c", "d")] * 2)


def k4_doubled_graph():
    vertices = ["a", "b", "c", "d"]
    pairs = []
    for i in vertices:
        for j in vertices:
            if i != j:
                pairs.extend([(i, j), (i, j)])
    return build(vertices, pairs)


CORPUS = {
    "loop": loop_graph,
    "single": single_edge_graph,
    "two_arc": two_arc_graph,
    "triangle_doubled": triangle_doubled_graph,
    "figure1": figure1_graph,
}


@pytest.fixture(scope="session")
def corpus():
    return {name: make() for name, make in CORPUS.items()}


@pytest.fixture(scope="session")
def presentations(corpus):
    return {name: build_presentation(g) for name, g in corpus.items()}


@pytest.fixture(scope="session")
def figure1():
    return figure1_graph()


@pytest.fixture(scope="session")
def k4_doubled():
    return k4_doubled_graph()


@pytest.fixture(scope="session")
def corpus_characters(corpus, presentations):
    from mgqsym.characters import enumerate_characters

    return {
        name: enumerate_characters(presentations[name])
        for name in corpus
    }
