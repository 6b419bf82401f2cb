"""Finite directed multigraphs with canonical edge labels.

A multigraph is a finite vertex set together with a list of directed edges
(parallel edges and loops allowed, isolated vertices forbidden).  Within each
arc class (i, j) the parallel edges receive labels 1..|E^i_j| in input order,
so every edge can be addressed as (i, j, r).  N is the largest multiplicity;
the ambient label range used by the presentation machinery is 1..N.

Also houses the brute-force classical automorphism oracle: a multigraph
automorphism is a multiplicity-preserving vertex permutation together with an
independent label bijection on every arc class.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import (
    EmptyEdgeList,
    IsolatedVertex,
    ParseError,
    SearchBudgetExceeded,
    UnknownEndpoint,
    UnknownVertex,
)

Edge = Tuple[int, int, int]  # (source index, target index, label >= 1)


@dataclass(frozen=True)
class Multigraph:
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]  # input order; labels canonical per arc class
    n_max: int  # N = max multiplicity
    _mult: Dict[Tuple[int, int], int] = field(hash=False, compare=False)

    @property
    def vertex_index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def index_of(self, vertex: str) -> int:
        try:
            return self.vertex_index[vertex]
        except KeyError:
            raise UnknownVertex(vertex) from None

    def multiplicity(self, i, j) -> int:
        """|E^i_j| for vertices i, j (names or indices)."""
        i = i if isinstance(i, int) else self.index_of(i)
        j = j if isinstance(j, int) else self.index_of(j)
        if not (0 <= i < len(self.vertices) and 0 <= j < len(self.vertices)):
            raise UnknownVertex((i, j))
        return self._mult.get((i, j), 0)

    def arcs(self) -> List[Tuple[int, int]]:
        """Arc classes (i, j) with E^i_j nonempty, in first-appearance order."""
        seen = []
        for (i, j, _r) in self.edges:
            if (i, j) not in seen:
                seen.append((i, j))
        return seen

    def is_uniform(self) -> bool:
        """True iff all nonzero multiplicities share one value."""
        mults = {m for m in self._mult.values() if m > 0}
        return len(mults) == 1

    def permissible_pairs(self) -> List[Tuple[int, int]]:
        """(vertex, label) pairs realized by some edge endpoint, sorted."""
        pairs = set()
        for (i, j, r) in self.edges:
            pairs.add((i, r))
            pairs.add((j, r))
        return sorted(pairs)

    def edge_label(self, edge: Edge) -> str:
        i, j, r = edge
        return f"({self.vertices[i]},{self.vertices[j]}){r}"


def build(vertices: Sequence[str], edge_pairs: Sequence[Tuple[str, str]]) -> Multigraph:
    """Build a multigraph, assigning labels per arc class in input order."""
    vertices = tuple(str(v) for v in vertices)
    if len(set(vertices)) != len(vertices):
        raise ParseError(f"duplicate vertex ids in {vertices}")
    index = {v: i for i, v in enumerate(vertices)}
    if not edge_pairs:
        raise EmptyEdgeList()
    mult: Dict[Tuple[int, int], int] = {}
    edges: List[Edge] = []
    touched = set()
    for pos, (src, dst) in enumerate(edge_pairs):
        if str(src) not in index:
            raise UnknownEndpoint(pos, src)
        if str(dst) not in index:
            raise UnknownEndpoint(pos, dst)
        i, j = index[str(src)], index[str(dst)]
        mult[(i, j)] = mult.get((i, j), 0) + 1
        edges.append((i, j, mult[(i, j)]))
        touched.add(i)
        touched.add(j)
    for v, name in enumerate(vertices):
        if v not in touched:
            raise IsolatedVertex(name)
    n_max = max(mult.values())
    return Multigraph(vertices, tuple(edges), n_max, mult)


@dataclass(frozen=True)
class UnderlyingGraph:
    """Single-edged shadow: arcs with their multiplicities as weights."""

    vertices: Tuple[str, ...]
    arcs: Tuple[Tuple[int, int], ...]
    weight: Dict[Tuple[int, int], int] = field(hash=False, compare=False)

    def adjacency(self, weighted: bool = False) -> List[List[int]]:
        n = len(self.vertices)
        mat = [[0] * n for _ in range(n)]
        for (i, j) in self.arcs:
            mat[i][j] = self.weight[(i, j)] if weighted else 1
        return mat

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return set(self.arcs) == {(i, j) for i in range(n) for j in range(n) if i != j}


def underlying(g: Multigraph) -> UnderlyingGraph:
    arcs = tuple(sorted(g.arcs()))
    weight = {a: g.multiplicity(*a) for a in arcs}
    return UnderlyingGraph(g.vertices, arcs, weight)


@dataclass(frozen=True)
class MultigraphAutomorphism:
    """Vertex permutation + per-arc label bijections.

    vertex_map[i] = image of vertex i; edge_maps[(i, j)][r] = image label of
    (i, j, r) on the arc (vertex_map[i], vertex_map[j]).
    """

    vertex_map: Tuple[int, ...]
    edge_maps: Tuple[Tuple[Tuple[int, int], Tuple[int, ...]], ...]  # arc -> label images (1-based values)

    def edge_map(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        return dict(self.edge_maps)

    def apply_edge(self, edge: Edge) -> Edge:
        i, j, r = edge
        labels = self.edge_map()[(i, j)]
        return (self.vertex_map[i], self.vertex_map[j], labels[r - 1])

    def compose(self, other: "MultigraphAutomorphism") -> "MultigraphAutomorphism":
        """self after other (first other, then self)."""
        vmap = tuple(self.vertex_map[other.vertex_map[i]] for i in range(len(self.vertex_map)))
        own = self.edge_map()
        maps = []
        for (arc, labels) in other.edge_maps:
            i, j = arc
            target_arc = (other.vertex_map[i], other.vertex_map[j])
            second = own[target_arc]
            maps.append((arc, tuple(second[s - 1] for s in labels)))
        return MultigraphAutomorphism(vmap, tuple(maps))

    def inverse(self) -> "MultigraphAutomorphism":
        n = len(self.vertex_map)
        inv_v = [0] * n
        for i, k in enumerate(self.vertex_map):
            inv_v[k] = i
        maps = []
        for (arc, labels) in self.edge_maps:
            i, j = arc
            target_arc = (self.vertex_map[i], self.vertex_map[j])
            inv_labels = [0] * len(labels)
            for r, s in enumerate(labels, start=1):
                inv_labels[s - 1] = r
            maps.append((target_arc, tuple(inv_labels)))
        return MultigraphAutomorphism(tuple(inv_v), tuple(sorted(maps)))


def _vertex_permutations(g: Multigraph) -> List[Tuple[int, ...]]:
    """All vertex permutations preserving the multiplicity matrix."""
    n = len(g.vertices)
    result = []
    for perm in itertools.permutations(range(n)):
        if all(
            g.multiplicity(perm[i], perm[j]) == g.multiplicity(i, j)
            for i in range(n)
            for j in range(n)
        ):
            result.append(perm)
    return result


def automorphism_count_bound(g: Multigraph) -> int:
    """Upper bound |V|! * prod(mult!) used by the search guard."""
    bound = math.factorial(len(g.vertices))
    for arc in g.arcs():
        bound *= math.factorial(g.multiplicity(*arc))
    return bound


def automorphisms(g: Multigraph, budget: int = 10**7) -> List[MultigraphAutomorphism]:
    """Exhaustive automorphism list, deterministic order.

    Vertex permutations respecting the multiplicity matrix are enumerated
    first; each extends by independent label bijections on every arc.
    """
    bound = automorphism_count_bound(g)
    if bound > budget:
        raise SearchBudgetExceeded(bound, budget)
    arcs = sorted(g.arcs())
    out: List[MultigraphAutomorphism] = []
    for vmap in _vertex_permutations(g):
        per_arc_choices = []
        for (i, j) in arcs:
            m = g.multiplicity(i, j)
            per_arc_choices.append(
                [tuple(p) for p in itertools.permutations(range(1, m + 1))]
            )
        for combo in itertools.product(*per_arc_choices):
            maps = tuple(zip(arcs, combo))
            out.append(MultigraphAutomorphism(vmap, maps))
    out.sort(key=lambda a: (a.vertex_map, a.edge_maps))
    return out


# ---------------------------------------------------------------------------
# parsing


def from_json(text: str) -> Multigraph:
    """Parse {"vertices": [...], "edges": [{"src":..., "dst":...}, ...]}."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from None
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ParseError("expected an object with 'vertices' and 'edges'")
    pairs = []
    for e in obj["edges"]:
        if not isinstance(e, dict) or "src" not in e or "dst" not in e:
            raise ParseError(f"bad edge entry {e!r}")
        pairs.append((str(e["src"]), str(e["dst"])))
    return build([str(v) for v in obj["vertices"]], pairs)


def from_text(text: str) -> Multigraph:
    """Parse 'src dst' lines; '#' starts a comment; vertices in appearance order."""
    pairs = []
    order: List[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'src dst', got {raw!r}")
        src, dst = parts
        for v in (src, dst):
            if v not in order:
                order.append(v)
        pairs.append((src, dst))
    if not pairs:
        raise EmptyEdgeList()
    return build(order, pairs)


def load(path: str) -> Multigraph:
    """Load a graph file, dispatching on a leading '{' to the JSON parser."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_text(text)
