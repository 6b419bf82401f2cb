"""Classical characters of a presentation: 0/1 magic-matrix solutions.

A character assigns each column pair (i, r) a row pair so that the resulting
permutation matrix satisfies every vanishing pair and, when the label-sum
relations are in force, maps each vertex's columns into a single vertex's
rows (which is exactly what those relations say for 0/1 solutions).

Enumeration is a column-by-column backtracking search with forbidden-row
propagation; every solution is re-checked afterwards by direct evaluation,
independent of the propagation logic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import MismatchFound, NotAPermutation, SearchBudgetExceeded
from .multigraph import Multigraph, MultigraphAutomorphism, automorphisms
from .ncalg import NCPolynomial, TensorPolynomial
from .presentation import EdgeMatrix, Presentation, vertex_matrix


@dataclass(frozen=True)
class Character:
    """Permutation of the pair set, stored as column pair -> row pair."""

    assignment: Tuple[int, ...]

    def image(self, col_pair: int) -> int:
        return self.assignment[col_pair]

    def evaluate_gen(self, ambient, gid: int) -> int:
        return 1 if self.assignment[ambient.col(gid)] == ambient.row(gid) else 0

    def evaluate_word(self, ambient, word: Tuple[int, ...]) -> int:
        for g in word:
            if self.assignment[ambient.col(g)] != ambient.row(g):
                return 0
        return 1

    def evaluate(self, poly: NCPolynomial) -> Fraction:
        total = Fraction(0)
        for w, c in poly.terms.items():
            if self.evaluate_word(poly.ambient, w):
                total += c
        return total

    def evaluate_tensor(self, tensor: TensorPolynomial) -> Fraction:
        total = Fraction(0)
        for (wl, wr), c in tensor.terms.items():
            if self.evaluate_word(tensor.ambient, wl) and self.evaluate_word(
                tensor.ambient, wr
            ):
                total += c
        return total


def evaluate_over_characters(poly: NCPolynomial, chars: Sequence[Character]) -> List[Fraction]:
    """Exact value of poly under every character, vectorized over characters.

    Coefficients are scaled to integers, evaluated with integer arithmetic,
    and scaled back, so the results are exact Fractions.
    """
    import numpy as np

    amb = poly.ambient
    if not chars:
        return []
    denom = 1
    for c in poly.terms.values():
        denom = denom * c.denominator // __import__("math").gcd(denom, c.denominator)
    active = np.zeros((len(chars), amb.n_gens), dtype=bool)
    cols = np.arange(amb.n_pairs)
    for idx, ch in enumerate(chars):
        rows = np.asarray(ch.assignment)
        active[idx, rows * amb.n_pairs + cols] = True
    totals = np.zeros(len(chars), dtype=np.int64)
    for w, c in poly.terms.items():
        val = np.ones(len(chars), dtype=bool)
        for g in w:
            val &= active[:, g]
        totals += int(c * denom) * val
    return [Fraction(int(t), denom) for t in totals]


def _conflict_table(p: Presentation) -> Dict[int, List[Tuple[int, int]]]:
    """gid -> [(col, row), ...] assignments forbidden while gid is active."""
    amb = p.ambient
    table: Dict[int, List[Tuple[int, int]]] = {}
    for (a, b) in p.rules.vanishing:
        table.setdefault(a, []).append((amb.col(b), amb.row(b)))
        table.setdefault(b, []).append((amb.col(a), amb.row(a)))
    return table


def enumerate_characters(p: Presentation, budget: int = 10**7) -> List[Character]:
    """All characters in lexicographic assignment order.

    Budget counts search-tree nodes; SearchBudgetExceeded carries the number
    of solutions found before the limit.
    """
    amb = p.ambient
    m = amb.n_pairs
    n = amb.n_labels
    conflicts = _conflict_table(p)
    assignment = [-1] * m
    row_used = [False] * m
    forbidden = [[0] * m for _ in range(m)]  # [col][row] veto counters
    vertex_image: List[Optional[int]] = [None] * len(amb.vertices)
    solutions: List[Character] = []
    nodes = 0

    def feasible_rows(col: int):
        if p.include_rv and n > 1:
            cv = amb.pair_vertex(col)
            img = vertex_image[cv]
            if img is not None:
                base = img * n
                return range(base, base + n)
        return range(m)

    def place(col: int, row: int) -> List[Tuple[int, int]]:
        assignment[col] = row
        row_used[row] = True
        touched = []
        for (c2, r2) in conflicts.get(amb.gen(row, col), ()):
            forbidden[c2][r2] += 1
            touched.append((c2, r2))
        return touched

    def unplace(col: int, row: int, touched) -> None:
        assignment[col] = -1
        row_used[row] = False
        for (c2, r2) in touched:
            forbidden[c2][r2] -= 1

    def search(col: int) -> None:
        nonlocal nodes
        if col == m:
            solutions.append(Character(tuple(assignment)))
            return
        cv = amb.pair_vertex(col)
        for row in feasible_rows(col):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(nodes, budget, partial=len(solutions))
            if row_used[row] or forbidden[col][row]:
                continue
            rv_patch = False
            if p.include_rv and n > 1 and vertex_image[cv] is None:
                vertex_image[cv] = amb.pair_vertex(row)
                rv_patch = True
            touched = place(col, row)
            # a self-conflicting generator vetoes its own slot once active
            if forbidden[col][row] == 0:
                search(col + 1)
            unplace(col, row, touched)
            if rv_patch:
                vertex_image[cv] = None

    search(0)
    for c in solutions:
        check_character(p, c)
    return solutions


def check_character(p: Presentation, c: Character) -> None:
    """Direct re-evaluation of every relation; raises on any violation."""
    amb = p.ambient
    m = amb.n_pairs
    if sorted(c.assignment) != list(range(m)):
        raise NotAPermutation(f"assignment {c.assignment} is not a bijection")
    active = {amb.gen(c.assignment[col], col) for col in range(m)}
    for g in active:
        for h in active:
            if p.rules.vanishes(g, h):
                raise NotAPermutation(f"character activates vanishing pair {(g, h)}")
    if p.include_rv and amb.n_labels > 1:
        for rv_vertex, cv, row_pairs in p.rules.rv_groups():
            counts = []
            for rp in row_pairs:
                counts.append(
                    sum(
                        1
                        for g in p.rules.group_members(rp, cv)
                        if g in active
                    )
                )
            if len(set(counts)) != 1:
                raise NotAPermutation(
                    f"label-sum relation fails at row vertex {rv_vertex}, column vertex {cv}"
                )


def edge_action_of(c: Character, em: EdgeMatrix) -> Tuple[int, ...]:
    """tau -> sigma with u^sigma_tau = 1; must be a permutation of the edges."""
    amb = em.presentation.ambient
    n_edges = len(em.edges)
    action = []
    for ti in range(n_edges):
        hits = [
            si
            for si in range(n_edges)
            if c.evaluate(em.entries[(si, ti)]) == 1
        ]
        if len(hits) != 1:
            raise NotAPermutation(f"edge column {ti} has {len(hits)} images")
        action.append(hits[0])
    if sorted(action) != list(range(n_edges)):
        raise NotAPermutation("edge action is not a bijection")
    return tuple(action)


def vertex_action_of(c: Character, p: Presentation) -> Tuple[int, ...]:
    """i -> k with Q^k_i = 1; a permutation of the vertices for every character."""
    vm = vertex_matrix(p)
    nv = len(p.graph.vertices)
    action = []
    for i in range(nv):
        hits = [k for k in range(nv) if c.evaluate(vm.entries[(k, i)]) == 1]
        if len(hits) != 1:
            raise NotAPermutation(f"vertex {i} has {len(hits)} images")
        action.append(hits[0])
    if sorted(action) != list(range(nv)):
        raise NotAPermutation("vertex action is not a bijection")
    return tuple(action)


# ---------------------------------------------------------------------------
# faithfulness and the comparison with classical automorphisms


@dataclass
class FaithfulnessReport:
    subalgebra: str  # "full" or "permissible"
    character_count: int
    distinct_action_count: int
    kernel_pair_count: int
    kernel_pair_sample: List[Tuple[int, int]]  # indices into the character list

    @property
    def faithful(self) -> bool:
        return self.kernel_pair_count == 0


def _permissible_projection(p: Presentation, g: Multigraph, c: Character) -> Tuple:
    amb = p.ambient
    perm = sorted(amb.pair(v, r) for (v, r) in g.permissible_pairs())
    return tuple((col, c.assignment[col]) for col in perm)


def restrict_to_permissible(
    p: Presentation, g: Multigraph, chars: Sequence[Character]
) -> List[Character]:
    """One representative per distinct permissible-block restriction."""
    seen = {}
    for c in chars:
        key = _permissible_projection(p, g, c)
        if key not in seen:
            seen[key] = c
    return [seen[k] for k in sorted(seen)]


def faithfulness_report(
    p: Presentation,
    g: Multigraph,
    subalgebra: str = "full",
    budget: int = 10**7,
    chars: Optional[Sequence[Character]] = None,
    sample_limit: int = 5,
) -> FaithfulnessReport:
    if chars is None:
        chars = enumerate_characters(p, budget)
    if subalgebra == "permissible":
        chars = restrict_to_permissible(p, g, chars)
    em = edge_matrix_cache(p, g)
    actions = []
    for c in chars:
        actions.append((vertex_action_of(c, p), edge_action_of(c, em)))
    groups: Dict[Tuple, List[int]] = {}
    for idx, act in enumerate(actions):
        groups.setdefault(act, []).append(idx)
    kernel_count = 0
    sample: List[Tuple[int, int]] = []
    for act in sorted(groups):
        members = groups[act]
        k = len(members)
        kernel_count += k * (k - 1) // 2
        if k > 1 and len(sample) < sample_limit:
            for a in range(k):
                for b in range(a + 1, k):
                    if len(sample) >= sample_limit:
                        break
                    sample.append((members[a], members[b]))
    return FaithfulnessReport(
        subalgebra, len(chars), len(groups), kernel_count, sample
    )


_EDGE_MATRIX_CACHE: Dict[Tuple, EdgeMatrix] = {}


def edge_matrix_cache(p: Presentation, g: Multigraph) -> EdgeMatrix:
    from .presentation import edge_matrix

    key = (g.vertices, g.edges, p.kind)
    if key not in _EDGE_MATRIX_CACHE:
        _EDGE_MATRIX_CACHE[key] = edge_matrix(p, g)
    return _EDGE_MATRIX_CACHE[key]


@dataclass
class ComparisonReport:
    automorphism_count: int
    character_count: int
    matched: int
    bijection: bool


def character_to_automorphism(
    p: Presentation, g: Multigraph, c: Character
) -> MultigraphAutomorphism:
    """Vertex action plus per-arc label bijections read off the edge action."""
    em = edge_matrix_cache(p, g)
    vmap = vertex_action_of(c, p)
    action = edge_action_of(c, em)
    arcs = sorted(g.arcs())
    maps = []
    for (i, j) in arcs:
        mult = g.multiplicity(i, j)
        labels = [0] * mult
        for r in range(1, mult + 1):
            ti = em.edges.index((i, j, r))
            (k, l, s) = em.edges[action[ti]]
            if (k, l) != (vmap[i], vmap[j]):
                raise NotAPermutation(
                    f"edge action moves arc {(i, j)} off the vertex image"
                )
            labels[r - 1] = s
        maps.append(((i, j), tuple(labels)))
    return MultigraphAutomorphism(vmap, tuple(maps))


def compare_with_automorphisms(
    p: Presentation,
    g: Multigraph,
    budget: int = 10**7,
    chars: Optional[Sequence[Character]] = None,
) -> ComparisonReport:
    """Match permissible-block characters with the brute-force oracle, 1:1."""
    if chars is None:
        chars = enumerate_characters(p, budget)
    reps = restrict_to_permissible(p, g, chars)
    autos = automorphisms(g, budget)
    auto_keys = {(a.vertex_map, tuple(sorted(a.edge_maps))) for a in autos}
    char_key_list = []
    for c in reps:
        a = character_to_automorphism(p, g, c)
        char_key_list.append((a.vertex_map, tuple(sorted(a.edge_maps))))
    char_keys = set(char_key_list)
    matched = len(auto_keys & char_keys)
    if (
        matched != len(auto_keys)
        or matched != len(char_keys)
        or len(char_keys) != len(char_key_list)
    ):
        raise MismatchFound(
            sorted(char_keys - auto_keys), sorted(auto_keys - char_keys)
        )
    return ComparisonReport(len(autos), len(reps), matched, True)
