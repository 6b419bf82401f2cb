"""Free *-algebra over generator symbols with rational coefficients.

Generators are entries of a big square matrix indexed by (vertex, label)
pairs; they are self-adjoint idempotents by construction, so words carry no
star decoration and the adjoint of a word is its reversal.  A RuleSet holds
the monomial rewrite data (orthogonality pairs) plus the index families whose
full sums equal one; those sum relations never act as left-to-right rewrites,
only through the proof moves below.

prove_zero runs an iterative-deepening search over four move families:

  M1  reduce            g.g -> g, g.h -> 0 for vanishing pairs
  M2  unit insertion    w -> sum_x w1.m_x.w2 over a complete row/column family
  M3  sum collapse      sum_x c.w1.m_x.w2 -> c.w1.w2, allowing members that
                        are missing because they already rewrite to zero
  M4  linear relations  substitution inside complete label groups (the
                        row-sum relations that make vertex sums label-free)

Every Proved outcome carries a trace; replay_trace re-runs it step by step
and must end in the zero polynomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import MixedAmbient, ParseError

Word = Tuple[int, ...]  # generator ids; () is the unit
Pair = int  # flattened (vertex, label)


class Ambient:
    """Index space of the generator matrix: pairs (vertex, label) squared."""

    def __init__(self, vertices: Sequence[str], n_labels: int, unary: bool = False):
        self.vertices = tuple(vertices)
        self.n_labels = int(n_labels)
        self.n_pairs = len(self.vertices) * self.n_labels  # M
        self.n_gens = self.n_pairs * self.n_pairs
        self.unary = unary  # print u[k|i] instead of q[k,s|i,r]
        m = self.n_pairs
        self._row_fams = tuple(
            tuple(r * m + c for c in range(m)) for r in range(m)
        )
        self._col_fams = tuple(
            tuple(r * m + c for r in range(m)) for c in range(m)
        )

    # pair <-> (vertex index, label)
    def pair(self, v: int, label: int) -> Pair:
        return v * self.n_labels + (label - 1)

    def pair_vertex(self, p: Pair) -> int:
        return p // self.n_labels

    def pair_label(self, p: Pair) -> int:
        return p % self.n_labels + 1

    # generator id <-> (row pair, column pair)
    def gen(self, row: Pair, col: Pair) -> int:
        return row * self.n_pairs + col

    def row(self, g: int) -> Pair:
        return g // self.n_pairs

    def col(self, g: int) -> Pair:
        return g % self.n_pairs

    def row_family(self, row: Pair) -> Tuple[int, ...]:
        return self._row_fams[row]

    def col_family(self, col: Pair) -> Tuple[int, ...]:
        return self._col_fams[col]

    def pair_name(self, p: Pair) -> str:
        return f"{self.vertices[self.pair_vertex(p)]},{self.pair_label(p)}"

    def gen_name(self, g: int) -> str:
        if self.unary:
            return (
                f"u[{self.vertices[self.pair_vertex(self.row(g))]}"
                f"|{self.vertices[self.pair_vertex(self.col(g))]}]"
            )
        return f"q[{self.pair_name(self.row(g))}|{self.pair_name(self.col(g))}]"

    def __eq__(self, other):
        return (
            isinstance(other, Ambient)
            and self.vertices == other.vertices
            and self.n_labels == other.n_labels
        )

    def __hash__(self):
        return hash((self.vertices, self.n_labels))


class RuleSet:
    """Vanishing pairs plus the unit-sum and label-sum relation data."""

    def __init__(
        self,
        ambient: Ambient,
        vanishing: Iterable[Tuple[int, int]],
        rv: bool = False,
    ):
        self.ambient = ambient
        self.vanishing: FrozenSet[Tuple[int, int]] = frozenset(vanishing)
        self.rv = rv
        m = ambient.n_pairs
        self._packed = frozenset(g * ambient.n_gens + h for g, h in self.vanishing)
        # columns reachable by orthogonality that is not plain magic: these
        # drive the insertion candidates of the proof search
        right: Dict[int, set] = {}
        left: Dict[int, set] = {}
        for g, h in self.vanishing:
            if ambient.row(g) == ambient.row(h) or ambient.col(g) == ambient.col(h):
                continue
            right.setdefault(g, set()).add(ambient.col(h))
            left.setdefault(h, set()).add(ambient.col(g))
        self._right_cols = {g: tuple(sorted(s)) for g, s in right.items()}
        self._left_cols = {g: tuple(sorted(s)) for g, s in left.items()}
        self._m = m
        # word -> reduced word (or None); results are canonical, so sharing
        # the cache across threads only ever repeats identical work
        self._reduce_cache: Dict[Word, Optional[Word]] = {}

    def vanishes(self, g: int, h: int) -> bool:
        return g * self.ambient.n_gens + h in self._packed

    def right_linked_cols(self, g: int) -> Tuple[Pair, ...]:
        return self._right_cols.get(g, ())

    def left_linked_cols(self, g: int) -> Tuple[Pair, ...]:
        return self._left_cols.get(g, ())

    def rv_groups(self):
        """Label groups for the linear relations: (row vertex, column vertex).

        The group for (row pair rp, column vertex cv) is the tuple of
        generators q^{rp}_{(cv, r)}, r = 1..N; the relation states that its
        sum does not depend on the label of rp.
        """
        amb = self.ambient
        if not self.rv or amb.n_labels == 1:
            return
        nv = len(amb.vertices)
        for rv_vertex in range(nv):
            for cv in range(nv):
                rows = [amb.pair(rv_vertex, s) for s in range(1, amb.n_labels + 1)]
                yield rv_vertex, cv, rows

    def group_members(self, row_pair: Pair, col_vertex: int) -> Tuple[int, ...]:
        amb = self.ambient
        return tuple(
            amb.gen(row_pair, amb.pair(col_vertex, r))
            for r in range(1, amb.n_labels + 1)
        )


# ---------------------------------------------------------------------------
# polynomials


def _merge(terms: Dict[Word, Fraction], w: Word, c: Fraction) -> None:
    acc = terms.get(w)
    if acc is None:
        if c:
            terms[w] = c
    else:
        acc = acc + c
        if acc:
            terms[w] = acc
        else:
            del terms[w]


class NCPolynomial:
    """Formal rational combination of words, kept in canonical order."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms: Optional[Dict[Word, Fraction]] = None):
        self.ambient = ambient
        self.terms: Dict[Word, Fraction] = {}
        if terms:
            for w, c in terms.items():
                _merge(self.terms, tuple(w), Fraction(c))

    @classmethod
    def _raw(cls, ambient: Ambient, terms: Dict[Word, Fraction]) -> "NCPolynomial":
        """Trusted constructor: terms already merged, zero-free, Fraction-valued."""
        out = cls.__new__(cls)
        out.ambient = ambient
        out.terms = terms
        return out

    @staticmethod
    def zero(ambient: Ambient) -> "NCPolynomial":
        return NCPolynomial(ambient)

    @staticmethod
    def unit(ambient: Ambient, coeff=1) -> "NCPolynomial":
        return NCPolynomial(ambient, {(): Fraction(coeff)})

    @staticmethod
    def generator(ambient: Ambient, g: int) -> "NCPolynomial":
        return NCPolynomial(ambient, {(g,): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> List[Tuple[Word, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def key(self) -> Tuple:
        return tuple(self.items())

    def _check(self, other: "NCPolynomial") -> None:
        if self.ambient != other.ambient:
            raise MixedAmbient()

    def __add__(self, other: "NCPolynomial") -> "NCPolynomial":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _merge(out, w, c)
        return NCPolynomial._raw(self.ambient, out)

    def __sub__(self, other: "NCPolynomial") -> "NCPolynomial":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _merge(out, w, -c)
        return NCPolynomial._raw(self.ambient, out)

    def __neg__(self) -> "NCPolynomial":
        return NCPolynomial._raw(self.ambient, {w: -c for w, c in self.terms.items()})

    def scale(self, k) -> "NCPolynomial":
        k = Fraction(k)
        if not k:
            return NCPolynomial.zero(self.ambient)
        return NCPolynomial._raw(self.ambient, {w: c * k for w, c in self.terms.items()})

    def __mul__(self, other: "NCPolynomial") -> "NCPolynomial":
        self._check(other)
        out: Dict[Word, Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                _merge(out, w1 + w2, c1 * c2)
        return NCPolynomial._raw(self.ambient, out)

    def adjoint(self) -> "NCPolynomial":
        # generators are self-adjoint, coefficients rational: reverse words
        return NCPolynomial._raw(
            self.ambient, {tuple(reversed(w)): c for w, c in self.terms.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NCPolynomial)
            and self.ambient == other.ambient
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ambient, self.key()))

    def __repr__(self):
        return f"NCPolynomial({to_text(self)})"


def to_text(p: NCPolynomial) -> str:
    """Serialize: rational coefficient then '*'-joined factors, ' + '-joined."""
    if p.is_zero():
        return "0"
    chunks = []
    for w, c in p.items():
        factors = "*".join(p.ambient.gen_name(g) for g in w)
        chunks.append(str(c) if not factors else f"{c} {factors}")
    return " + ".join(chunks)


_GEN_RE = re.compile(r"q\[([^,\]]+),(\d+)\|([^,\]]+),(\d+)\]")


def from_text(text: str, ambient: Ambient) -> NCPolynomial:
    """Parse the to_text grammar back into a polynomial."""
    text = text.strip()
    if text == "0":
        return NCPolynomial.zero(ambient)
    vindex = {v: i for i, v in enumerate(ambient.vertices)}
    terms: Dict[Word, Fraction] = {}
    for chunk in text.split(" + "):
        chunk = chunk.strip()
        if not chunk:
            raise ParseError("empty term")
        parts = chunk.split(None, 1)
        try:
            coeff = Fraction(parts[0])
        except ValueError:
            raise ParseError(f"bad coefficient in {chunk!r}") from None
        word: List[int] = []
        if len(parts) == 2:
            for factor in parts[1].split("*"):
                m = _GEN_RE.fullmatch(factor.strip())
                if not m:
                    raise ParseError(f"bad factor {factor!r}")
                kv, ks, iv, ir = m.groups()
                if kv not in vindex or iv not in vindex:
                    raise ParseError(f"unknown vertex in {factor!r}")
                row = ambient.pair(vindex[kv], int(ks))
                col = ambient.pair(vindex[iv], int(ir))
                word.append(ambient.gen(row, col))
        _merge(terms, tuple(word), coeff)
    return NCPolynomial(ambient, terms)


# ---------------------------------------------------------------------------
# rewriting


def reduce_word(w: Word, rules: RuleSet) -> Optional[Word]:
    """Fixpoint of leftmost-innermost idempotency/orthogonality; None if zero.

    A generator whose self-pair vanishes dies too (g = g.g = 0).
    """
    cached = rules._reduce_cache.get(w, False)
    if cached is not False:
        return cached
    key = w
    w = list(w)
    i = 0
    while i < len(w):
        g = w[i]
        if rules.vanishes(g, g):
            rules._reduce_cache[key] = None
            return None
        if i + 1 < len(w):
            h = w[i + 1]
            if g == h:
                del w[i + 1]
                i = 0
                continue
            if rules.vanishes(g, h):
                rules._reduce_cache[key] = None
                return None
        i += 1
    out = tuple(w)
    rules._reduce_cache[key] = out
    return out


def reduce(p: NCPolynomial, rules: RuleSet) -> NCPolynomial:
    """Reduce every term and merge; deterministic and terminating."""
    out: Dict[Word, Fraction] = {}
    for w, c in p.terms.items():
        rw = reduce_word(w, rules)
        if rw is not None:
            _merge(out, rw, c)
    return NCPolynomial._raw(p.ambient, out)


def multiply(p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
    return p * q


def adjoint(p: NCPolynomial) -> NCPolynomial:
    return p.adjoint()


# ---------------------------------------------------------------------------
# proof search

PROVED = "proved"
UNDECIDED = "undecided"


@dataclass
class ProofOutcome:
    status: str
    trace: List[Tuple] = field(default_factory=list)
    depth_used: int = 0
    residual: Optional[NCPolynomial] = None

    @property
    def proved(self) -> bool:
        return self.status == PROVED


class _Budget:
    __slots__ = ("nodes", "exhausted")

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.exhausted = False

    def spend(self) -> bool:
        if self.nodes <= 0:
            self.exhausted = True
            return False
        self.nodes -= 1
        return True

    def charge(self, amount: int) -> bool:
        if self.nodes <= 0:
            self.exhausted = True
            return False
        self.nodes -= amount
        return True


def _expand_word(w: Word, pos: int, family: Sequence[int], rules: RuleSet) -> List[Word]:
    """Insert each family member at pos, reduce, collect distinct survivors."""
    out: List[Word] = []
    seen = set()
    for m in family:
        nw = reduce_word(w[:pos] + (m,) + w[pos:], rules)
        if nw is not None and nw not in seen:
            seen.add(nw)
            out.append(nw)
    return out


MAX_WORD_LEN = 12  # insertion search stops growing words beyond this
MAX_SURVIVORS = 5  # insertions leaving more branches than this are junk


def _insertion_candidates(w: Word, rules: RuleSet) -> List[Tuple[int, Pair]]:
    """(position, column-family pair) choices, canonical order.

    Only columns linked to a neighbouring factor through non-magic vanishing
    pairs are useful: anything else inserts mostly-surviving junk.
    """
    cands: List[Tuple[int, Pair]] = []
    for pos in range(len(w) + 1):
        cols = set()
        if pos > 0:
            cols.update(rules.right_linked_cols(w[pos - 1]))
        if pos < len(w):
            cols.update(rules.left_linked_cols(w[pos]))
        for cp in sorted(cols):
            cands.append((pos, cp))
    return cands


class ProofEngine:
    """Bounded prover for one rule set.

    Word-annihilation results are cached at their minimal insertion depth, so
    the tree returned for a word never depends on the order or budgets of
    earlier queries; a frozen base cache from `warm` can be shared across
    engines (and threads) read-only.
    """

    def __init__(self, rules: RuleSet, node_budget: int = 200_000, base_ok=None):
        self.rules = rules
        self.node_budget = node_budget
        self._base_ok: Dict[Word, Tuple[int, Tuple]] = base_ok or {}
        # word -> (min depth, tree) for successes; word -> max failed budget
        self._kill_ok: Dict[Word, Tuple[int, Tuple]] = {}
        self._kill_fail: Dict[Word, int] = {}

    def warm(self, depth: int = 2) -> Dict[Word, Tuple[int, Tuple]]:
        """Precompute single-generator annihilations; returns a shareable cache."""
        nodes = _Budget(self.node_budget)
        for g in range(self.rules.ambient.n_gens):
            w = reduce_word((g,), self.rules)
            if w is not None:
                self.kill_word(w, depth, nodes)
        merged = dict(self._base_ok)
        merged.update(self._kill_ok)
        return merged

    # -- word annihilation -------------------------------------------------

    def _lookup_ok(self, w: Word):
        hit = self._kill_ok.get(w)
        if hit is None:
            hit = self._base_ok.get(w)
        return hit

    def kill_word(self, w: Word, budget: int, nodes: _Budget) -> Optional[Tuple]:
        """Annihilation tree for w within `budget` nested insertions, or None.

        Tree shape: (pos, column-pair, ((survivor word, subtree), ...)).
        Iterative deepening keeps the returned tree at minimal depth.
        """
        hit = self._lookup_ok(w)
        if hit is not None and hit[0] <= budget:
            return hit[1]
        floor = self._kill_fail.get(w, 0)
        if floor >= budget:
            return None
        for d in range(floor + 1, budget + 1):
            tree = self._kill_exact(w, d, nodes)
            if tree is not None:
                self._kill_ok[w] = (d, tree)
                return tree
            if nodes.exhausted:
                return None  # unreliable, do not cache the failure
            self._kill_fail[w] = d
        return None

    def _kill_exact(self, w: Word, budget: int, nodes: _Budget) -> Optional[Tuple]:
        if budget <= 0 or len(w) >= MAX_WORD_LEN or not nodes.spend():
            return None
        for pos, cp in _insertion_candidates(w, self.rules):
            family = self.rules.ambient.col_family(cp)
            survivors = _expand_word(w, pos, family, self.rules)
            if survivors == [w] or len(survivors) > MAX_SURVIVORS:
                continue  # pure absorption or junk-producing insertion
            subtrees = []
            ok = True
            for s in survivors:
                t = self.kill_word(s, budget - 1, nodes)
                if t is None:
                    ok = False
                    break
                subtrees.append((s, t))
            if ok:
                return (pos, cp, tuple(subtrees))
        return None

    def kill_depth(self, w: Word) -> int:
        return self._lookup_ok(w)[0]

    # -- deterministic simplification (M1 + complete M3) --------------------

    def _collapse_groups(self, p: NCPolynomial):
        """Complete row/column family groups; missing members must reduce to 0.

        Yields (axis, family pair/row, context, coeff, present words, missing)
        in canonical order.
        """
        amb = self.rules.ambient
        groups: Dict[Tuple, Dict[int, Fraction]] = {}
        for w, c in p.terms.items():
            for pos in range(len(w)):
                ctx = (w[:pos], w[pos + 1:])
                g = w[pos]
                groups.setdefault(("col", amb.col(g), ctx), {})[g] = c
                groups.setdefault(("row", amb.row(g), ctx), {})[g] = c
        for key in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
            axis, fam_pair, ctx = key
            present = groups[key]
            coeff = None
            uniform = True
            for c in present.values():
                if coeff is None:
                    coeff = c
                elif c != coeff:
                    uniform = False
                    break
            if not uniform:
                continue
            family = (
                amb.col_family(fam_pair) if axis == "col" else amb.row_family(fam_pair)
            )
            missing = [m for m in family if m not in present]
            dead = []
            viable = True
            for m in missing:
                if reduce_word(ctx[0] + (m,) + ctx[1], self.rules) is None:
                    dead.append(m)
                else:
                    viable = False
                    break
            if viable:
                yield axis, fam_pair, ctx, coeff, sorted(present), tuple(dead)

    def simplify(self, p: NCPolynomial, steps: Optional[List] = None) -> NCPolynomial:
        """reduce + collapse of (zero-completed) complete families, to fixpoint."""
        p = reduce(p, self.rules)
        changed = True
        while changed:
            changed = False
            for axis, fam_pair, ctx, coeff, present, dead in self._collapse_groups(p):
                out = dict(p.terms)
                for g in present:
                    del out[ctx[0] + (g,) + ctx[1]]
                _merge(out, ctx[0] + ctx[1], coeff)
                p = reduce(NCPolynomial._raw(p.ambient, out), self.rules)
                if steps is not None:
                    steps.append(("collapse", axis, fam_pair, ctx, coeff, tuple(present), dead))
                changed = True
                break
        return p

    # -- linear-relation moves (M4) -----------------------------------------

    def _rv_moves(self, p: NCPolynomial):
        """Complete label-group substitutions available on p, canonical order.

        A group is all N terms c.w1 q^{rp}_{(cv,r)} w2, r = 1..N (members that
        reduce to zero may be absent).  Moves: relabel the row to another
        label (swap) or average over all labels.
        """
        amb = self.rules.ambient
        if not self.rules.rv or amb.n_labels == 1:
            return
        n = amb.n_labels
        found: Dict[Tuple, Fraction] = {}
        for w, c in p.terms.items():
            for pos in range(len(w)):
                g = w[pos]
                rp, cp = amb.row(g), amb.col(g)
                key = (rp, amb.pair_vertex(cp), (w[:pos], w[pos + 1:]))
                # complete group: every column label present (or dead)
                if key in found:
                    continue
                members = [
                    amb.gen(rp, amb.pair(amb.pair_vertex(cp), r))
                    for r in range(1, n + 1)
                ]
                ok = True
                for m in members:
                    mw = key[2][0] + (m,) + key[2][1]
                    if mw in p.terms:
                        if p.terms[mw] != c:
                            ok = False
                            break
                    elif reduce_word(mw, self.rules) is not None:
                        ok = False
                        break
                if ok:
                    found[key] = c
        for (rp, cv, ctx), coeff in sorted(found.items()):
            rv_vertex = amb.pair_vertex(rp)
            for s_to in range(1, n + 1):
                to_pair = amb.pair(rv_vertex, s_to)
                if to_pair != rp:
                    yield ("rv_swap", rp, to_pair, cv, ctx, coeff)
            yield ("rv_average", rp, cv, ctx, coeff)

    def _apply_rv(self, p: NCPolynomial, move: Tuple) -> NCPolynomial:
        amb = self.rules.ambient
        kind = move[0]
        out = dict(p.terms)
        n = amb.n_labels
        if kind == "rv_swap":
            _, rp, to_pair, cv, ctx, coeff = move
            for m in self.rules.group_members(rp, cv):
                _merge(out, ctx[0] + (m,) + ctx[1], -coeff)
            for m in self.rules.group_members(to_pair, cv):
                _merge(out, ctx[0] + (m,) + ctx[1], coeff)
        else:
            _, rp, cv, ctx, coeff = move
            rv_vertex = amb.pair_vertex(rp)
            for m in self.rules.group_members(rp, cv):
                _merge(out, ctx[0] + (m,) + ctx[1], -coeff)
            share = coeff / n
            for s in range(1, n + 1):
                for m in self.rules.group_members(amb.pair(rv_vertex, s), cv):
                    _merge(out, ctx[0] + (m,) + ctx[1], share)
        return reduce(NCPolynomial._raw(p.ambient, out), self.rules)

    def _slice_absent(self, p: NCPolynomial, rp: Pair, cv: int, ctx) -> bool:
        for m in self.rules.group_members(rp, cv):
            if ctx[0] + (m,) + ctx[1] in p.terms:
                return False
        return True

    def _symmetrize(self, p: NCPolynomial) -> Tuple[NCPolynomial, List[Tuple]]:
        """Average label groups whose other label slices are empty: one move.

        The single-slice condition makes each group averageable at most once,
        so the pass terminates after at most one application per group.
        """
        amb = self.rules.ambient
        steps: List[Tuple] = []
        for _ in range(4 * amb.n_gens):
            applied = False
            for move in self._rv_moves(p):
                if move[0] != "rv_average":
                    continue
                _, rp, cv, ctx, _coeff = move
                kv = amb.pair_vertex(rp)
                if not all(
                    self._slice_absent(p, amb.pair(kv, s), cv, ctx)
                    for s in range(1, amb.n_labels + 1)
                    if amb.pair(kv, s) != rp
                ):
                    continue
                p2 = self._apply_rv(p, move)
                if p2.key() != p.key():
                    steps.append(move)
                    p = p2
                    applied = True
                    break
            if not applied:
                break
        return p, steps

    # -- completion moves (M3 with sub-proofs) --------------------------------

    def _completion_moves(self, p: NCPolynomial, budget: int, nodes: _Budget):
        """Groups collapsible after proving the missing members zero."""
        amb = self.rules.ambient
        groups: Dict[Tuple, Dict[int, Fraction]] = {}
        for w, c in p.terms.items():
            for pos in range(len(w)):
                ctx = (w[:pos], w[pos + 1:])
                g = w[pos]
                groups.setdefault(("col", amb.col(g), ctx), {})[g] = c
                groups.setdefault(("row", amb.row(g), ctx), {})[g] = c
        for key in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
            axis, fam_pair, ctx = key
            present = groups[key]
            coeff = None
            uniform = True
            for c in present.values():
                if coeff is None:
                    coeff = c
                elif c != coeff:
                    uniform = False
                    break
            if not uniform:
                continue
            family = (
                amb.col_family(fam_pair) if axis == "col" else amb.row_family(fam_pair)
            )
            missing = [m for m in family if m not in present]
            if not missing:
                continue
            kills = []
            ok = True
            for m in missing:
                mw = reduce_word(ctx[0] + (m,) + ctx[1], self.rules)
                if mw is None:
                    kills.append((m, None))
                    continue
                tree = self.kill_word(mw, budget - 1, nodes)
                if tree is None:
                    ok = False
                    break
                kills.append((m, (mw, tree)))
            if ok and any(k[1] is not None for k in kills):
                yield axis, fam_pair, ctx, coeff, sorted(present), tuple(kills)

    # -- global insertions (M2) ----------------------------------------------

    def _global_moves(self, p: NCPolynomial):
        """(side, column pair) insertions absorbed or linked by every term."""
        amb = self.rules.ambient
        for side in ("right", "left"):
            cols = set()
            for w in p.terms:
                if not w:
                    continue
                g = w[-1] if side == "right" else w[0]
                linked = (
                    self.rules.right_linked_cols(g)
                    if side == "right"
                    else self.rules.left_linked_cols(g)
                )
                cols.update(linked)
            for cp in sorted(cols):
                usable = True
                for w in p.terms:
                    if not w:
                        continue
                    g = w[-1] if side == "right" else w[0]
                    linked = (
                        self.rules.right_linked_cols(g)
                        if side == "right"
                        else self.rules.left_linked_cols(g)
                    )
                    if amb.col(g) != cp and cp not in linked:
                        usable = False
                        break
                if usable:
                    yield side, cp

    def _apply_global(self, p: NCPolynomial, side: str, cp: Pair) -> NCPolynomial:
        amb = self.rules.ambient
        out: Dict[Word, Fraction] = {}
        for w, c in p.terms.items():
            for m in amb.col_family(cp):
                nw = (w + (m,)) if side == "right" else ((m,) + w)
                rw = reduce_word(nw, self.rules)
                if rw is not None:
                    _merge(out, rw, c)
        return NCPolynomial._raw(p.ambient, out)

    # -- top-level search ------------------------------------------------------

    def prove_zero(self, p: NCPolynomial, max_insertions: int = 3) -> ProofOutcome:
        if p.ambient != self.rules.ambient:
            raise MixedAmbient()
        base = self.simplify(p)
        seen: Dict[Tuple, int] = {}
        for depth in range(max_insertions + 1):
            nodes = _Budget(self.node_budget)
            trace: List[Tuple] = []
            if self._search(p, depth, nodes, seen, trace, rv_left=2):
                return ProofOutcome(PROVED, trace, depth_used=depth)
        return ProofOutcome(UNDECIDED, [], max_insertions, residual=base)

    def _search(
        self,
        p: NCPolynomial,
        budget: int,
        nodes: _Budget,
        seen: Dict[Tuple, int],
        trace: List[Tuple],
        rv_left: int,
    ) -> bool:
        steps: List[Tuple] = []
        p = self.simplify(p, steps)
        trace.extend(steps)
        if p.is_zero():
            return True
        key = p.key()
        if seen.get(key, -1) >= budget or not nodes.charge(1 + len(p.terms) // 4):
            return False
        seen[key] = budget

        # M2 per term: annihilate every word independently
        if budget > 0:
            kills = []
            ok = True
            for w, c in p.items():
                tree = self.kill_word(w, budget, nodes)
                if tree is None:
                    ok = False
                    break
                kills.append(("kill", w, tree))
            if ok:
                trace.extend(kills)
                return True

        # M3 with sub-proved completions
        if budget > 0 and not nodes.exhausted:
            for axis, fam_pair, ctx, coeff, present, kills in self._completion_moves(
                p, budget, nodes
            ):
                out = dict(p.terms)
                for g in present:
                    del out[ctx[0] + (g,) + ctx[1]]
                _merge(out, ctx[0] + ctx[1], coeff)
                p2 = reduce(NCPolynomial._raw(p.ambient, out), self.rules)
                mark = len(trace)
                trace.append(
                    ("complete_collapse", axis, fam_pair, ctx, coeff, tuple(present), kills)
                )
                if self._search(p2, budget - 1, nodes, seen, trace, rv_left):
                    return True
                del trace[mark:]
                if nodes.exhausted:
                    break

        # M4 linear substitutions: full symmetrization first, then single swaps
        if rv_left > 0 and not nodes.exhausted and len(p.terms) <= 120:
            p2, steps2 = self._symmetrize(p)
            if steps2:
                mark = len(trace)
                trace.extend(steps2)
                if self._search(p2, budget, nodes, seen, trace, rv_left - 1):
                    return True
                del trace[mark:]
            swaps_tried = 0
            for move in self._rv_moves(p):
                if move[0] != "rv_swap":
                    continue
                if nodes.exhausted or swaps_tried >= 4:
                    break
                swaps_tried += 1
                p2 = self._apply_rv(p, move)
                if p2.key() == key:
                    continue
                mark = len(trace)
                trace.append(move)
                if self._search(p2, budget, nodes, seen, trace, rv_left - 1):
                    return True
                del trace[mark:]

        # M2 global: multiply an expanded unit onto every term at once
        if budget > 0 and not nodes.exhausted:
            for side, cp in self._global_moves(p):
                if nodes.exhausted:
                    break
                p2 = self._apply_global(p, side, cp)
                if p2.key() == key:
                    continue
                mark = len(trace)
                trace.append(("global_insert", side, cp))
                if self._search(p2, budget - 1, nodes, seen, trace, rv_left):
                    return True
                del trace[mark:]

        return False

    def prove_equal(
        self, p: NCPolynomial, q: NCPolynomial, max_insertions: int = 3
    ) -> ProofOutcome:
        return self.prove_zero(p - q, max_insertions)


# ---------------------------------------------------------------------------
# replay


def _replay_kill(terms: Dict[Word, Fraction], w: Word, tree: Tuple, rules: RuleSet) -> None:
    """Expand w per its annihilation tree; every branch must die."""
    coeff = terms.pop(w, None)
    if coeff is None:
        raise AssertionError(f"kill step: word {w} not present")
    stack = [(w, tree, coeff)]
    while stack:
        word, (pos, cp, subtrees), c = stack.pop()
        survivors = {s: t for s, t in subtrees}
        for m in rules.ambient.col_family(cp):
            rw = reduce_word(word[:pos] + (m,) + word[pos:], rules)
            if rw is None:
                continue
            if rw not in survivors:
                raise AssertionError("kill tree misses a surviving branch")
            stack.append((rw, survivors[rw], c))


def replay_trace(p: NCPolynomial, trace: Sequence[Tuple], rules: RuleSet) -> NCPolynomial:
    """Re-run a Proved trace; raises if any step is unsound, returns the result."""
    amb = rules.ambient
    p = reduce(p, rules)
    for step in trace:
        kind = step[0]
        terms = dict(p.terms)
        if kind == "collapse":
            _, axis, fam_pair, ctx, coeff, present, dead = step
            family = amb.col_family(fam_pair) if axis == "col" else amb.row_family(fam_pair)
            for g in family:
                w = ctx[0] + (g,) + ctx[1]
                if g in present:
                    if terms.get(w) != coeff:
                        raise AssertionError("collapse step: member missing or coeff drift")
                    del terms[w]
                else:
                    if reduce_word(w, rules) is not None:
                        raise AssertionError("collapse step: absent member is not zero")
            _merge(terms, ctx[0] + ctx[1], coeff)
        elif kind == "complete_collapse":
            _, axis, fam_pair, ctx, coeff, present, kills = step
            killed = dict(kills)
            family = amb.col_family(fam_pair) if axis == "col" else amb.row_family(fam_pair)
            for g in family:
                w = ctx[0] + (g,) + ctx[1]
                if g in present:
                    if terms.get(w) != coeff:
                        raise AssertionError("completion step: member missing")
                    del terms[w]
                else:
                    info = killed.get(g, "?")
                    if info is None:
                        if reduce_word(w, rules) is not None:
                            raise AssertionError("completion: member not reduce-dead")
                    elif info == "?":
                        raise AssertionError("completion: unaccounted member")
                    else:
                        mw, tree = info
                        if reduce_word(w, rules) != mw:
                            raise AssertionError("completion: reduced member drifted")
                        scratch = {mw: coeff}
                        _replay_kill(scratch, mw, tree, rules)
                        if scratch:
                            raise AssertionError("completion: member kill incomplete")
            _merge(terms, ctx[0] + ctx[1], coeff)
        elif kind == "kill":
            _, w, tree = step
            _replay_kill(terms, w, tree, rules)
        elif kind == "rv_swap":
            _, rp, to_pair, cv, ctx, coeff = step
            for m in rules.group_members(rp, cv):
                w = ctx[0] + (m,) + ctx[1]
                have = terms.get(w, Fraction(0))
                if have != coeff and reduce_word(w, rules) is not None:
                    raise AssertionError("rv swap: group member missing")
                _merge(terms, w, -coeff)
            for m in rules.group_members(to_pair, cv):
                _merge(terms, ctx[0] + (m,) + ctx[1], coeff)
        elif kind == "rv_average":
            _, rp, cv, ctx, coeff = step
            n = amb.n_labels
            for m in rules.group_members(rp, cv):
                w = ctx[0] + (m,) + ctx[1]
                have = terms.get(w, Fraction(0))
                if have != coeff and reduce_word(w, rules) is not None:
                    raise AssertionError("rv average: group member missing")
                _merge(terms, w, -coeff)
            rv_vertex = amb.pair_vertex(rp)
            for s in range(1, n + 1):
                for m in rules.group_members(amb.pair(rv_vertex, s), cv):
                    _merge(terms, ctx[0] + (m,) + ctx[1], coeff / n)
        elif kind == "global_insert":
            _, side, cp = step
            out: Dict[Word, Fraction] = {}
            for w, c in terms.items():
                for m in amb.col_family(cp):
                    nw = (w + (m,)) if side == "right" else ((m,) + w)
                    rw = reduce_word(nw, rules)
                    if rw is not None:
                        _merge(out, rw, c)
            terms = out
        else:
            raise AssertionError(f"unknown trace step {kind!r}")
        p = reduce(NCPolynomial(p.ambient, terms), rules)
    return p


# ---------------------------------------------------------------------------
# tensors (two-leg polynomials for coproduct identities)


class TensorPolynomial:
    """Rational combination of word pairs (two tensor legs)."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms=None):
        self.ambient = ambient
        self.terms: Dict[Tuple[Word, Word], Fraction] = {}
        if terms:
            for k, c in terms.items():
                key = (tuple(k[0]), tuple(k[1]))
                acc = self.terms.get(key, Fraction(0)) + Fraction(c)
                if acc:
                    self.terms[key] = acc
                elif key in self.terms:
                    del self.terms[key]

    @staticmethod
    def of(left: NCPolynomial, right: NCPolynomial) -> "TensorPolynomial":
        out: Dict[Tuple[Word, Word], Fraction] = {}
        for w1, c1 in left.terms.items():
            for w2, c2 in right.terms.items():
                key = (w1, w2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return TensorPolynomial(left.ambient, out)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            acc = out.get(k, Fraction(0)) + c
            if acc:
                out[k] = acc
            elif k in out:
                del out[k]
        return TensorPolynomial(self.ambient, out)

    def __sub__(self, other):
        return self + TensorPolynomial(other.ambient, {k: -c for k, c in other.terms.items()})

    def __mul__(self, other):
        out: Dict[Tuple[Word, Word], Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                acc = out.get(key, Fraction(0)) + c1 * c2
                if acc:
                    out[key] = acc
                elif key in out:
                    del out[key]
        return TensorPolynomial(self.ambient, out)

    def legwise_reduce(self, rules: RuleSet) -> "TensorPolynomial":
        out: Dict[Tuple[Word, Word], Fraction] = {}
        for (wl, wr), c in self.terms.items():
            rl = reduce_word(wl, rules)
            if rl is None:
                continue
            rr = reduce_word(wr, rules)
            if rr is None:
                continue
            key = (rl, rr)
            acc = out.get(key, Fraction(0)) + c
            if acc:
                out[key] = acc
            elif key in out:
                del out[key]
        return TensorPolynomial(self.ambient, out)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        return isinstance(other, TensorPolynomial) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "TensorPolynomial(0)"
        amb = self.ambient
        bits = []
        for (wl, wr), c in self.items():
            left = "*".join(amb.gen_name(g) for g in wl) or "1"
            right = "*".join(amb.gen_name(g) for g in wr) or "1"
            bits.append(f"{c} {left} (x) {right}")
        return "TensorPolynomial(" + " + ".join(bits) + ")"
