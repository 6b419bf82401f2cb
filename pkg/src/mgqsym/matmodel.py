"""Finite-dimensional numeric representations of a presentation.

A model assigns every generator a complex d x d matrix; nothing is assumed,
everything is checked: self-adjointness, idempotency, vanishing pairs, unit
sums, and the label-sum relations, each class reporting its worst deviation
in Frobenius norm (an upper bound for the operator norm).

pauli_witness builds the block magic unitary over two projections p, q(theta)
on a multigraph whose underlying graph is complete on four vertices; for
noncommuting p, q the induced edge matrix stays bi-unitary but is no magic
unitary, which is the concrete witness that the symmetry is not of
permutation type on the edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .characters import Character
from .errors import (
    DimensionMismatch,
    IncompatibleModels,
    ParseError,
    UnsupportedUnderlyingGraph,
)
from .multigraph import Multigraph, underlying
from .ncalg import NCPolynomial, TensorPolynomial
from .presentation import EdgeMatrix, Presentation


def _dev(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, "fro"))


@dataclass
class MatrixModel:
    dimension: int
    assignment: Dict[int, np.ndarray]  # gid -> d x d complex

    def matrix(self, gid: int) -> np.ndarray:
        return self.assignment[gid]

    def evaluate_word(self, word: Tuple[int, ...]) -> np.ndarray:
        out = np.eye(self.dimension, dtype=complex)
        for g in word:
            out = out @ self.assignment[g]
        return out

    def evaluate(self, poly: NCPolynomial) -> np.ndarray:
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        for w, c in poly.terms.items():
            out += complex(c) * self.evaluate_word(w)
        return out

    def evaluate_tensor(self, tensor: TensorPolynomial) -> np.ndarray:
        d = self.dimension
        out = np.zeros((d * d, d * d), dtype=complex)
        for (wl, wr), c in tensor.terms.items():
            out += complex(c) * np.kron(
                self.evaluate_word(wl), self.evaluate_word(wr)
            )
        return out


@dataclass
class RelationViolationReport:
    tolerance: float
    deviations: Dict[str, float]  # relation class -> max deviation
    worst_class: str
    worst: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def to_dict(self) -> Dict:
        return {
            "tolerance": self.tolerance,
            "deviations": dict(sorted(self.deviations.items())),
            "worst_class": self.worst_class,
            "worst": self.worst,
            "passed": self.passed,
        }


def check_relations(m: MatrixModel, p: Presentation, tol: float = 1e-10) -> RelationViolationReport:
    amb = p.ambient
    d = m.dimension
    for gid, mat in m.assignment.items():
        if mat.shape != (d, d):
            raise DimensionMismatch(d, mat.shape)
    if set(m.assignment) != set(range(amb.n_gens)):
        raise DimensionMismatch(amb.n_gens, len(m.assignment))
    eye = np.eye(d, dtype=complex)
    dev: Dict[str, float] = {
        "self_adjoint": 0.0,
        "idempotent": 0.0,
        "vanishing": 0.0,
        "unit_rows": 0.0,
        "unit_cols": 0.0,
        "label_sums": 0.0,
    }
    for gid in range(amb.n_gens):
        mat = m.assignment[gid]
        dev["self_adjoint"] = max(dev["self_adjoint"], _dev(mat.conj().T - mat))
        dev["idempotent"] = max(dev["idempotent"], _dev(mat @ mat - mat))
    for (a, b) in p.rules.vanishing:
        dev["vanishing"] = max(
            dev["vanishing"], _dev(m.assignment[a] @ m.assignment[b])
        )
    for x in range(amb.n_pairs):
        row_sum = sum(m.assignment[g] for g in amb.row_family(x))
        col_sum = sum(m.assignment[g] for g in amb.col_family(x))
        dev["unit_rows"] = max(dev["unit_rows"], _dev(row_sum - eye))
        dev["unit_cols"] = max(dev["unit_cols"], _dev(col_sum - eye))
    if p.include_rv:
        for rv_vertex, cv, row_pairs in p.rules.rv_groups():
            base = sum(
                m.assignment[g] for g in p.rules.group_members(row_pairs[0], cv)
            )
            for rp in row_pairs[1:]:
                other = sum(
                    m.assignment[g] for g in p.rules.group_members(rp, cv)
                )
                dev["label_sums"] = max(dev["label_sums"], _dev(base - other))
    worst_class = max(sorted(dev), key=lambda k: dev[k])
    return RelationViolationReport(tol, dev, worst_class, dev[worst_class])


def character_to_model(c: Character, p: Presentation) -> MatrixModel:
    amb = p.ambient
    assignment = {}
    for gid in range(amb.n_gens):
        val = 1.0 if c.assignment[amb.col(gid)] == amb.row(gid) else 0.0
        assignment[gid] = np.array([[val]], dtype=complex)
    return MatrixModel(1, assignment)


def pauli_witness(g: Multigraph, theta: float, p: Optional[Presentation] = None) -> MatrixModel:
    """Block magic unitary over projections on a complete-on-4 underlying graph.

    Any magic unitary commutes with J - I, so the multiplicity-mismatch
    relations are free; the noncommutativity of the two projections is what
    the edge matrix inherits.
    """
    from .presentation import build_presentation

    und = underlying(g)
    if len(g.vertices) != 4 or not und.is_complete():
        raise UnsupportedUnderlyingGraph(
            "witness needs a complete underlying graph on 4 vertices"
        )
    mults = {und.weight[a] for a in und.arcs}
    if len(mults) != 1 or min(mults) < 2:
        raise UnsupportedUnderlyingGraph(
            "witness needs uniform multiplicity at least 2"
        )
    if p is None:
        p = build_presentation(g)
    c, s = math.cos(theta), math.sin(theta)
    proj_p = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    proj_q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    one = np.eye(2, dtype=complex)
    zero = np.zeros((2, 2), dtype=complex)
    blocks = [
        [proj_p, one - proj_p, zero, zero],
        [one - proj_p, proj_p, zero, zero],
        [zero, zero, proj_q, one - proj_q],
        [zero, zero, one - proj_q, proj_q],
    ]
    amb = p.ambient
    assignment = {}
    for gid in range(amb.n_gens):
        row, col = amb.row(gid), amb.col(gid)
        if amb.pair_label(row) != amb.pair_label(col):
            assignment[gid] = zero.copy()
        else:
            assignment[gid] = blocks[amb.pair_vertex(row)][amb.pair_vertex(col)].copy()
    return MatrixModel(2, assignment)


def evaluate_edge_matrix(m: MatrixModel, em: EdgeMatrix, tol: float = 1e-10) -> Dict[str, float]:
    """Bi-unitarity and magic deviations of the evaluated edge matrix."""
    d = m.dimension
    n = len(em.edges)
    eye = np.eye(d, dtype=complex)
    u = [[m.evaluate(em.entries[(si, ti)]) for ti in range(n)] for si in range(n)]
    ustar = [[u[si][ti].conj().T for ti in range(n)] for si in range(n)]
    biu = 0.0
    for a in range(n):
        for b in range(n):
            delta = eye if a == b else np.zeros((d, d), dtype=complex)
            biu = max(biu, _dev(sum(u[a][t] @ ustar[b][t] for t in range(n)) - delta))
            biu = max(biu, _dev(sum(ustar[a][t] @ u[b][t] for t in range(n)) - delta))
            biu = max(biu, _dev(sum(ustar[s][a] @ u[s][b] for s in range(n)) - delta))
            biu = max(biu, _dev(sum(u[s][a] @ ustar[s][b] for s in range(n)) - delta))
    magic = 0.0
    for a in range(n):
        for b in range(n):
            e = u[a][b]
            magic = max(magic, _dev(e @ e - e), _dev(e.conj().T - e))
        magic = max(magic, _dev(sum(u[a][t] for t in range(n)) - eye))
        magic = max(magic, _dev(sum(u[t][a] for t in range(n)) - eye))
    return {"biunitary": biu, "magic": magic, "tolerance": tol}


def combine(models: Sequence[MatrixModel], mode: str, p: Optional[Presentation] = None) -> MatrixModel:
    """direct-sum: blockwise; tensor: conjugate a model by a character model."""
    if not models:
        raise IncompatibleModels("need at least one model")
    gids = set(models[0].assignment)
    for m in models[1:]:
        if set(m.assignment) != gids:
            raise IncompatibleModels("models assign different generator sets")
    if mode == "direct-sum":
        dim = sum(m.dimension for m in models)
        assignment = {}
        for gid in gids:
            mat = np.zeros((dim, dim), dtype=complex)
            at = 0
            for m in models:
                d = m.dimension
                mat[at : at + d, at : at + d] = m.assignment[gid]
                at += d
            assignment[gid] = mat
        return MatrixModel(dim, assignment)
    if mode == "tensor":
        if len(models) != 2 or p is None:
            raise IncompatibleModels("tensor mode takes (model, character model) and a presentation")
        base, charm = models
        if charm.dimension != 1:
            raise IncompatibleModels("second tensor factor must be a character model")
        amb = p.ambient
        pi = [-1] * amb.n_pairs  # column pair -> row pair of the character
        for gid, mat in charm.assignment.items():
            if abs(mat[0, 0] - 1.0) < 1e-9:
                col = amb.col(gid)
                if pi[col] != -1:
                    raise IncompatibleModels("character model is not 0/1 magic")
                pi[col] = amb.row(gid)
        if sorted(pi) != list(range(amb.n_pairs)):
            raise IncompatibleModels("character model is not a permutation")
        assignment = {}
        for gid in range(amb.n_gens):
            assignment[gid] = base.assignment[
                amb.gen(pi[amb.row(gid)], pi[amb.col(gid)])
            ].copy()
        return MatrixModel(base.dimension, assignment)
    raise IncompatibleModels(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# JSON import/export


def export_model(m: MatrixModel) -> str:
    obj = {
        "dimension": m.dimension,
        "matrices": {
            str(gid): [
                [[float(z.real), float(z.imag)] for z in row] for row in mat
            ]
            for gid, mat in sorted(m.assignment.items())
        },
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def import_model(text: str) -> MatrixModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad model JSON: {exc}") from None
    d = int(obj["dimension"])
    assignment = {}
    for key, rows in obj["matrices"].items():
        mat = np.array(
            [[complex(re, im) for (re, im) in row] for row in rows], dtype=complex
        )
        if mat.shape != (d, d):
            raise DimensionMismatch(d, mat.shape)
        assignment[int(key)] = mat
    return MatrixModel(d, assignment)
