"""Quantum symmetry presentations of finite multigraphs.

Builds the generators-and-relations presentation attached to a finite
multigraph, verifies its structural identities symbolically, enumerates the
classical characters against a brute-force automorphism oracle, and evaluates
finite-dimensional matrix models, including the projection-pair witness that
the edge symmetry need not be of permutation type.
"""

from .multigraph import Multigraph, automorphisms, build, underlying
from .ncalg import Ambient, NCPolynomial, ProofEngine, RuleSet, TensorPolynomial
from .presentation import (
    Presentation,
    banica_lift,
    build_presentation,
    coproduct,
    edge_matrix,
    permissible_subpresentation,
    vertex_matrix,
)

__all__ = [
    "Ambient",
    "Multigraph",
    "NCPolynomial",
    "Presentation",
    "ProofEngine",
    "RuleSet",
    "TensorPolynomial",
    "automorphisms",
    "banica_lift",
    "build",
    "build_presentation",
    "coproduct",
    "edge_matrix",
    "permissible_subpresentation",
    "underlying",
    "vertex_matrix",
]

__version__ = "0.1.0"
