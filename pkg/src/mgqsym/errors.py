"""Exception types shared across the package."""


class MgqsymError(Exception):
    """Base class for all package errors."""


class IsolatedVertex(MgqsymError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex!r} is neither source nor target of any edge")


class UnknownEndpoint(MgqsymError):
    def __init__(self, edge_index, endpoint):
        self.edge_index = edge_index
        self.endpoint = endpoint
        super().__init__(f"edge #{edge_index} references unknown vertex {endpoint!r}")


class EmptyEdgeList(MgqsymError):
    def __init__(self):
        super().__init__("a multigraph needs at least one edge")


class UnknownVertex(MgqsymError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"unknown vertex {vertex!r}")


class SearchBudgetExceeded(MgqsymError):
    def __init__(self, needed, budget, partial=None):
        self.needed = needed
        self.budget = budget
        self.partial = partial
        super().__init__(f"search needs ~{needed} nodes, budget is {budget}")


class MixedAmbient(MgqsymError):
    def __init__(self):
        super().__init__("operands live over different generator index sets")


class NotAPermutation(MgqsymError):
    """A character's induced edge action failed to be a bijection.

    This signals an inconsistent character (an internal failure), not bad input.
    """


class MismatchFound(MgqsymError):
    def __init__(self, unmatched_characters, unmatched_automorphisms):
        self.unmatched_characters = unmatched_characters
        self.unmatched_automorphisms = unmatched_automorphisms
        super().__init__(
            f"{len(unmatched_characters)} characters and "
            f"{len(unmatched_automorphisms)} automorphisms left unmatched"
        )


class DimensionMismatch(MgqsymError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected}x{expected} matrices, got {got}")


class UnsupportedUnderlyingGraph(MgqsymError):
    pass


class IncompatibleModels(MgqsymError):
    pass


class ParseError(MgqsymError):
    pass
