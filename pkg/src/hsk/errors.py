"""Exception hierarchy shared by every module of the toolkit."""


class HskError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HskError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(HskError, ArithmeticError):
    """Evaluation requested at (or within machine distance of) a pole."""


class ContourError(HskError):
    """Argument-principle contour could not be placed away from zeros/poles."""


class ValidationError(HskError, ValueError):
    """A constructed object violates one of its structural invariants."""


class InvariantViolation(HskError):
    """A computed quantity disagrees with a value the theory predicts."""


class NumericalError(HskError, ArithmeticError):
    """An iterative method failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ClassificationError(HskError):
    """A discrete classification fell inside the tolerance band between candidates."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class NodeError(HskError):
    """The eigenspace at a curve point is not one-dimensional."""


class StencilError(HskError):
    """A finite-difference stencil cannot be applied on the given grid."""
