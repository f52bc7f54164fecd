"""Exception types shared across the library.

Every error a caller is expected to catch has a named class here; modules
never raise bare ValueError for conditions a user can trigger through the
public API.
"""

from __future__ import annotations


class CertquadError(Exception):
    """Base class for all library errors."""


class DivisionByIntervalContainingZero(CertquadError):
    """Raised when dividing by an interval that contains zero.

    Division is undefined in that case; callers that want extended
    semantics must split the divisor themselves.
    """


class DimensionMismatch(CertquadError):
    """Operands have incompatible shapes (vector lengths, matrix dims)."""


class VertexBudgetExceeded(CertquadError):
    """Vertex enumeration of a box would produce more than 2**cap points."""


class ParseError(CertquadError):
    """A file or expression could not be parsed."""


class ShapeMismatch(CertquadError):
    """Network layer shapes are inconsistent with each other or the input."""


class UnsupportedActivation(CertquadError):
    """The requested activation kind is not one of relu, tanh, sigmoid."""


class UnsupportedDerivativeOrder(CertquadError):
    """No enclosure is available for the requested derivative order.

    In particular ReLU supports order 0 only.
    """


class IndexOutOfRange(CertquadError):
    """A layer or output index is outside the network's valid range."""


class ZeroErrorCell(CertquadError):
    """Width-guided refinement was asked to split a cell with zero error."""


class EvaluatorFailure(CertquadError):
    """A user-supplied integrand or enclosure raised during a run."""


class CoefficientEnclosureError(CertquadError):
    """An operator coefficient could not be enclosed on the requested box."""


class BudgetExhausted(CertquadError):
    """A run hit its cell or step budget before reaching its target.

    Carries the best state reached so far in ``state`` so partial results
    can still be inspected or written out.
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class ConfigError(CertquadError):
    """A run configuration is missing fields or holds invalid values."""


__all__ = [
    "CertquadError",
    "DivisionByIntervalContainingZero",
    "DimensionMismatch",
    "VertexBudgetExceeded",
    "ParseError",
    "ShapeMismatch",
    "UnsupportedActivation",
    "UnsupportedDerivativeOrder",
    "IndexOutOfRange",
    "ZeroErrorCell",
    "EvaluatorFailure",
    "CoefficientEnclosureError",
    "BudgetExhausted",
    "ConfigError",
]
