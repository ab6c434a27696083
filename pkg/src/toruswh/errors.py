"""Exception hierarchy and warnings shared by all toruswh modules."""


class TorusWHError(Exception):
    """Base class for all library errors."""


class DomainError(TorusWHError):
    """Input outside the mathematical domain of an operation (e.g. k0 <= 1)."""


class ConfigError(TorusWHError):
    """Invalid configuration value (grid size, tolerance, ...)."""


class BranchCutError(TorusWHError):
    """Evaluation of a square-root branch strictly inside its cut."""


class ConvergenceError(TorusWHError):
    """An iterative routine failed to converge."""


class NotInvertibleError(TorusWHError):
    """A symbol dips below the invertibility tolerance on the contour."""


class ResolutionError(TorusWHError):
    """The grid is too coarse to track a winding phase (step >= pi)."""


class SheetIndexError(TorusWHError):
    """A sheet winding index violates the precondition of an operation."""


class ConditionError(TorusWHError):
    """A solvability condition fails (e.g. special factorization requested
    while the torus invariant is off the period lattice)."""


class PoleError(TorusWHError):
    """Evaluation exactly at an excluded pole of a meromorphic block."""


class PoleOnContourError(TorusWHError):
    """A function has a pole on the contour and cannot be sampled there."""


class UnsupportedFormError(TorusWHError):
    """A middle-factor descriptor outside the closed-form table."""


class DegenerateError(TorusWHError):
    """A closed-form factorization requested at a degenerate parameter
    for which no fallback exists."""


class EvalError(TorusWHError):
    """Expression evaluation failure (pole at a node, no limit at infinity)."""


class ContextError(TorusWHError):
    """A surface-only variable used outside a surface evaluation context."""


class ParseError(TorusWHError):
    """Syntax error in the symbol mini-language.

    Attributes
    ----------
    offset : int
        Byte offset of the failure in the source string.
    expected : tuple of str
        Token classes that would have been accepted at that point.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}"
                         + (f" (expected {', '.join(expected)})" if expected else ""))
        self.offset = offset
        self.expected = tuple(expected)


class InternalError(TorusWHError):
    """A defensive invariant of the library itself was violated."""


class AliasWarning(UserWarning):
    """High-frequency tail of a sampled symbol carries non-negligible energy;
    projection results may be aliased."""
