"""Exception hierarchy shared by all opuc modules."""


class OpucError(Exception):
    """Base class for all library errors."""


class DomainError(OpucError, ValueError):
    """A parameter is outside its mathematical domain (e.g. |alpha| >= 1)."""


class DegeneracyError(OpucError):
    """Strict positive definiteness of a moment system fails at some order.

    ``order`` is the smallest n for which the (n+1) x (n+1) Toeplitz moment
    matrix is not strictly positive definite.  For a measure supported on A
    points this happens at order A.
    """

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"moment system degenerate at order {order}")


class PrecisionError(OpucError):
    """Working precision was exhausted before the requested quantity converged.

    ``index`` names the recursion step, matrix order or grid cell at which
    the numerical invariant broke.
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"precision exhausted at index {index}")


class ResolutionError(OpucError):
    """A sample grid is too coarse for the requested number of moments."""


class RangeOverflowError(OpucError):
    """A doubly exponential quantity exceeds the exactly representable range.

    ``max_feasible`` is the largest block index that can still be produced
    at the configured precision ceiling.
    """

    def __init__(self, max_feasible, message=None):
        self.max_feasible = max_feasible
        super().__init__(
            message
            or f"value not exactly representable; largest feasible index is {max_feasible}"
        )


class SpecDocumentError(DomainError):
    """A measure-spec document failed validation.

    ``code`` is a stable diagnostic id:  ``malformed-document``,
    ``missing-field``, ``unknown-kind``, ``unknown-generator``,
    ``parameter-range``, ``bad-atoms`` or ``bad-samples``.
    """

    def __init__(self, code, message):
        self.code = code
        super().__init__(f"[{code}] {message}")
