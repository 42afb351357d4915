"""Exception types shared across the package."""


class KeislerLabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KeislerLabError):
    """Formula text does not conform to the grammar or the signature."""


class SignatureError(KeislerLabError):
    """Malformed signature, or a formula uses symbols the signature lacks."""


class EvaluationError(KeislerLabError):
    """Evaluation failed: unbound variable or structure/signature mismatch."""


class StructureError(KeislerLabError):
    """Invalid finite structure, group table, or structure sequence."""


class MeasureError(KeislerLabError):
    """Invalid measure: bad weights, wrong variables, mismatched structures."""


class InvariantViolation(KeislerLabError):
    """An internally re-verified mathematical invariant failed.

    This is never expected in correct operation: it signals either a bug or
    a counterexample to a classical fact the code relies on, and callers
    should treat it as fatal rather than recover.
    """
