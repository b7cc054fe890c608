"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ValidationError`` (bad input, exit 2) and ``NumericalError`` (exit 3).
"""


class BdlossError(Exception):
    pass


class ValidationError(BdlossError, ValueError):
    pass


class NumericalError(BdlossError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NonSimplexTarget(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, msg, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(msg + loc)
        self.line = line
        self.column = column


class InvariantViolation(ValidationError):
    def __init__(self, msg, row=None):
        super().__init__(msg if row is None else f"{msg} at row {row}")
        self.row = row


class IoError(BdlossError, OSError):
    pass


class NotPSD(NumericalError):
    pass


class SingularPencil(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class SingularNormalEquations(NumericalError):
    pass


class NonFinite(NumericalError):
    pass


class NonFiniteObjective(NumericalError):
    pass


class NotDescentDirection(NumericalError):
    pass


class LineSearchFailure(NumericalError):
    pass


class DegenerateWidth(UserWarning):
    """Kernel width came out non-positive; a width of 1 is used instead."""
