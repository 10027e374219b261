"""Exception hierarchy shared by all modules.

Every error raised for bad user input derives from :class:`InputError`; the
CLI maps those to exit code 2.
"""


class CurveDiracError(Exception):
    """Base class for all package errors."""


class InputError(CurveDiracError):
    """Malformed or inconsistent user input."""


class ExpressionSyntaxError(InputError):
    """Expression text does not match the grammar."""

    def __init__(self, message, offset, expected=None):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at byte {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class ReservedNameError(InputError):
    """A reserved word (``i``) was used as an ordinary identifier."""


class DomainError(CurveDiracError, ArithmeticError):
    """Numeric evaluation hit a singular point (1/0, ln 0, 0^-n)."""


class UnboundSymbol(CurveDiracError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unbound symbol {self.name!r}"


class SamplingExhausted(CurveDiracError):
    """Too many sample points landed on singular loci."""


class FormatError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionMismatch(FormatError):
    pass


class AsymmetricInput(FormatError):
    pass


class MissingSection(FormatError):
    pass


class SingularMetric(InputError):
    pass


class SignatureMismatch(InputError):
    pass


class SlotOutOfRange(CurveDiracError, IndexError):
    pass


class SameVariance(CurveDiracError, ValueError):
    pass


class MissingStressEnergy(InputError):
    pass


class ZeroCoupling(InputError):
    pass


class NonDiagonalSymbolic(CurveDiracError):
    """Symbolic tetrads are only built for diagonal metrics.

    Use :func:`curvedirac.spinor.numeric_tetrad` at a point instead.
    """


class NegativeRadicand(InputError):
    pass


class NotFlat(CurveDiracError):
    pass
