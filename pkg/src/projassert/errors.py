"""Exception types shared across the package."""


class ProjAssertError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ProjAssertError):
    pass


class NotHermitian(ProjAssertError):
    pass


class NotPSD(ProjAssertError):
    pass


class NotOrthonormal(ProjAssertError):
    pass


class IndexOutOfRange(ProjAssertError):
    pass


class DuplicateIndex(ProjAssertError):
    pass


class EmptyKeepSet(ProjAssertError):
    pass


class IncompleteMeasurement(ProjAssertError):
    pass


class RankNotPowerOfTwo(ProjAssertError):
    pass


class RankOutOfRange(ProjAssertError):
    pass


class NotNeeded(ProjAssertError):
    pass


class DecompositionMismatch(ProjAssertError):
    pass


class BadAlpha(ProjAssertError):
    pass


class ZeroShots(ProjAssertError):
    pass


class BadArgs(ProjAssertError):
    pass


class ShapeUnderflow(ProjAssertError):
    pass


class EigenvalueMismatch(ProjAssertError):
    pass


class BadTarget(ProjAssertError):
    pass


class DslSyntaxError(ProjAssertError):
    """Parse failure; carries the source line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownGate(ProjAssertError):
    pass


class QubitOutOfRange(ProjAssertError):
    pass


class NonUnitaryGateDef(ProjAssertError):
    pass


class BadProjectionExpr(ProjAssertError):
    pass
