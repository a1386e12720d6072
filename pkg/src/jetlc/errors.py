"""Exception types shared across the engine."""


class JetError(Exception):
    pass


class DivisionByZero(JetError, ZeroDivisionError):
    """A quotient or negative power hit a zero denominator during evaluation."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"denominator vanishes at {node!r}")


class UnsupportedDimension(JetError, ValueError):
    pass


class DegreeMismatch(JetError, ValueError):
    pass


class DimensionMismatch(JetError, ValueError):
    pass


class OddDimension(JetError, ValueError):
    pass


class NotAntisymmetric(JetError, ValueError):
    pass


class NotOrthogonal(JetError, ValueError):
    pass


class InvalidInverse(JetError, ValueError):
    pass


class NonpositiveScale(JetError, ValueError):
    pass


class SingularMetric(JetError, ValueError):
    pass


class OutOfRange(JetError, ValueError):
    pass


class InvalidPoint(JetError, ValueError):
    pass
