"""Exception hierarchy shared by all amtk modules."""


class AmError(Exception):
    """Base class for every error raised by amtk."""


class ParseError(AmError, ValueError):
    """Malformed expression or polynomial text."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class DomainError(AmError, ValueError):
    """Evaluation outside the natural domain of an expression.

    ``node`` is the offending sub-expression and ``x`` the evaluation point.
    """

    def __init__(self, message, node=None, x=None):
        where = f" in {node}" if node is not None else ""
        at = f" at x={x!r}" if x is not None else ""
        super().__init__(f"{message}{where}{at}")
        self.node = node
        self.x = x


class NonPositiveError(DomainError):
    pass


class NonMonotoneError(AmError, ValueError):
    pass


class BelowBarrierError(AmError, ValueError):
    """Initial value of the inversion ODE lies below g."""


class RadicandNegativeError(AmError, ArithmeticError):
    pass


class UnresolvableCriticalPointError(AmError, ValueError):
    pass


class RatioTooSmallError(AmError, ValueError):
    pass


class QuadratureError(AmError, ArithmeticError):
    pass


class PolynomialError(AmError, ValueError):
    pass


class EliminationCollapseError(PolynomialError):
    pass
