"""Exception types shared across the package."""


class BohrLabError(Exception):
    """Base class for all package errors."""


class ParseError(BohrLabError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DimensionMismatch(BohrLabError):
    """Operands live in Laurent rings of different dimension."""


class PreconditionError(BohrLabError):
    """An operation's stated precondition is violated."""


class CollisionError(BohrLabError):
    """Two epsilon-patterns coincide modulo (f): the m-goodness certificate
    backing the character family is unsound.

    Attributes carry the colliding patterns and their divisible difference.
    """

    def __init__(self, message, pattern_a=None, pattern_b=None, difference=None):
        super().__init__(message)
        self.pattern_a = pattern_a
        self.pattern_b = pattern_b
        self.difference = difference


class TailBoundError(BohrLabError):
    """A certified l^1 tail cannot be pushed below the requested threshold
    within the current truncation box."""
