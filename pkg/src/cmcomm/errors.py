"""Exception hierarchy shared by all modules."""


class AlgebraError(Exception):
    """Base class for everything raised by cmcomm."""


class SignatureError(AlgebraError):
    """Unknown operation symbol, arity mismatch or malformed table."""


class ArityError(AlgebraError):
    """A term refers to a variable the environment does not bind."""


class CapacityError(AlgebraError):
    """A power or cube space is larger than the configured bound."""

    def __init__(self, message, bound=None, limit=None):
        super().__init__(message)
        self.bound = bound
        self.limit = limit


class NotACongruenceError(AlgebraError):
    """A partition is not compatible with some basic operation."""

    def __init__(self, message, symbol=None, witness=None):
        super().__init__(message)
        self.symbol = symbol
        self.witness = witness


class UniverseError(AlgebraError):
    """Partitions or elements over mismatched universes."""


class CoordinateError(AlgebraError):
    """Cube coordinates out of range or equal where they must differ."""


class TreeError(AlgebraError):
    """Tree address longer than the rotation tree allows."""


class ContractError(AlgebraError):
    """A documented precondition does not hold."""


class ParseError(AlgebraError):
    """Malformed text input (partitions, terms, algebra files)."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
