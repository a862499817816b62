"""Exception hierarchy shared across the package."""


class MixaggError(Exception):
    """Base class for every error raised by :mod:`mixagg`."""


class DomainError(MixaggError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class ConfigurationError(MixaggError, ValueError):
    """A loss, cost or game is configured inconsistently."""


class UnsupportedError(MixaggError, NotImplementedError):
    """The requested combination exists mathematically but is not provided."""


class InfiniteLossError(MixaggError, ArithmeticError):
    """A loss evaluation would be +inf (zero predicted probability/density).

    ``expert`` and ``round`` are filled in by the game engine when the error
    surfaces mid-game.
    """

    def __init__(self, message, expert=None, round=None):
        super().__init__(message)
        self.expert = expert
        self.round = round


class InvariantError(MixaggError, AssertionError):
    """An internal guarantee was violated. Always a bug."""


class StreamExhaustedError(MixaggError, LookupError):
    """An expert or outcome stream ended before the configured horizon."""

    def __init__(self, message, round):
        super().__init__(message)
        self.round = round
