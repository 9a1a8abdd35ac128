"""Exception types raised by the solvers and validators."""


class SharingError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SharingError, ValueError):
    """An argument is outside its admissible range."""


class InfeasibilityError(SharingError):
    """A feasibility assumption (A1 or A2) does not hold.

    ``assumption`` names the violated assumption, ``prosumers`` lists the ids
    involved when the violation is attributable to individual prosumers.
    """

    def __init__(self, message, assumption, prosumers=()):
        super().__init__(message)
        self.assumption = assumption
        self.prosumers = tuple(prosumers)


class AssumptionError(SharingError):
    """A3 (negative self-sufficiency net cost) does not hold."""

    def __init__(self, message, prosumers=()):
        super().__init__(message)
        self.prosumers = tuple(prosumers)


class BracketError(SharingError):
    """Bisection bracket does not contain a sign change."""

    def __init__(self, message, lower, upper, excess_lower, excess_upper):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.excess_lower = excess_lower
        self.excess_upper = excess_upper


class ConsistencyError(SharingError):
    """Inputs violate an identity they are required to satisfy (e.g. balance)."""


class ModeError(SharingError):
    """An operation was applied to a solution of the wrong kind."""
