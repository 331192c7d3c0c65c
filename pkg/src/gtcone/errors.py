"""Exception types raised across the package."""


class GTConeError(Exception):
    """Base class for all package errors."""


class ArgumentError(GTConeError, ValueError):
    """An argument is out of range or malformed."""


class DomainError(GTConeError, ValueError):
    """A function was evaluated outside its domain (log of a negative jet, a
    point outside a chart, ...)."""


class CapabilityError(GTConeError):
    """A jet does not carry enough derivative orders for the request."""


class DegeneracyError(GTConeError):
    """A metric (or a restriction of one) is numerically singular."""

    def __init__(self, message, condition_number=float("inf")):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number
