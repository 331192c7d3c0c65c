"""Numerical verification of the c = 1 Hessian equation, its cone lift and
the geodesic-equivalence equation on closed-form pseudo-Riemannian charts."""

from .errors import ArgumentError, CapabilityError, DegeneracyError, DomainError, GTConeError

__version__ = "0.1.0"

__all__ = ["ArgumentError", "CapabilityError", "DegeneracyError", "DomainError", "GTConeError"]
