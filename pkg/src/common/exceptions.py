"""
Error taxonomy shared by the solver modules and the command line.

Input problems derive from ValueError, numerical failures from RuntimeError.
"""

from __future__ import annotations


class KgoError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(KgoError, ValueError):
    """A parameter violates the invariant of its type."""


class DomainError(KgoError, ValueError):
    """A function was evaluated outside its domain (e.g. x <= 0)."""


class DegenerateIndicial(KgoError, ValueError):
    """mΩB = 1/2: the indicial roots coincide and the series branch is logarithmic."""


class ZeroFrequency(KgoError, ValueError):
    """The effective oscillator frequency vanishes."""


class NegativeDiscriminant(KgoError, ValueError):
    """A closed-form energy squared came out negative."""


class ConfigError(KgoError, ValueError):
    """Run configuration is missing a key, has an unknown key or a bad value."""


class NotConverged(KgoError, RuntimeError):
    """A series tail estimate exceeds the requested tolerance."""


class EvalError(KgoError, RuntimeError):
    """A wave function could not be evaluated on its grid."""


class ZeroNorm(KgoError, RuntimeError):
    """A wave table has (numerically) zero norm."""


class DiscretizationError(KgoError, RuntimeError):
    """The potential is not finite on the finite-difference grid."""


class NoRootFound(KgoError, RuntimeError):
    """No sign change of a residual inside the search bracket."""


class NoConvergence(KgoError, RuntimeError):
    """
    An iterative solve stopped before meeting its tolerance.

    Attributes:
        best (tuple[float, float] | None): Best residual pair reached.
    """

    def __init__(self, message: str, best: tuple[float, float] | None = None):
        super().__init__(message)
        self.best = best
