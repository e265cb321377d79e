"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation and domain failures exit
with 2, bound-validity (precondition) failures with 3, and enumeration or
dimension cap overruns with 4.
"""


class CQBoundsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CQBoundsError):
    """A mathematical-domain violation (log of a null operator, p = 0, ...)."""


class DimensionMismatchError(DomainError):
    """Operands whose dimensions or subsystem layouts are incompatible."""


class ValidationError(CQBoundsError):
    """An input object violates a constructor invariant."""


class PreconditionError(CQBoundsError):
    """A validity condition of a bound is violated (e.g. blocklength too small)."""


class ResourceCapError(CQBoundsError):
    """A configured enumeration or dimension cap would be exceeded."""
