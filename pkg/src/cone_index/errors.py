"""Exception hierarchy.

Two families matter to callers: :class:`InvalidInputError` for malformed or
out-of-domain input, and :class:`ComputationError` for well-formed input that
cannot be evaluated (infinite counts, bound violations, inconsistencies).
The CLI maps them to exit codes 1 and 2.
"""

from __future__ import annotations


class ConeIndexError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(ConeIndexError, ValueError):
    """Input violates a documented precondition or cannot be parsed."""


class InvalidDimensionError(InvalidInputError):
    """Cone dimension is odd or nonpositive."""


class ComputationError(ConeIndexError):
    """A well-formed request that cannot be evaluated."""


class InfiniteCountError(ComputationError):
    """An interval contains the whole tail of an eigenvalue progression."""


class EnumerationLimitError(ComputationError):
    """Enumeration would exceed the configured index cap."""


class DegreeCapError(ComputationError):
    """Bernoulli polynomial degree above the configured cap."""


class PoleError(ComputationError):
    """Evaluation at the pole s = 1 of the Hurwitz zeta function."""


class ConvergenceError(ComputationError):
    """Numeric continuation failed to reach its tolerance."""


class IntegralityError(ComputationError):
    """Index formula produced a non-integer total."""


class CalderonBoundError(ComputationError):
    """Calderon dimension exceeds the eigenvalue count of its interval."""


class MissingTableEntryError(ComputationError):
    """Table Calderon model has no entry matching the requested interval."""


class ConsistencyError(ComputationError):
    """Two independent evaluation paths disagree."""
