"""
sbamix.exceptions
~~~~~~~~~~~~~~~~~
Exception hierarchy for the sbamix library.

Every error carries an ``exit_code`` that the CLI uses verbatim:

  2  configuration could not be parsed
  3  a measure, array or prior could not be constructed
  4  data or parameters fall outside a kernel's domain
  5  numerical abort inside a sampler
"""

from __future__ import annotations

from typing import Any, Sequence


class SBAMixError(Exception):
    """Base exception for all sbamix errors."""

    exit_code: int = 1

    def __init__(self, message: str, *, cause: BaseException | None = None) -> None:
        super().__init__(message)
        self.cause = cause
        self.message = message

    def __str__(self) -> str:
        if self.cause:
            return f"{self.message} (caused by {type(self.cause).__name__}: {self.cause})"
        return self.message


class ConfigParseError(SBAMixError):
    """Raised when a run configuration file is malformed or fails its schema."""

    exit_code = 2


class ModelConstructionError(SBAMixError):
    """Raised when a measure, barycenter array or prior cannot be built."""

    exit_code = 3


class InvalidArray(ModelConstructionError):
    """
    Raised when a triangular array is not a valid sequential barycenter array.

    Attributes:
        violations: The failing conditions, as reported by ``validate_sba``.
    """

    def __init__(
        self,
        message: str,
        *,
        violations: Sequence[Any] = (),
        cause: BaseException | None = None,
    ) -> None:
        super().__init__(message, cause=cause)
        self.violations = list(violations)


class ZeroMassUnboundedInterval(ModelConstructionError):
    """Raised when a barycenter is requested on a massless interval with no finite left end."""


class DegenerateOutsideInterval(ModelConstructionError):
    """Raised when a point-mass node law is restricted to an interval that misses the point."""


class InvalidNodeLaw(ModelConstructionError):
    """Raised when a node law or node-law family breaks its structural rules."""


class DegenerateInterval(ModelConstructionError):
    """Raised when a node's feasibility interval has (numerically) zero width."""


class TooFewSamples(SBAMixError):
    """Raised when a posterior summary needs more draws than were supplied."""

    exit_code = 3


class DomainError(SBAMixError):
    """
    Raised when an observation or kernel parameter lies outside its space.

    Attributes:
        value: The offending value (when known).
    """

    exit_code = 4

    def __init__(
        self,
        message: str,
        *,
        value: float | None = None,
        cause: BaseException | None = None,
    ) -> None:
        super().__init__(message, cause=cause)
        self.value = value


class NumericalError(SBAMixError):
    """Raised when a sampler meets a non-finite quantity it cannot recover from."""

    exit_code = 5


class NonFiniteTarget(NumericalError):
    """Raised when a slice sampler's log target is not finite at the current point."""


class AllMinusInfinity(NumericalError):
    """Raised when every mixture component gives zero density to some observation."""
