"""Exception types and warning categories used across the package."""

from __future__ import annotations


class SpecjmError(Exception):
    """Base class for all domain errors raised by this package."""


# --- linear algebra -------------------------------------------------------

class NonSquare(SpecjmError):
    """A matrix argument was not square."""


class NonFinite(SpecjmError):
    """A numeric argument contained NaN or Inf."""


class TooAsymmetric(SpecjmError):
    """A matrix claimed to be Hermitian deviates too far from its adjoint."""


class DimensionOverflow(SpecjmError):
    """A requested object exceeds the configured dimension cap."""


class ConvergenceFailure(SpecjmError):
    """An iterative routine hit its iteration cap; carries the residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


# --- SDP solver -----------------------------------------------------------

class NumericalBreakdown(SpecjmError):
    """A matrix factorization failed inside the solver.

    ``iterate`` holds the last iterate's summary for post-mortem inspection.
    """

    def __init__(self, message: str, iterate: dict | None = None):
        super().__init__(message)
        self.iterate = iterate


# --- quantum / jm layers --------------------------------------------------

class NotAnEffect(SpecjmError):
    """An operator violates the effect condition 0 <= E <= I."""


class LengthMismatch(SpecjmError):
    """Two per-measurement vectors/tuples have different lengths."""


class NotIsometry(SpecjmError):
    """A claimed isometry V does not satisfy V*V = I."""


class ZeroScaling(SpecjmError):
    """A scaling vector entry required to be positive was zero."""


class TooManyMeasurements(SpecjmError):
    """The number of measurements exceeds the configured cap (2^g blow-up)."""


class UnsupportedModel(SpecjmError):
    """The requested noise model is not supported by this operation."""


# --- constructions --------------------------------------------------------

class NotPrime(SpecjmError):
    """The unbiased-bases construction is implemented for prime dimensions only."""


class TrivialSubset(SpecjmError):
    """An index subset was empty or full where a proper subset is required."""


class DegenerateOutcome(SpecjmError):
    """A measurement outcome unusable for the Gram construction (e.g. negative trace)."""


# --- regions --------------------------------------------------------------

class OutOfRange(SpecjmError):
    """A scalar parameter lies outside its admissible interval."""


class NegativeComponent(SpecjmError):
    """A vector required to be nonnegative has a negative entry."""


# --- serialization --------------------------------------------------------

class SchemaMismatch(SpecjmError):
    """A JSON document declares a schema marker this package does not read."""


# --- warnings -------------------------------------------------------------

class DependentConstraintWarning(UserWarning):
    """Linearly dependent equality constraints were detected and dropped."""


class SkippedOutcomeWarning(UserWarning):
    """A zero-trace outcome was skipped in a Gram-matrix sum."""
