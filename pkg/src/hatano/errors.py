"""Exception hierarchy shared across the package."""


class HatanoError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpec(HatanoError):
    """A distribution specification is malformed."""


class DegenerateSpec(HatanoError):
    """A constant (single-support-point) potential was passed where a
    nondegenerate i.i.d. law is required."""


class SchemaError(HatanoError):
    """A serialized file does not match the expected schema."""


class BracketInvalid(HatanoError):
    """Root bracket endpoints do not have opposite function signs."""


class ToleranceUnreachable(HatanoError):
    """Requested root tolerance is below the precision capability."""


class NoConvergence(HatanoError):
    """Iterative solver hit its iteration cap.

    Carries the residuals achieved so far in ``residuals``.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class CapabilityExceeded(HatanoError):
    """Input size or requested precision is beyond the supported range."""


class PrecisionExceeded(HatanoError):
    """A quantity is below extended-precision capability; the caller should
    record the check as skipped rather than failed."""


class StructureViolation(HatanoError):
    """Band combinatorics (counts, interlacing, disjointness) failed.

    ``diagnostics`` holds whatever intermediate data is useful for debugging.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class CountMismatch(HatanoError):
    """Real plus complex eigenvalues do not add up to the ring length."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ContinuityBreak(HatanoError):
    """Eigenvalue continuation lost track of a trajectory."""
