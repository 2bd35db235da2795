"""Exception types shared across the package."""


class OUCutoffError(Exception):
    """Base class for all package errors."""


class NotMPlusError(OUCutoffError):
    """Drift matrix has an eigenvalue with non-positive real part."""

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super().__init__(
            f"matrix is not admissible: eigenvalue {eigenvalue} has "
            f"real part <= 0"
        )


class QuadratureError(OUCutoffError):
    """An adaptive integral did not converge; carries the residual estimate."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class UnderResolvedError(OUCutoffError):
    """A characteristic-function lattice is too small or too coarse."""

    def __init__(self, message, suggestion=None):
        self.suggestion = suggestion
        super().__init__(message)


class OffLatticeError(OUCutoffError):
    """A requested translate leaves the density lattice."""


class ComplexShiftError(OUCutoffError):
    """A profile shift vector has a non-negligible imaginary residual."""


class NonpositiveCutoffTimeError(OUCutoffError):
    """epsilon is too large for the schedule formula to give a positive time."""


class SamplingError(OUCutoffError):
    """Exact sampling is unavailable or a stationarity diagnostic failed."""


class ValidationError(OUCutoffError):
    """A configuration or model failed structural validation."""


class InsufficientEpsilonRange(ValidationError):
    """Too few noise amplitudes, or too narrow a spread, for verification."""
