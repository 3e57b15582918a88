"""Exception hierarchy shared by the solver, dynamics and CLI layers."""


class PDCSqueezeError(Exception):
    """Base class for all package errors."""


class ConfigError(PDCSqueezeError, ValueError):
    """Invalid or incomplete run configuration."""


class FluxOutOfRange(ConfigError):
    """External flux ratio outside [0, 0.5) where cos(pi f) stays positive."""


class NumericalError(PDCSqueezeError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class RootNotFound(NumericalError):
    """The wave-vector scan produced fewer roots than requested."""


class DegenerateMode(NumericalError):
    """Relative amplitude denominator vanishes at a refined root."""


class ToleranceFailure(NumericalError):
    """The adaptive step controller could not meet the requested tolerance."""


class NonPhysical(NumericalError):
    """A trajectory produced a negative or complex quadrature variance."""


class ZeroDrive(PDCSqueezeError, ValueError):
    """Critical coupling requested for a vanishing drive."""


class DetunedCircuit(PDCSqueezeError, ValueError):
    """Dynamics requested for a circuit that is not on the 2:1 resonance."""
