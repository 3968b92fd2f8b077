"""Exception types shared across the package."""


class TreecolorError(Exception):
    """Base class for package errors."""


class ParameterError(TreecolorError, ValueError):
    """Invalid argument (bad degree, out-of-range level, partial coloring, ...)."""


class CapacityError(TreecolorError, RuntimeError):
    """A state space is too large for the requested exact computation."""

    def __init__(self, message, estimated=None):
        super().__init__(message)
        self.estimated = estimated


class InfeasiblePinningError(ParameterError):
    """A pinning has no extension to a proper coloring."""


class NonErgodicError(TreecolorError, RuntimeError):
    """The chain (or Dirichlet form) does not connect the state space."""


class UnsupportedRegimeError(ParameterError):
    """The requested construction is outside the regime it is defined for."""


class VerificationError(TreecolorError, RuntimeError):
    """An exact check of an asserted identity or inequality failed."""


class ConfigError(TreecolorError, ValueError):
    """Malformed experiment configuration."""
