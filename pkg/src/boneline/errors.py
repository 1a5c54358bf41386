"""Exception types shared across the package."""


class BonelineError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BonelineError, ValueError):
    """Raised when an operation receives data it cannot process."""


class InvalidThresholdError(InvalidInputError):
    """Raised when edge-detection thresholds are mis-ordered."""


class EmptyInputError(InvalidInputError):
    """Raised when an operation requires at least one element."""


class ConfigError(BonelineError, ValueError):
    """Raised for invalid configuration values or unknown config keys."""


class AnalysisError(BonelineError, RuntimeError):
    """Raised when a numerical analysis fails to produce a result."""


class DivergenceError(AnalysisError):
    """Raised when network training produces a non-finite loss.

    Carries the epoch (0-based) at which the loss became non-finite.
    """

    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"training loss became non-finite at epoch {epoch}")


class NoRegionError(BonelineError, ValueError):
    """Raised when no bone region can be located in a density profile."""


class DegenerateRocError(BonelineError, ValueError):
    """Raised when a ROC curve is requested for single-class data."""


class NotFoundError(BonelineError, KeyError):
    """Raised when a referenced image or line does not exist."""
