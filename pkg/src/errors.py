"""
errors.py

Exception hierarchy shared by the lab modules. The command line maps these to
exit codes (see main.py).
"""


class LabError(Exception):
    """Base class for every error raised by the lab."""


class DimensionError(LabError, ValueError):
    """Operands have incompatible shapes."""


class ToleranceError(LabError):
    """A numerical residual exceeded its tolerance."""

    def __init__(self, message, residual=None, tolerance=None):
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance


class InputError(LabError, ValueError):
    """Malformed file, literal or configuration value."""


class ScenarioError(LabError):
    """A preset construction cannot be built with the given parameters."""
