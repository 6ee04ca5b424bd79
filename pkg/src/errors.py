"""
Exception hierarchy. Every error carries the CLI exit code it maps to.
"""

from typing import Optional


class CrystalLabError(Exception):
    """Base class for all lab errors."""

    exit_code: int = 1


class ConfigurationError(CrystalLabError, ValueError):
    """Invalid input, parameters or configuration."""

    exit_code = 2


class ResourceLimitError(CrystalLabError):
    """A configured size cap would be exceeded."""

    exit_code = 3


class CheckFailedError(CrystalLabError):
    """A numerical check did not hold."""

    exit_code = 1


class NearDuplicateAtomError(ConfigurationError):
    """Two distinct atom locations are closer than the merge tolerance."""


class SingularLatticeError(ConfigurationError):
    """The lattice basis is (numerically) singular."""


class NotTranslationBoundedError(CheckFailedError):
    """The measure does not look translation bounded on its window."""


class ConvolutionMismatchError(CheckFailedError):
    """Two evaluation routes of mu * phi-hat disagree."""


class PoissonGateError(CheckFailedError):
    """The generalized Poisson formula failed for a spec."""


class QuadratureError(CheckFailedError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved
