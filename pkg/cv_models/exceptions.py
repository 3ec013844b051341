"""
Error hierarchy for the continuous-variable models
Every numerical layer raises one of these; the CLI maps them to exit codes
"""

from typing import Any, Optional


class LabError(Exception):
    """Base class for all errors raised by the lab"""


class InvalidDimensionError(LabError):
    """Fock truncation or subspace dimension out of range"""


class TruncationError(LabError):
    """State does not fit inside the requested Fock truncation"""

    def __init__(self, message: str, required_nmax: Optional[int] = None):
        super().__init__(message)
        self.required_nmax = required_nmax


class GridError(LabError):
    """Sampling grid too small or too coarse for the state"""

    def __init__(self, message: str, recommended_extent: Optional[float] = None):
        super().__init__(message)
        self.recommended_extent = recommended_extent


class NormalizationError(LabError):
    """Density or state is not normalized within tolerance"""


class WignerNegativeError(LabError):
    """Joint entropy requested for a Wigner function with negative regions"""

    def __init__(self, message: str, min_value: float):
        super().__init__(message)
        self.min_value = min_value


class UnphysicalCovarianceError(LabError):
    """Covariance matrix violates the uncertainty principle"""


class DegenerateCovarianceError(LabError):
    """Covariance matrix has (numerically) vanishing determinant"""


class WeightError(LabError):
    """Mixture weights are negative or do not sum to one"""


class DimensionMismatchError(LabError):
    """Operands live in differently truncated Fock spaces"""


class StateFormatError(LabError):
    """State file does not follow the documented JSON layout"""


class RelationViolation(LabError):
    """
    An experiment assertion failed

    Carries the offending state so the CLI can serialize it for replay.
    """

    def __init__(self, message: str, state: Any = None, verdict: Any = None):
        super().__init__(message)
        self.state = state
        self.verdict = verdict
