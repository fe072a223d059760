"""Exception hierarchy shared by the simulator and the command surface"""

from typing import Any, Dict, Optional


class SnsError(Exception):
    """Base class for all simulator errors"""

    exit_code = 1


class ConfigurationError(SnsError):
    """Invalid arguments for an operation (bad dimension, order, horizon, ...)"""
    pass


class DualityError(SnsError):
    """A primal quantity was requested on a dual element, or vice versa"""
    pass


class ResolutionError(SnsError):
    """Quadrature grid too coarse for the retained wavenumbers"""
    pass


class BallViolation(SnsError):
    """Path leaves the H-ball on which the weak-ball metric is defined"""
    pass


class InsufficientData(SnsError):
    """Empty ensembles, too few levels, too many brute-force breakpoints"""
    pass


class AssumptionFailure(SnsError):
    """A noise or data assumption failed on a witness"""

    exit_code = 2

    def __init__(self, assumption: str, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(f"{assumption}: {message}")
        self.assumption = assumption
        self.witness = witness or {}


class IntegrationFailure(SnsError):
    """Time integration produced a non-finite state"""

    exit_code = 3

    def __init__(self, message: str, last_good_time: float):
        super().__init__(f"{message} (last good time {last_good_time:.6g})")
        self.last_good_time = last_good_time


class IngestionError(SnsError):
    """Malformed configuration, missing artifact or provenance mismatch"""

    exit_code = 4
