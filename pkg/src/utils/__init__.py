"""Utility Functions and Configuration"""

from .config import Config, config
from .logger import setup_logger, configure_app_logging
from .errors import (
    SnsError,
    ConfigurationError,
    DualityError,
    ResolutionError,
    BallViolation,
    InsufficientData,
    AssumptionFailure,
    IntegrationFailure,
    IngestionError,
)
from .hashing import payload_hash, sha256_text, canonical_json

__all__ = [
    'Config', 'config', 'setup_logger', 'configure_app_logging',
    'SnsError', 'ConfigurationError', 'DualityError', 'ResolutionError',
    'BallViolation', 'InsufficientData', 'AssumptionFailure', 'IntegrationFailure',
    'IngestionError', 'payload_hash', 'sha256_text', 'canonical_json',
]
