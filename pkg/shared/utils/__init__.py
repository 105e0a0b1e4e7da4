"""Common utilities

This module provides shared utility functions for:
- Configuration loading and validation
- Logging setup
- Error types
"""
from .config import load_config, validate_config
from .errors import (
    CapExceededError,
    ConfigError,
    FieldMismatchError,
    InvariantViolation,
    SteinbergLabError,
)
from .log import setup_logging

__all__ = [
    "load_config",
    "validate_config",
    "setup_logging",
    "SteinbergLabError",
    "ConfigError",
    "CapExceededError",
    "FieldMismatchError",
    "InvariantViolation",
]
