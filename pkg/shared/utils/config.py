"""Configuration management

This module provides configuration loading, environment overrides and
validation. Values are merged in the order: built-in defaults, YAML file,
environment, command-line flags (the last one is applied by the CLI).
"""
import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

CAP_ENV_VAR = "STEINBERG_LAB_CAP"
LOG_LEVEL_ENV_VAR = "STEINBERG_LAB_LOG_LEVEL"

OUTPUT_FORMATS = ("json", "csv", "text")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEFAULT_CONFIG: Dict[str, Any] = {
    "caps": {
        "group_order": 1_000_000,
        "scan_size": 10_000_000,
        "field_order": 1 << 16,
        "closure_size": 100_000,
        "exhaustive_budget": 1 << 20,
        "irreducible_dim": 256,
    },
    "run": {
        "seed": 20240601,
        "format": "json",
    },
    "logging": {
        "level": "WARNING",
        "file": None,
        "max_size_mb": 10,
        "backup_count": 3,
    },
    "performance": {
        "max_memory_mb": 2000,
    },
    "suites": {
        "random_vectors": 100,
        "gate_samples": 500,
        "identity_specializations": 1000,
        "lemma_instances": 100,
        "cw_systems": 100,
        "positivity_samples": 1000,
        "coinvariant_modules": 100,
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base"""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = "config.yaml") -> Dict[str, Any]:
    """Load configuration from YAML file

    Args:
        config_path: Path to config file; None skips the file entirely

    Returns:
        Configuration dictionary merged over the defaults, with environment
        overrides applied

    Raises:
        ConfigError: If the file exists but is not a YAML mapping
    """
    file_config: Dict[str, Any] = {}

    if config_path is not None:
        config_file = Path(config_path)
        if config_file.exists():
            try:
                with open(config_file, "r") as f:
                    loaded = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in {config_path}: {e}") from e
            if loaded is not None and not isinstance(loaded, dict):
                raise ConfigError(f"Configuration root must be a mapping: {config_path}")
            file_config = loaded or {}
        else:
            logger.warning(f"Configuration file not found: {config_path}; using defaults")

    config = _merge(DEFAULT_CONFIG, file_config)
    apply_env_overrides(config)
    return config


def apply_env_overrides(config: Dict[str, Any]) -> None:
    """Apply STEINBERG_LAB_* environment overrides in place"""
    cap_value = os.environ.get(CAP_ENV_VAR)
    if cap_value:
        try:
            cap = int(cap_value)
        except ValueError as e:
            raise ConfigError(f"{CAP_ENV_VAR} must be an integer, got {cap_value!r}") from e
        for key in config["caps"]:
            config["caps"][key] = cap
        logger.info(f"All caps overridden to {cap} from {CAP_ENV_VAR}")

    level = os.environ.get(LOG_LEVEL_ENV_VAR)
    if level:
        config["logging"]["level"] = level.upper()


def validate_config(config: Dict[str, Any]) -> bool:
    """Validate configuration

    Args:
        config: Configuration dictionary

    Returns:
        True if valid

    Raises:
        ConfigError: Listing every invalid entry
    """
    problems: List[str] = []

    for key, value in config.get("caps", {}).items():
        if not isinstance(value, int) or value <= 0:
            problems.append(f"caps.{key} must be a positive integer (got {value!r})")

    run = config.get("run", {})
    if run.get("format") not in OUTPUT_FORMATS:
        problems.append(f"run.format must be one of {OUTPUT_FORMATS} (got {run.get('format')!r})")
    seed = run.get("seed")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        problems.append(f"run.seed must be a 64-bit non-negative integer (got {seed!r})")

    level = str(config.get("logging", {}).get("level", "")).upper()
    if level not in LOG_LEVELS:
        problems.append(f"logging.level must be one of {LOG_LEVELS} (got {level!r})")

    for key, value in config.get("suites", {}).items():
        if not isinstance(value, int) or value < 0:
            problems.append(f"suites.{key} must be a non-negative integer (got {value!r})")

    if problems:
        raise ConfigError("; ".join(problems))
    return True


__all__ = [
    "DEFAULT_CONFIG",
    "CAP_ENV_VAR",
    "OUTPUT_FORMATS",
    "load_config",
    "apply_env_overrides",
    "validate_config",
]
