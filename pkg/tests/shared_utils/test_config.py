"""Unit tests for configuration loading, validation and logging setup"""
import logging

import pytest
import yaml

from shared.utils.config import CAP_ENV_VAR, DEFAULT_CONFIG, load_config, validate_config
from shared.utils.errors import CapExceededError, ConfigError, InvariantViolation, SteinbergLabError
from shared.utils.log import setup_logging


def test_missing_file_gives_defaults(temp_dir, monkeypatch):
    """Test that a missing config file falls back to the defaults"""
    monkeypatch.delenv(CAP_ENV_VAR, raising=False)
    config = load_config(str(temp_dir / "absent.yaml"))
    assert config["caps"] == DEFAULT_CONFIG["caps"]
    assert config["run"]["format"] == "json"


def test_file_overrides_defaults(temp_dir, monkeypatch):
    """Test that YAML values are merged over the defaults"""
    monkeypatch.delenv(CAP_ENV_VAR, raising=False)
    path = temp_dir / "config.yaml"
    path.write_text(yaml.safe_dump({"caps": {"scan_size": 1000}, "run": {"seed": 7}}))

    config = load_config(str(path))

    assert config["caps"]["scan_size"] == 1000
    assert config["caps"]["group_order"] == DEFAULT_CONFIG["caps"]["group_order"]
    assert config["run"]["seed"] == 7
    assert DEFAULT_CONFIG["caps"]["scan_size"] == 10_000_000


def test_non_mapping_file_rejected(temp_dir):
    """Test that a YAML list at the root is refused"""
    path = temp_dir / "config.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_cap_environment_override(monkeypatch):
    """Test that the cap variable overrides every cap"""
    monkeypatch.setenv(CAP_ENV_VAR, "500")
    config = load_config(None)
    assert set(config["caps"].values()) == {500}


def test_bad_cap_environment(monkeypatch):
    """Test that a non-integer cap variable is a config error"""
    monkeypatch.setenv(CAP_ENV_VAR, "lots")
    with pytest.raises(ConfigError):
        load_config(None)


def test_validate_defaults(sample_config):
    """Test that the default configuration validates"""
    assert validate_config(sample_config)


def test_validate_reports_every_problem(sample_config):
    """Test that validation lists all invalid entries"""
    sample_config["caps"]["scan_size"] = 0
    sample_config["run"]["format"] = "xml"
    with pytest.raises(ConfigError) as excinfo:
        validate_config(sample_config)
    assert "caps.scan_size" in str(excinfo.value)
    assert "run.format" in str(excinfo.value)


def test_validate_seed_range(sample_config):
    """Test that seeds must fit in 64 bits"""
    sample_config["run"]["seed"] = 2**64
    with pytest.raises(ConfigError):
        validate_config(sample_config)


def test_setup_logging_with_file(temp_dir, sample_config):
    """Test that a log file handler is created on request"""
    sample_config["logging"] = {"level": "INFO", "file": str(temp_dir / "logs" / "lab.log")}
    setup_logging(sample_config)
    logging.getLogger("steinberg_lab.test").info("hello")
    assert (temp_dir / "logs" / "lab.log").exists()
    setup_logging({"logging": {"level": "WARNING"}})


def test_error_hierarchy():
    """Test that lab errors are also builtin errors"""
    error = CapExceededError("scan_size", 10, 5)
    assert isinstance(error, ValueError)
    assert isinstance(error, SteinbergLabError)
    assert error.what == "scan_size"
    assert "requested 10" in str(error)
    assert isinstance(InvariantViolation("x"), AssertionError)
