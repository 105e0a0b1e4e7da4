"""Unit tests for the run configuration and report record models"""
import argparse
import json

import pytest

from shared.models import ReportRecord, RunConfig
from shared.utils.errors import ConfigError


def _namespace(**kwargs):
    values = {"command": "steinberg", "action": "dim", "n": 2, "q": 3, "ell": None, "p": None, "e": None}
    values.update(kwargs)
    return argparse.Namespace(**values)


def test_from_args_uses_config_fallbacks(sample_config):
    """Test that unset flags fall back to the configuration"""
    rc = RunConfig.from_args(_namespace(seed=None, format=None), sample_config)
    assert rc.seed == sample_config["run"]["seed"]
    assert rc.output_format == "json"
    assert rc.caps == sample_config["caps"]


def test_from_args_flags_win(sample_config):
    """Test that command-line flags override the configuration"""
    args = _namespace(seed=5, format="csv", cap_group=100, cap_scan=200, m=4, timings=True)
    rc = RunConfig.from_args(args, sample_config)
    assert rc.seed == 5
    assert rc.output_format == "csv"
    assert rc.caps["group_order"] == 100
    assert rc.caps["scan_size"] == 200
    assert rc.options == {"m": 4}
    assert rc.timings
    assert rc.params() == {"n": 2, "q": 3, "m": 4}


@pytest.mark.parametrize(
    "changes",
    [{"n": 0}, {"q": 1}, {"ell": 1}, {"seed": -1}, {"output_format": "xml"}],
)
def test_validate_rejects(changes):
    """Test that out-of-range parameters are config errors"""
    rc = RunConfig(command="steinberg", action="dim", n=2, q=3)
    for key, value in changes.items():
        setattr(rc, key, value)
    with pytest.raises(ConfigError):
        rc.validate()


def test_record_checks():
    """Test that failed checks are collected"""
    record = ReportRecord(task="steinberg.dim", params={"n": 2})
    assert record.check(True, "never shown")
    assert not record.check(False, "dimension mismatch")
    assert not record.ok
    assert record.failures == ["dimension mismatch"]


def test_record_json_is_stable():
    """Test that serialization sorts keys and omits absent timings"""
    record = ReportRecord(task="field.make", params={"q": 4, "p": 2}, verdicts={"q": 4}, seed=1, version="0.1.0")
    line = record.to_json()
    assert line == json.dumps(json.loads(line), sort_keys=True, separators=(",", ":"))
    assert "timings" not in json.loads(line)
    assert ReportRecord.from_dict(json.loads(line)).to_dict() == record.to_dict()


def test_record_timings():
    """Test that timings appear once set"""
    record = ReportRecord(task="suite.gate", params={}, timings={"elapsed_s": 0.5})
    assert record.to_dict()["timings"] == {"elapsed_s": 0.5}
