"""Integration tests for the verification suites"""
import pytest

from steinberg_lab.cli import EXIT_OK, main
from steinberg_lab.suites import SUITE_NAMES, SUITES, SuiteContext, run_suite

pytestmark = pytest.mark.integration

FAST_SUITES = ["apartment", "equivariance", "gl2-matrix", "grpring", "symidentity", "census", "cw", "coinvariants"]


@pytest.fixture
def ctx(sample_config):
    return SuiteContext(seed=7, caps=sample_config["caps"], sizes=sample_config["suites"])


@pytest.mark.parametrize("name", FAST_SUITES)
def test_suite_rows_pass(name, ctx):
    """Test every row of a suite holds"""
    records = run_suite(name, ctx)
    assert records
    for record in records:
        assert record.ok, f"{record.task} {record.params}: {record.failures}"
        assert record.seed == 7
        assert record.task.startswith("suite.")


@pytest.mark.slow
@pytest.mark.parametrize("name", ["solomon-tits", "gate", "positivity"])
def test_slow_suite_rows_pass(name, ctx):
    """Test the heavier suites"""
    assert all(record.ok for record in run_suite(name, ctx))


def test_suite_is_deterministic(ctx):
    """Test a seeded suite reproduces its records"""
    first = [record.to_json() for record in run_suite("cw", ctx)]
    second = [record.to_json() for record in run_suite("cw", ctx)]
    assert first == second


def test_suite_registry():
    """Test 'all' runs every registered suite"""
    assert SUITE_NAMES[-1] == "all"
    assert set(SUITE_NAMES[:-1]) == set(SUITES)


def test_unknown_suite(ctx):
    """Test an unknown suite name is rejected"""
    with pytest.raises(ValueError):
        run_suite("nonexistent", ctx)


def test_suite_through_cli(temp_dir, capsys, monkeypatch):
    """Test the suite command prints one JSON line per row"""
    monkeypatch.delenv("STEINBERG_LAB_CAP", raising=False)
    config = temp_dir / "config.yaml"
    config.write_text("suites:\n  cw_systems: 2\n")
    code = main(["--config", str(config), "suite", "cw", "--seed", "3", "--timings"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    lines = [line for line in out.splitlines() if line]
    assert len(lines) == 6
    assert all('"timings"' in line for line in lines)
