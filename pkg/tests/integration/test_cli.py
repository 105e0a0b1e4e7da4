"""Integration tests for the steinberg-lab command line"""
import csv
import io
import json

import pytest

from steinberg_lab import cli
from steinberg_lab.cli import EXIT_CAP, EXIT_FAILURES, EXIT_OK, EXIT_USAGE, build_parser, main

pytestmark = pytest.mark.integration


@pytest.fixture
def invoke(temp_dir, capsys, monkeypatch):
    """Run the CLI against a missing config file and capture its output"""
    monkeypatch.delenv("STEINBERG_LAB_CAP", raising=False)
    config = str(temp_dir / "none.yaml")

    def _invoke(*argv):
        code = main(["--config", config, *argv])
        out, err = capsys.readouterr()
        return code, out, err

    return _invoke


def _records(out):
    return [json.loads(line) for line in out.splitlines() if line]


def test_no_command_prints_help(capsys):
    """Test that running without a command shows usage"""
    assert main([]) == EXIT_OK
    assert "steinberg-lab" in capsys.readouterr().out


def test_every_action_has_a_parser():
    """Test that each command parses with each of its actions"""
    parser = build_parser()
    args = parser.parse_args(["steinberg", "dim", "--n", "2", "--q", "3"])
    assert (args.command, args.action, args.n, args.q) == ("steinberg", "dim", 2, 3)


def test_steinberg_dim(invoke):
    """Test St(GL_3(F_2)) has dimension 8"""
    code, out, _ = invoke("steinberg", "dim", "--n", "3", "--q", "2", "--seed", "1")
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["task"] == "steinberg.dim"
    assert record["verdicts"]["dim"] == 8
    assert record["seed"] == 1
    assert record["ok"]


def test_steinberg_irreducible_reducible_case(invoke):
    """Test the GL_2(F_3) module over F_2 is reducible with a line witness"""
    code, out, _ = invoke("steinberg", "irreducible", "--n", "2", "--q", "3", "--ell", "2")
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["verdicts"]["verdict"] == "reducible"
    assert record["verdicts"]["witness_dim"] == 1
    assert len(record["witnesses"]["subspace"]) == 1


def test_steinberg_gate_with_vector(invoke):
    """Test the gate on an explicit cycle of the GL_2(F_2) building"""
    code, out, _ = invoke("steinberg", "gate", "--n", "2", "--q", "2", "--ell", "3", "--vector", "1,2,0")
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["verdicts"]["value"] != "0"
    assert "walkthrough" in record["witnesses"]


def test_gate_vector_length_is_usage_error(invoke):
    """Test a wrong-length vector is a usage error"""
    code, _, err = invoke("steinberg", "gate", "--n", "2", "--q", "2", "--ell", "3", "--vector", "1,2")
    assert code == EXIT_USAGE
    assert "--vector" in err


def test_identity_verify(invoke):
    """Test the symmetric identity for n = 3"""
    code, out, _ = invoke("identity", "verify", "--n", "3")
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["verdicts"]["ok"]
    assert record["verdicts"]["sympy_agrees"]


def test_field_make(invoke):
    """Test the canonical modulus of F_8"""
    code, out, _ = invoke("field", "make", "--p", "2", "--e", "3")
    assert code == EXIT_OK
    assert _records(out)[0]["verdicts"]["modulus"] == [1, 1, 0, 1]


def test_cw_solve_from_json(invoke):
    """Test the solver on x1*x2 + x3*x4 over F_2"""
    poly = json.dumps({"vars": 4, "terms": [{"exps": [1, 1, 0, 0], "coeff": 1}, {"exps": [0, 0, 1, 1], "coeff": 1}]})
    code, out, _ = invoke("cw", "solve", "--p", "2", "--m", "4", "--poly", poly)
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["ok"]
    assert record["verdicts"]["zero"] == [1, 0, 0, 0]
    assert record["verdicts"]["common_zeros"] == 10


def test_bad_poly_json(invoke):
    """Test malformed polynomial JSON is a usage error"""
    code, _, err = invoke("cw", "solve", "--p", "2", "--m", "4", "--poly", "{not json")
    assert code == EXIT_USAGE
    assert "--poly" in err


def test_missing_parameter(invoke):
    """Test a missing required flag is a usage error"""
    code, _, err = invoke("steinberg", "dim", "--n", "2")
    assert code == EXIT_USAGE
    assert "--q" in err


def test_composite_field_order(invoke):
    """Test a non-prime-power q is a usage error"""
    code, _, _ = invoke("steinberg", "dim", "--n", "2", "--q", "6")
    assert code == EXIT_USAGE


def test_cap_exceeded(invoke):
    """Test a tiny group cap aborts with the cap exit code"""
    code, out, err = invoke("group", "enumerate", "--n", "3", "--q", "3", "--cap-group", "100")
    assert code == EXIT_CAP
    assert out == ""
    assert "cap exceeded" in err


def test_cap_from_environment(invoke, monkeypatch):
    """Test the cap environment variable reaches the actions"""
    monkeypatch.setenv("STEINBERG_LAB_CAP", "10")
    code, _, _ = invoke("steinberg", "dim", "--n", "3", "--q", "3")
    assert code == EXIT_CAP


def test_csv_format(invoke):
    """Test CSV output has a header and one row per record"""
    code, out, _ = invoke("group", "enumerate", "--n", "2", "--q", "3", "--which", "B", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["task", "ok", "seed", "params", "verdicts", "failures"]
    assert rows[1][0] == "group.enumerate"
    assert json.loads(rows[1][4])["order"] == 12


def test_text_format(invoke):
    """Test text output is one line per record"""
    code, out, _ = invoke("steinberg", "dim", "--n", "2", "--q", "5", "--format", "text")
    assert code == EXIT_OK
    assert out.startswith("steinberg.dim [ok]")
    assert "dim=5" in out


def test_timings(invoke):
    """Test timings are attached only on request"""
    _, out, _ = invoke("steinberg", "dim", "--n", "2", "--q", "2", "--timings")
    assert set(_records(out)[0]["timings"]) == {"elapsed_s", "rss_mb"}


def test_output_is_deterministic(invoke):
    """Test identical invocations print identical bytes"""
    argv = ("grpring", "coinv", "--group", "C_2xC_2", "--ell", "3", "--seed", "99")
    first = invoke(*argv)
    second = invoke(*argv)
    assert first[0] == EXIT_OK
    assert first[1] == second[1]


def test_grpring_counterexample(invoke):
    """Test the counterexample search across characteristic"""
    code, out, _ = invoke("grpring", "counterexample", "--n", "2", "--q", "2", "--ell", "3")
    assert code == EXIT_OK
    (record,) = _records(out)
    assert record["verdicts"]["found"]
    assert "ideal" in record["witnesses"]


def test_failure_exit_code(invoke, monkeypatch):
    """Test a failed check gives exit code 1 and a FAILED line"""
    def failing(rc, record):
        record.check(False, "forced failure")

    monkeypatch.setitem(cli.HANDLERS, ("steinberg", "dim"), failing)
    code, out, err = invoke("steinberg", "dim", "--n", "2", "--q", "2")
    assert code == EXIT_FAILURES
    assert "FAILED steinberg.dim: forced failure" in err
    assert not _records(out)[0]["ok"]
