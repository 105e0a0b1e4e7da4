"""Steinberg Lab CLI entry point

Every action prints its report records on stdout (JSON lines by default) and
logs on stderr. Exit codes: 0 when every asserted check held, 1 when some
check failed, 2 for invalid parameters, 3 when a size cap was exceeded.
"""
import argparse
import csv
import io
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import psutil

from shared.models import ReportRecord, RunConfig
from shared.utils.config import OUTPUT_FORMATS, load_config, validate_config
from shared.utils.errors import CapExceededError, ConfigError, InvariantViolation
from shared.utils.log import setup_logging

from . import __version__
from .building import build_complex, homology_dims
from .cwsolver import (
    APolynomial,
    AdditiveSubgroup,
    PolyOverF,
    count_common_zeros,
    cw_solve,
    find_apoly_zero,
    random_system,
    substitute_linear,
    vanishing_extend,
)
from .exactfield import Field, field_make, field_of_order, primitive_element, trace_map
from .grpring import (
    NAMED_GROUPS,
    abelian_coinv_witness,
    aug_nilpotency,
    named_table,
    random_module,
    t_stable_counterexample,
    unique_maximal_check,
)
from .matgroup import (
    construct_positive_oneparam,
    elementary,
    enumerate_group,
    group_order,
    nilpotence_data,
    root_positions,
    simple_roots,
    subgroup_census,
    word_set_discover,
)
from .steinberg import build_module, gate, gl2_gate_walkthrough, is_irreducible, verify_witness
from .suites import SUITE_NAMES, SuiteContext, run_suite
from .symidentity import lemma_check, random_instance, verify_identity_symbolic, verify_identity_sympy

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2
EXIT_CAP = 3

# Groups with more elements are summarized by their order only
ELEMENT_LISTING_LIMIT = 64

ACTIONS = {
    "field": ("make", "trace"),
    "building": ("homology",),
    "steinberg": ("dim", "irreducible", "gate"),
    "group": ("enumerate", "oneparam", "census", "words"),
    "grpring": ("radical", "unique-max", "counterexample", "coinv"),
    "identity": ("verify", "lemma-check"),
    "cw": ("solve", "substitute", "apoly-zero", "extend"),
}

Handler = Callable[[RunConfig, ReportRecord], None]


def _require(rc: RunConfig, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(rc, name) is None]
    if missing:
        raise ConfigError(f"{rc.command} {rc.action} needs {', '.join(missing)}")


def _cap(rc: RunConfig, key: str) -> int:
    return int(rc.caps[key])


def _rng(rc: RunConfig) -> np.random.Generator:
    return np.random.default_rng(rc.seed)


def _parse_codes(text: str, f: Field) -> List[int]:
    """Comma-separated element texts ('01,1') as codes"""
    return [f.from_text(part).code for part in text.split(",") if part.strip()]


def _parse_polys(text: str, f: Field) -> List[PolyOverF]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--poly is not valid JSON: {e}") from e
    docs = data if isinstance(data, list) else [data]
    return [PolyOverF.from_json(f, doc) for doc in docs]


def _field(rc: RunConfig) -> Field:
    _require(rc, "p")
    return field_make(rc.p, rc.e or 1, _cap(rc, "field_order"))


def _field_of_q(rc: RunConfig) -> Field:
    return field_of_order(rc.q, _cap(rc, "field_order"))


# -- field -----------------------------------------------------------------------


def field_make_action(rc: RunConfig, record: ReportRecord) -> None:
    f = _field(rc)
    record.verdicts.update({"q": f.q, "modulus": list(f.modulus), "prime_field": f.is_prime_field})
    record.witnesses["primitive_element"] = str(primitive_element(f))


def field_trace_action(rc: RunConfig, record: ReportRecord) -> None:
    f = _field(rc)
    trace = trace_map(f)
    record.verdicts.update({"q": f.q, "values": list(trace.values), "kernel_dim": len(trace.kernel())})
    record.witnesses["kernel"] = [list(v) for v in trace.kernel()]


# -- building / steinberg ----------------------------------------------------------


def building_homology_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q")
    coeff = field_make(rc.ell or 2)
    c = build_complex(rc.n, rc.q, coeff, _cap(rc, "group_order"))
    dims = homology_dims(c)
    counts = [c.count(d) for d in range(-1, c.rank)]
    record.verdicts.update({"n": rc.n, "q": rc.q, "simplex_counts": counts, "homology_dims": dims})
    expected = rc.q ** (rc.n * (rc.n - 1) // 2)
    record.check(all(d == 0 for d in dims[:-1]), f"lower reduced homology is not zero: {dims}")
    record.check(dims[-1] == expected, f"top homology {dims[-1]} != {expected}")


def steinberg_dim_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q")
    module = build_module(rc.n, rc.q, rc.ell or 2, _cap(rc, "group_order"))
    record.verdicts["dim"] = module.dim
    record.check(module.dim == rc.q ** (rc.n * (rc.n - 1) // 2), "dimension differs from q^(n(n-1)/2)")


def steinberg_irreducible_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q", "ell")
    module = build_module(rc.n, rc.q, rc.ell, _cap(rc, "group_order"))
    result = is_irreducible(module, rc.seed, _cap(rc, "exhaustive_budget"), _cap(rc, "irreducible_dim"))
    data = result.to_dict()
    witness = data.pop("witness", None)
    record.verdicts.update({"dim": module.dim, **data})
    if witness is not None:
        record.witnesses["subspace"] = witness
        record.check(verify_witness(module, result.witness), "witness subspace failed re-verification")


def steinberg_gate_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q", "ell")
    module = build_module(rc.n, rc.q, rc.ell, _cap(rc, "group_order"))
    if "vector" in rc.options:
        coords = _parse_codes(rc.options["vector"], module.coeff)
        if len(coords) != module.chamber_count:
            raise ConfigError(f"--vector needs {module.chamber_count} chamber coefficients, got {len(coords)}")
        x = np.asarray(coords, dtype=np.int64)
    else:
        rng = _rng(rc)
        x = module.random_vector(rng)
        while not x.any():
            x = module.random_vector(rng)
    result = gate(x, module)
    record.verdicts.update(result.to_dict())
    record.witnesses["x"] = [module.coeff.to_text(int(v)) for v in x]
    if rc.n == 2:
        record.witnesses["walkthrough"] = gl2_gate_walkthrough(x, module).to_dict()


# -- groups -----------------------------------------------------------------------


def group_enumerate_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q")
    which = str(rc.options.get("which", "GL")).upper()
    f = _field_of_q(rc)
    elements = enumerate_group(which, rc.n, f, _cap(rc, "group_order"))
    record.verdicts.update({"which": which, "order": len(elements)})
    record.check(len(elements) == group_order(which, rc.n, f.q), "element count differs from the order formula")
    if len(elements) <= ELEMENT_LISTING_LIMIT:
        record.witnesses["elements"] = [g.to_text() for g in elements]


def group_oneparam_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n")
    gamma = construct_positive_oneparam(simple_roots(rc.n))
    record.verdicts.update({**gamma.to_dict(), "positive": gamma.is_positive()})
    record.check(gamma.is_positive(), "constructed cocharacter is not positive")


def group_census_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q")
    m = int(rc.options.get("m", 2))
    f = _field_of_q(rc)
    result = subgroup_census(rc.n, f, m, _cap(rc, "group_order"))
    record.verdicts.update(result.to_dict())
    for _, rep in result.classes:
        data = nilpotence_data(rep, _cap(rc, "closure_size"))
        record.check(data.nilpotency_class is not None, f"subgroup of order {rep.order} is not nilpotent")


def group_words_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q")
    m = int(rc.options.get("m", 2))
    result = word_set_discover(rc.n, _field_of_q(rc), m, _cap(rc, "group_order"))
    record.verdicts.update(result.to_dict())


# -- group rings -------------------------------------------------------------------


def _group_table(rc: RunConfig):
    name = rc.options.get("group")
    if name is None:
        raise ConfigError(f"grpring {rc.action} needs --group (one of {', '.join(NAMED_GROUPS)})")
    return named_table(name)


def grpring_radical_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "ell")
    table = _group_table(rc)
    report = aug_nilpotency(table, field_make(rc.ell))
    record.verdicts.update(report.to_dict())
    if report.characteristic_matches:
        record.check(report.nilpotent, f"augmentation ideal of F_{rc.ell}[{table.name}] is not nilpotent")
    else:
        record.check(not report.nilpotent, "augmentation ideal nilpotent in coprime characteristic")


def grpring_unique_max_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "ell")
    table = _group_table(rc)
    report = unique_maximal_check(table, field_make(rc.ell), rc.seed, _cap(rc, "exhaustive_budget"))
    record.verdicts.update(report.to_dict())
    record.check(report.passed, "a proper ideal with nonzero augmentation generated the unit ideal")


def grpring_counterexample_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n", "q", "ell")
    result = t_stable_counterexample(rc.n, rc.q, rc.ell, rc.seed, _cap(rc, "exhaustive_budget"))
    data = result.to_dict()
    for key in ("ideal", "generator"):
        if key in data:
            record.witnesses[key] = data.pop(key)
    record.verdicts.update(data)
    if result.found:
        record.check(all(result.checks.values()), f"counterexample checks failed: {result.checks}")


def grpring_coinv_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "ell")
    table = _group_table(rc)
    f = field_make(rc.ell)
    rng = _rng(rc)
    rho = random_module(table, f, 6, rng)
    m = rng.integers(0, f.q, size=rho[0].rows, dtype=np.int64)
    while not m.any():
        m = rng.integers(0, f.q, size=rho[0].rows, dtype=np.int64)
    witness = abelian_coinv_witness(table, rho, m)
    record.verdicts.update({"module_dim": rho[0].rows, **witness.to_dict()})
    record.witnesses["m"] = m.tolist()
    record.witnesses["generators"] = [rho[k].to_json() for k in table.generators]


# -- identities ---------------------------------------------------------------------


def identity_verify_action(rc: RunConfig, record: ReportRecord) -> None:
    _require(rc, "n")
    check = verify_identity_symbolic(rc.n)
    record.verdicts.update(check.to_dict())
    record.check(check.holds, f"identity fails for n={rc.n}")
    cross = verify_identity_sympy(rc.n)
    record.verdicts["sympy_agrees"] = cross
    record.check(cross, f"sympy expansion disagrees for n={rc.n}")


def identity_lemma_check_action(rc: RunConfig, record: ReportRecord) -> None:
    instance, vectors = random_instance(_rng(rc))
    result = lemma_check(instance, vectors)
    record.verdicts.update(result.to_dict())
    record.witnesses["instance"] = instance.to_dict()
    record.witnesses["m"] = [list(map(int, v)) for v in vectors]
    record.check(result.holds, "the generated submodule misses the target")


# -- Chevalley-Warning -----------------------------------------------------------------


def _system(rc: RunConfig) -> Tuple[List[PolyOverF], int]:
    _require(rc, "p")
    f = field_make(rc.p)
    if "poly" in rc.options:
        polys = _parse_polys(rc.options["poly"], f)
        m = int(rc.options.get("m", polys[0].nvars if polys else 0))
        return polys, m
    return random_system(rc.p, _rng(rc))


def _apoly(rc: RunConfig, f: Field) -> APolynomial:
    """--poly as a univariate phi (default phi = x) composed with the trace"""
    if "poly" in rc.options:
        phi = _parse_polys(rc.options["poly"], f)[0]
    else:
        phi = PolyOverF.variable(f, 1, 1)
    return APolynomial(phi, trace_map(f))


def cw_solve_action(rc: RunConfig, record: ReportRecord) -> None:
    polys, m = _system(rc)
    scan_cap = _cap(rc, "scan_size")
    point = cw_solve(polys, m, scan_cap)
    zeros = count_common_zeros(polys, m, scan_cap)
    record.verdicts.update({"m": m, "zero": list(point), "common_zeros": zeros})
    record.witnesses["polys"] = [h.to_json() for h in polys]
    record.check(zeros % rc.p == 0, f"{zeros} common zeros, not divisible by {rc.p}")


def cw_substitute_action(rc: RunConfig, record: ReportRecord) -> None:
    f = _field(rc)
    g = _apoly(rc, f)
    if "vectors" in rc.options:
        vectors = _parse_codes(rc.options["vectors"], f)
    else:
        vectors = [f.p**i for i in range(f.e)]
    h = substitute_linear(g, vectors)
    record.verdicts.update({"h": h.to_json(), "degree": h.degree, "phi_degree": g.degree})
    record.check(h.degree <= g.degree, "substituted degree exceeds deg phi")


def cw_apoly_zero_action(rc: RunConfig, record: ReportRecord) -> None:
    f = _field(rc)
    g = _apoly(rc, f)
    a = find_apoly_zero([g], AdditiveSubgroup.full(f), _cap(rc, "scan_size"))
    record.verdicts["zero"] = f.to_text(a)
    record.check(a != 0 and g(a) == 0, "returned element is not a nonzero zero")


def cw_extend_action(rc: RunConfig, record: ReportRecord) -> None:
    f = _field(rc)
    n = rc.n or 2
    if n < 2:
        raise ConfigError("cw extend needs --n >= 2")
    arity = n * (n - 1) // 2
    if "poly" in rc.options:
        phi = _parse_polys(rc.options["poly"], f)[0]
    else:
        phi = PolyOverF.variable(f, arity, root_positions(n).index((1, n)) + 1)
    g = APolynomial(phi, trace_map(f))
    s = [elementary(f, n, 1, n, 1)]
    gamma = construct_positive_oneparam(simple_roots(n))
    result = vanishing_extend(s, g, AdditiveSubgroup.zero(f), gamma, cap=_cap(rc, "closure_size"))
    record.verdicts.update(result.to_dict())
    if result.found:
        extended = AdditiveSubgroup.zero(f).extend(result.d)
        record.witnesses["subgroup"] = extended.to_json()


HANDLERS: Dict[Tuple[str, str], Handler] = {
    ("field", "make"): field_make_action,
    ("field", "trace"): field_trace_action,
    ("building", "homology"): building_homology_action,
    ("steinberg", "dim"): steinberg_dim_action,
    ("steinberg", "irreducible"): steinberg_irreducible_action,
    ("steinberg", "gate"): steinberg_gate_action,
    ("group", "enumerate"): group_enumerate_action,
    ("group", "oneparam"): group_oneparam_action,
    ("group", "census"): group_census_action,
    ("group", "words"): group_words_action,
    ("grpring", "radical"): grpring_radical_action,
    ("grpring", "unique-max"): grpring_unique_max_action,
    ("grpring", "counterexample"): grpring_counterexample_action,
    ("grpring", "coinv"): grpring_coinv_action,
    ("identity", "verify"): identity_verify_action,
    ("identity", "lemma-check"): identity_lemma_check_action,
    ("cw", "solve"): cw_solve_action,
    ("cw", "substitute"): cw_substitute_action,
    ("cw", "apoly-zero"): cw_apoly_zero_action,
    ("cw", "extend"): cw_extend_action,
}


def _new_record(rc: RunConfig, task: str) -> ReportRecord:
    return ReportRecord(task=task, params=rc.params(), seed=rc.seed, version=__version__)


def run(rc: RunConfig, config: Dict[str, Any]) -> List[ReportRecord]:
    """Dispatch one validated invocation

    Args:
        rc: Validated run configuration
        config: Loaded configuration (suite sample sizes)

    Returns:
        Report records in canonical order

    Raises:
        ConfigError: Missing or malformed action parameters
        CapExceededError: A size cap was exceeded
        ValueError: A domain precondition failed
    """
    if rc.command == "suite":
        ctx = SuiteContext(seed=rc.seed, caps=rc.caps, sizes=config.get("suites", {}), timings=rc.timings)
        return run_suite(rc.action, ctx)

    handler = HANDLERS.get((rc.command, rc.action))
    if handler is None:
        raise ConfigError(f"Unknown action: {rc.command} {rc.action}")
    record = _new_record(rc, f"{rc.command}.{rc.action}")
    started = time.perf_counter()
    try:
        handler(rc, record)
    except InvariantViolation as e:
        record.fail(f"invariant violated: {e}")
    if rc.timings:
        record.timings = {
            "elapsed_s": round(time.perf_counter() - started, 6),
            "rss_mb": round(psutil.Process().memory_info().rss / (1024 * 1024), 2),
        }
    return [record]


def format_records(records: Sequence[ReportRecord], output_format: str) -> str:
    """Render records as JSON lines, CSV or one text line each"""
    if output_format == "json":
        return "".join(record.to_json() + "\n" for record in records)

    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["task", "ok", "seed", "params", "verdicts", "failures"])
        for record in records:
            writer.writerow(
                [
                    record.task,
                    record.ok,
                    record.seed,
                    json.dumps(record.params, sort_keys=True),
                    json.dumps(record.verdicts, sort_keys=True),
                    "; ".join(record.failures),
                ]
            )
        return buffer.getvalue()

    if output_format == "text":
        lines = []
        for record in records:
            status = "ok" if record.ok else "FAIL"
            params = " ".join(f"{k}={v}" for k, v in sorted(record.params.items()))
            verdicts = " ".join(f"{k}={json.dumps(v, sort_keys=True)}" for k, v in sorted(record.verdicts.items()))
            lines.append(f"{record.task} [{status}] {params} :: {verdicts}".rstrip())
            lines.extend(f"  failure: {failure}" for failure in record.failures)
        return "".join(line + "\n" for line in lines)

    raise ConfigError(f"Unknown output format: {output_format}")


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="Matrix size n of GL_n")
    parser.add_argument("--q", type=int, help="Order of the building field F_q")
    parser.add_argument("--ell", type=int, help="Characteristic of the coefficient field F_ell")
    parser.add_argument("--p", type=int, help="Prime for field and solver actions")
    parser.add_argument("--e", type=int, help="Extension degree (default: 1)")
    parser.add_argument("--m", type=int, help="Generator count or variable count")
    parser.add_argument("--seed", type=int, help="64-bit seed (default: run.seed from config)")
    parser.add_argument("--cap-group", type=int, help="Override caps.group_order")
    parser.add_argument("--cap-scan", type=int, help="Override caps.scan_size")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format (default: run.format from config)")
    parser.add_argument("--timings", action="store_true", help="Attach elapsed time and RSS to each record")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per module and one sub-subcommand per action"""
    parser = argparse.ArgumentParser(
        prog="steinberg-lab",
        description="Steinberg Lab - exact experiments on Steinberg modules of GL_n over finite fields",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config",
        type=str,
        default="config.yaml",
        help="Path to configuration file (default: config.yaml)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for command, actions in ACTIONS.items():
        command_parser = subparsers.add_parser(command, help=f"{command} actions")
        action_parsers = command_parser.add_subparsers(dest="action", required=True)
        for action in actions:
            action_parser = action_parsers.add_parser(action)
            _add_common_arguments(action_parser)
            if (command, action) == ("group", "enumerate"):
                action_parser.add_argument("--which", choices=["GL", "B", "U", "T"], default="GL")
            if command == "grpring":
                action_parser.add_argument("--group", choices=NAMED_GROUPS, help="Group descriptor")
            if (command, action) == ("steinberg", "gate"):
                action_parser.add_argument("--vector", help="Comma-separated chamber coefficients")
            if command == "cw":
                action_parser.add_argument("--poly", help="Polynomial JSON document or list of documents")
            if (command, action) == ("cw", "substitute"):
                action_parser.add_argument("--vectors", help="Comma-separated F_p-independent elements")

    suite_parser = subparsers.add_parser("suite", help="Run a verification suite")
    suite_parser.add_argument("action", metavar="name", choices=SUITE_NAMES, help="Suite name")
    _add_common_arguments(suite_parser)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    try:
        config = load_config(args.config)
        validate_config(config)
        setup_logging(config)
        rc = RunConfig.from_args(args, config)
        rc.validate()
    except ConfigError as e:
        print(f"steinberg-lab: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        records = run(rc, config)
    except CapExceededError as e:
        logger.error(f"Cap exceeded: {e}")
        print(f"steinberg-lab: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, ZeroDivisionError) as e:
        logger.error(f"Invalid parameters: {e}")
        print(f"steinberg-lab: {e}", file=sys.stderr)
        return EXIT_USAGE

    sys.stdout.write(format_records(records, rc.output_format))
    failures = [f"{record.task}: {failure}" for record in records for failure in record.failures]
    for failure in failures:
        print(f"FAILED {failure}", file=sys.stderr)
    return EXIT_FAILURES if failures else EXIT_OK


__all__ = ["main", "run", "build_parser", "format_records", "HANDLERS", "ACTIONS"]
