"""Verification suites

Each suite returns one ReportRecord per row, in canonical row order. Rows
that break an asserted property record a failure instead of raising, so a
suite always reports every row; cap violations still propagate.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import psutil

from shared.models import ReportRecord
from shared.utils.errors import InvariantViolation

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
    usa_group,
    vanishing_extend,
)
from .exactfield import field_make, field_of_order, trace_map
from .exactlinalg import MatrixOverField, Subspace
from .grpring import (
    abelian_coinv_witness,
    aug_nilpotency,
    coinvariants,
    index_p_subgroups,
    named_table,
    random_module,
    t_stable_counterexample,
    unique_maximal_check,
)
from .matgroup import (
    UnipotentElement,
    construct_positive_oneparam,
    elementary,
    enumerate_group,
    monoid_act,
    nilpotence_data,
    one_param_positive,
    root_factorize,
    root_reconstruct,
    simple_roots,
    subgroup_census,
    torus_conjugate,
    word_set_discover,
)
from .steinberg import build_module, check_equivariance, gate, iota, iota_inverse, is_irreducible
from .symidentity import (
    ModuleInstance,
    check_identity_range,
    lemma_check,
    psi_instance,
    random_instance,
    random_specialization,
    specialize,
)

logger = logging.getLogger(__name__)

SOLOMON_TITS_CASES = [(2, 2), (2, 3), (2, 5), (2, 7), (3, 2), (3, 3)]
SOLOMON_TITS_FIELDS = [2, 3, 5, 7]
APARTMENT_CASES = [(2, 2), (2, 3), (2, 5), (3, 2)]
EQUIVARIANCE_CASES = [(2, 3, 2), (3, 2, 3)]
GATE_CASES = [(2, 3, 2), (2, 2, 3), (3, 2, 3)]
GATE_EXHAUSTIVE_BUDGET = 1 << 16
GL2_GRID_Q = [2, 3, 5]
GL2_GRID_ELL = [2, 3, 5, 7]
GRPRING_CASES = [("C_2", 2), ("C_2xC_2", 2), ("U_3(F_2)", 2), ("C_3", 3), ("U_2(F_3)", 3)]
COINVARIANT_CASES = [("C_2", 3), ("C_2xC_2", 3), ("C_3", 2)]
CW_PRIMES = [2, 3, 5]


@dataclass
class SuiteContext:
    """Shared settings for one suite run

    Attributes:
        seed: Master seed; each row derives its own generator from it
        caps: Size caps from the configuration
        sizes: Sample counts from the `suites` configuration section
        timings: Attach elapsed time and RSS to each record
    """

    seed: int
    caps: Dict[str, int] = field(default_factory=dict)
    sizes: Dict[str, int] = field(default_factory=dict)
    timings: bool = False

    def rng(self, *salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, *salt])

    def size(self, key: str, default: int) -> int:
        return int(self.sizes.get(key, default))

    def cap(self, key: str, default: int) -> int:
        return int(self.caps.get(key, default))

    def record(self, task: str, params: Dict[str, Any]) -> ReportRecord:
        return ReportRecord(task=task, params=params, seed=self.seed, version=__version__)


def _finish(ctx: SuiteContext, record: ReportRecord, started: float) -> ReportRecord:
    if ctx.timings:
        record.timings = {
            "elapsed_s": round(time.perf_counter() - started, 6),
            "rss_mb": round(psutil.Process().memory_info().rss / (1024 * 1024), 2),
        }
    status = "ok" if record.ok else f"{len(record.failures)} failures"
    logger.info(f"{record.task} {record.params}: {status}")
    return record


def _guarded(record: ReportRecord, body: Callable[[], None]) -> None:
    try:
        body()
    except InvariantViolation as e:
        record.fail(f"invariant violated: {e}")


# -- building ------------------------------------------------------------------


def suite_solomon_tits(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    for n, q in SOLOMON_TITS_CASES:
        started = time.perf_counter()
        record = ctx.record("suite.solomon-tits", {"n": n, "q": q})
        expected = q ** (n * (n - 1) // 2)

        def body():
            dims = {}
            for ell in SOLOMON_TITS_FIELDS:
                homology = homology_dims(build_complex(n, q, field_make(ell), ctx.cap("group_order", 1_000_000)))
                dims[str(ell)] = homology
                record.check(all(d == 0 for d in homology[:-1]), f"F_{ell}: nonzero lower homology {homology}")
                record.check(homology[-1] == expected, f"F_{ell}: top homology {homology[-1]} != {expected}")
            record.verdicts["homology"] = dims
            record.verdicts["dim"] = expected

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


# -- Steinberg module ----------------------------------------------------------


def suite_apartment(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    samples = ctx.size("random_vectors", 100)
    for row, (n, q) in enumerate(APARTMENT_CASES):
        ell = 3
        started = time.perf_counter()
        record = ctx.record("suite.apartment", {"n": n, "q": q, "ell": ell})

        def body():
            module = build_module(n, q, ell)
            record.verdicts["dim"] = module.dim
            record.verdicts["chambers"] = module.chamber_count
            record.check(module.dim == len(module.unipotent), "apartment basis size differs from |U|")
            for k in range(module.dim):
                x = module.apartment[k]
                image = iota(x, module)
                record.check(np.array_equal(iota_inverse(image, module), x), f"iota^-1 iota differs on basis vector {k}")
                record.check(image.terms == {k: 1}, f"iota(u_{k} A_0) is not [u_{k}]")
            for k in range(module.dim):
                x = module.kernel.basis[k]
                record.check(np.array_equal(iota_inverse(iota(x, module), module), x), f"round trip fails on kernel vector {k}")
            rng = ctx.rng(row)
            for _ in range(samples):
                x = module.random_vector(rng)
                record.check(np.array_equal(iota_inverse(iota(x, module), module), x), "round trip fails on a random vector")
            record.verdicts["vectors_checked"] = 2 * module.dim + samples

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


def suite_equivariance(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    for n, q, ell in EQUIVARIANCE_CASES:
        started = time.perf_counter()
        record = ctx.record("suite.equivariance", {"n": n, "q": q, "ell": ell})

        def body():
            report = check_equivariance(build_module(n, q, ell))
            record.verdicts.update(report.to_dict())
            for failure in report.failures:
                record.fail(failure)

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


def suite_gate(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    for row, (n, q, ell) in enumerate(GATE_CASES):
        started = time.perf_counter()
        record = ctx.record("suite.gate", {"n": n, "q": q, "ell": ell})

        def body():
            module = build_module(n, q, ell)
            exhaustive = ell**module.dim <= GATE_EXHAUSTIVE_BUDGET
            if exhaustive:
                vectors = module.vectors()
            else:
                rng = ctx.rng(row)
                vectors = (module.random_vector(rng) for _ in range(ctx.size("gate_samples", 500)))
            checked = 0
            for x in vectors:
                if not x.any():
                    continue
                result = gate(x, module)
                moved = module.act(result.g, x)
                record.check(not iota(moved, module).augmentation().is_zero(), f"gate value vanishes at chamber {result.chamber}")
                checked += 1
            record.verdicts.update({"dim": module.dim, "exhaustive": exhaustive, "vectors_checked": checked})

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


def suite_gl2_matrix(ctx: SuiteContext) -> List[ReportRecord]:
    """Irreducibility of St(GL_2(F_q); F_ell), plus St(GL_3(F_2); F_2)"""
    records = []
    cells = [(2, q, ell) for q in GL2_GRID_Q for ell in GL2_GRID_ELL] + [(3, 2, 2)]
    for n, q, ell in cells:
        started = time.perf_counter()
        record = ctx.record("suite.gl2-matrix", {"n": n, "q": q, "ell": ell})

        def body():
            module = build_module(n, q, ell)
            result = is_irreducible(
                module,
                ctx.seed,
                ctx.cap("exhaustive_budget", 1 << 20),
                ctx.cap("irreducible_dim", 256),
            )
            expected_reducible = n == 2 and (q + 1) % ell == 0
            record.verdicts.update(result.to_dict())
            record.verdicts["dim"] = module.dim
            record.check(result.irreducible != expected_reducible, f"verdict {result.to_dict()['verdict']} unexpected")
            if not result.irreducible:
                record.witnesses["witness"] = result.to_dict().get("witness")

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


# -- group rings ---------------------------------------------------------------


def suite_grpring(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    for row, (name, ell) in enumerate(GRPRING_CASES):
        started = time.perf_counter()
        record = ctx.record("suite.grpring", {"group": name, "ell": ell})

        def body():
            table = named_table(name)
            f = field_make(ell)
            nil = aug_nilpotency(table, f)
            record.verdicts["nilpotency"] = nil.to_dict()
            record.check(nil.nilpotent and nil.index <= table.order, f"augmentation ideal not nilpotent within {table.order}")
            unique = unique_maximal_check(table, f, ctx.seed + row)
            record.verdicts["unique_maximal"] = unique.to_dict()
            record.check(unique.passed and unique.exhaustive, "unique-maximal check failed or was not exhaustive")

        _guarded(record, body)
        records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.grpring", {"group": "C_2", "ell": 3})
    nil = aug_nilpotency(named_table("C_2"), field_make(3))
    record.verdicts["nilpotency"] = nil.to_dict()
    record.check(not nil.nilpotent, "F_3[C_2] augmentation ideal reported nilpotent")
    records.append(_finish(ctx, record, started))

    for n, q, ell, expect in [(2, 2, 3, True), (2, 2, 2, False)]:
        started = time.perf_counter()
        record = ctx.record("suite.grpring.counterexample", {"n": n, "q": q, "ell": ell})

        def body():
            result = t_stable_counterexample(n, q, ell, ctx.seed)
            record.verdicts.update(result.to_dict())
            record.check(result.found == expect, f"found={result.found}, expected {expect}")
            if expect and result.found:
                record.check(result.ideal.dim == 1, f"ideal dimension {result.ideal.dim} != 1")
                record.check(result.epsilon.code == 2, f"augmentation {result.epsilon} != 2")

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


def suite_coinvariants(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    modules = ctx.size("coinvariant_modules", 100)
    for row, (name, ell) in enumerate(COINVARIANT_CASES):
        started = time.perf_counter()
        record = ctx.record("suite.coinvariants", {"group": name, "ell": ell})

        def body():
            table = named_table(name)
            f = field_make(ell)
            candidates = [tuple(range(table.order))] + index_p_subgroups(table)
            rng = ctx.rng(row)
            witnessed = 0
            for k in range(modules):
                rho = random_module(table, f, 6, rng)
                dim = rho[0].rows
                # m has no witness iff it lies in every kernel of M -> M_H
                dead = Subspace.full(f, dim)
                for sub in candidates:
                    dead = dead & coinvariants([rho[h] for h in sub], dim, f).subspace
                record.check(dead.dim == 0, f"module {k}: {dead.dim}-dimensional space without witnesses")
                m = rng.integers(0, f.q, size=dim, dtype=np.int64)
                if m.any():
                    witness = abelian_coinv_witness(table, rho, m)
                    record.check(len(witness.image) > 0 and any(witness.image), f"module {k}: empty witness image")
                    witnessed += 1
            record.verdicts.update({"modules": modules, "sampled_witnesses": witnessed, "subgroups": len(candidates)})

        _guarded(record, body)
        records.append(_finish(ctx, record, started))
    return records


# -- identities and positivity -------------------------------------------------


def suite_symidentity(ctx: SuiteContext) -> List[ReportRecord]:
    records = []

    started = time.perf_counter()
    record = ctx.record("suite.symidentity.symbolic", {"n_max": 8})
    _guarded(record, lambda: record.verdicts.update({"holds": {str(n): ok for n, ok in check_identity_range(8).items()}}))
    records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    count = ctx.size("identity_specializations", 1000)
    record = ctx.record("suite.symidentity.specialize", {"cases": count})
    rng = ctx.rng(1)
    agree = 0
    for _ in range(count):
        n, z, m = random_specialization(rng)
        lhs, rhs = specialize(n, z, m)
        if record.check(lhs == rhs, f"specialization differs at n={n}"):
            agree += 1
    record.verdicts["agree"] = agree
    records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    count = ctx.size("lemma_instances", 100)
    record = ctx.record("suite.symidentity.lemma", {"instances": count})
    rng = ctx.rng(2)
    passed = 0
    example = lemma_check(ModuleInstance(7, [[[2]], [[3]]]), [[1], [1]])
    record.check(example.holds, "mod 7 example fails")
    for k in range(count):
        instance, m_vectors = random_instance(rng)
        if record.check(lemma_check(instance, m_vectors).holds, f"instance {k} fails"):
            passed += 1
    for p, lambdas, coeffs, ell in [(3, [1, 2], [1, 1], 5), (5, [1, 2, 3], [1, 2, 1], 3)]:
        instance, m_vectors = psi_instance(p, lambdas, coeffs, ell)
        record.check(lemma_check(instance, m_vectors).holds, f"group-ring instance p={p}, ell={ell} fails")
    record.verdicts["passed"] = passed
    records.append(_finish(ctx, record, started))
    return records


def _random_unipotent(f, n: int, rng: np.random.Generator) -> UnipotentElement:
    entries = np.eye(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            entries[i, j] = int(rng.integers(0, f.q))
    return UnipotentElement(MatrixOverField(f, entries))


def _check_positivity(record: ReportRecord, u: UnipotentElement, a: int) -> None:
    f, n = u.owner, u.n
    gamma = one_param_positive(n)
    image = monoid_act(a, u, gamma)
    if a == 0:
        record.check(image.is_identity(), f"0.u is not the identity for {u.to_text()}")
        return
    for i in range(n):
        for j in range(i + 1, n):
            scaled = f.mul(int(u.entries[i, j]), f.power(a, gamma.exponents[i] - gamma.exponents[j]))
            if int(image.entries[i, j]) != scaled:
                record.fail(f"entry ({i + 1},{j + 1}) of {a}.{u.to_text()} not scaled by a^(j-i)")
                return
    record.check(image == torus_conjugate(gamma.at(f(a)), u), f"{a}.{u.to_text()} differs from conjugation")


def suite_positivity(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    for n in (2, 3):
        for q in (2, 3, 4, 5):
            started = time.perf_counter()
            record = ctx.record("suite.positivity", {"n": n, "q": q})
            f = field_of_order(q)

            def body():
                unipotent = enumerate_group("U", n, f)
                coordinates = set()
                for u in unipotent:
                    coords = root_factorize(u)
                    coordinates.add(tuple(sorted((k, c.code) for k, c in coords.items())))
                    record.check(root_reconstruct(f, n, coords) == u, f"reconstruction fails for {u.to_text()}")
                    for a in range(q):
                        _check_positivity(record, u, a)
                record.check(len(coordinates) == len(unipotent), "root coordinates are not injective")
                record.verdicts["elements"] = len(unipotent)

            _guarded(record, body)
            records.append(_finish(ctx, record, started))

    samples = ctx.size("positivity_samples", 1000)
    for n in (4, 5):
        started = time.perf_counter()
        record = ctx.record("suite.positivity", {"n": n, "q": 2, "samples": samples})
        f = field_make(2)
        rng = ctx.rng(n)

        def sampled():
            for _ in range(samples):
                u = _random_unipotent(f, n, rng)
                record.check(root_reconstruct(f, n, root_factorize(u)) == u, f"reconstruction fails for {u.to_text()}")
                _check_positivity(record, u, int(rng.integers(0, 2)))

        _guarded(record, sampled)
        records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.positivity.oneparam", {"n_max": 6})
    for n in range(2, 7):
        gamma = construct_positive_oneparam(simple_roots(n))
        standard = one_param_positive(n).exponents
        shift = gamma.exponents[-1] - standard[-1]
        record.check(
            tuple(a - shift for a in gamma.exponents) == standard,
            f"n={n}: {gamma.exponents} is not (n,...,1) up to a central shift",
        )
        record.check(gamma.is_positive(), f"n={n}: {gamma.exponents} is not positive")
    records.append(_finish(ctx, record, started))
    return records


# -- subgroup census -----------------------------------------------------------


def suite_census(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    f = field_make(2)
    cap = ctx.cap("group_order", 1_000_000)

    started = time.perf_counter()
    record = ctx.record("suite.census", {"n": 3, "q": 2, "m": 2})

    def census():
        result = subgroup_census(3, f, 2, cap)
        record.verdicts.update(result.to_dict())
        record.check(result.class_count == 5, f"{result.class_count} classes, expected 5")
        for fp, rep in result.classes:
            data = nilpotence_data(rep)
            record.check(data.nilpotency_class is not None and data.nilpotency_class <= 3, f"class {data.nilpotency_class} > 3")
            record.check(data.exponent <= 8, f"exponent {data.exponent} > 8")

    _guarded(record, census)
    records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.census.words", {"n": 3, "q": 2, "m": 2})
    _guarded(record, lambda: record.verdicts.update(word_set_discover(3, f, 2, cap).to_dict()))
    records.append(_finish(ctx, record, started))
    return records


# -- Chevalley-Warning -----------------------------------------------------------


def suite_cw(ctx: SuiteContext) -> List[ReportRecord]:
    records = []
    count = ctx.size("cw_systems", 100)
    scan_cap = ctx.cap("scan_size", 10_000_000)
    for p in CW_PRIMES:
        started = time.perf_counter()
        record = ctx.record("suite.cw", {"p": p, "systems": count})
        rng = ctx.rng(p)

        def body():
            for k in range(count):
                polys, m = random_system(p, rng)
                point = cw_solve(polys, m, scan_cap)
                record.check(any(point) and all(h.evaluate(point) == 0 for h in polys), f"system {k}: bad solution {point}")
                zeros = count_common_zeros(polys, m, scan_cap)
                record.check(zeros % p == 0, f"system {k}: {zeros} common zeros, not divisible by {p}")

        _guarded(record, body)
        records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.cw.substitute", {"q": 4})

    def substitution():
        f4 = field_make(2, 2)
        trace = trace_map(f4)
        for phi_terms in ({(2,): 1}, {(1,): 1}):
            f = APolynomial(PolyOverF(f4, 1, phi_terms), trace)
            h = substitute_linear(f, [1, f4.x.code])
            record.check(h == PolyOverF(field_make(2), 2, {(0, 1): 1}), f"phi={phi_terms}: h = {h!r}, expected x_2")
            record.check(h.degree <= f.degree, "degree bound broken")
        zero = APolynomial(PolyOverF(f4, 1), trace)
        record.check(substitute_linear(zero, [1, f4.x.code]).is_zero(), "phi = 0 did not give h = 0")

    _guarded(record, substitution)
    records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.cw.apoly-zero", {"q": 8})

    def apoly():
        f8 = field_make(2, 3)
        x = f8.x.code
        f = APolynomial(PolyOverF(f8, 1, {(2,): 1, (1,): x}), trace_map(f8))
        a = find_apoly_zero([f], AdditiveSubgroup.full(f8), scan_cap)
        record.check(a != 0 and f(a) == 0, f"returned {f8.to_text(a)} is not a nonzero zero")
        record.witnesses["a"] = f8.to_text(a)

    _guarded(record, apoly)
    records.append(_finish(ctx, record, started))

    started = time.perf_counter()
    record = ctx.record("suite.cw.extend", {"n": 2, "q": 8})

    def extension():
        f8 = field_make(2, 3)
        trace = trace_map(f8)
        gamma = one_param_positive(2)
        s = [elementary(f8, 2, 1, 2, 1)]
        f = APolynomial(PolyOverF.variable(f8, 1, 1), trace)
        result = vanishing_extend(s, f, AdditiveSubgroup.zero(f8), gamma)
        record.verdicts.update(result.to_dict())
        record.check(result.found, "no extension found over F_8")
        if result.found:
            record.check(trace(result.d) == 0, f"d = {result.d_text} is outside the trace kernel")
        small = usa_group(s, AdditiveSubgroup.from_codes(f8, [1]), gamma)
        large = usa_group(s, AdditiveSubgroup.full(f8), gamma)
        record.check(small.group.element_set <= large.group.element_set, "U(S, a) is not monotone in a")
        record.check(large.order == 8, f"U(S, F_8) has order {large.order}, expected 8")

    _guarded(record, extension)
    records.append(_finish(ctx, record, started))
    return records


SUITES: Dict[str, Callable[[SuiteContext], List[ReportRecord]]] = {
    "solomon-tits": suite_solomon_tits,
    "apartment": suite_apartment,
    "equivariance": suite_equivariance,
    "gate": suite_gate,
    "gl2-matrix": suite_gl2_matrix,
    "grpring": suite_grpring,
    "symidentity": suite_symidentity,
    "positivity": suite_positivity,
    "census": suite_census,
    "cw": suite_cw,
    "coinvariants": suite_coinvariants,
}

SUITE_NAMES = tuple(SUITES) + ("all",)


def run_suite(name: str, ctx: SuiteContext) -> List[ReportRecord]:
    """Run one suite, or every suite in order for 'all'

    Raises:
        ValueError: Unknown suite name
    """
    if name == "all":
        records: List[ReportRecord] = []
        for suite in SUITES.values():
            records.extend(suite(ctx))
        return records
    suite: Optional[Callable[[SuiteContext], List[ReportRecord]]] = SUITES.get(name)
    if suite is None:
        raise ValueError(f"Unknown suite {name!r}; expected one of {SUITE_NAMES}")
    return suite(ctx)


__all__ = ["SuiteContext", "SUITES", "SUITE_NAMES", "run_suite"]
