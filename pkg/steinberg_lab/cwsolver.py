"""Chevalley-Warning searches and A-polynomials over finite fields

An A-polynomial is lambda o phi with phi a polynomial over F_q and lambda an
F_p-linear map F_q -> F_p. Restricted to an F_p-span of independent
v_1..v_m it becomes an honest F_p-polynomial h(x) = lambda(phi(sum x_j v_j))
of degree at most deg phi, so Chevalley-Warning produces a nonzero common
zero once 1 + sum deg phi_i independent elements are available.

Points are scanned with the first coordinate varying fastest, matching
iter_vectors; the first common zero in that order is reported.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import CapExceededError, FieldMismatchError, InvariantViolation

from .exactfield import AdditiveMap, Field, field_make, iter_vectors
from .exactlinalg import Subspace
from .matgroup import (
    DEFAULT_CLOSURE_CAP,
    FiniteSubgroup,
    OneParamSubgroup,
    UnipotentElement,
    evaluate_word,
    monoid_act,
    root_factorize,
    root_positions,
    subgroup_closure,
    word_set_discover,
)

logger = logging.getLogger(__name__)

DEFAULT_SCAN_CAP = 10_000_000
POINTWISE_CHECK_LIMIT = 100_000
SCAN_CHUNK = 1 << 16

Exponents = Tuple[int, ...]


class PolyOverF:
    """Sparse polynomial over a finite field

    Attributes:
        owner: Coefficient field
        nvars: Number of variables
        terms: exponent vector -> nonzero coefficient code
    """

    __slots__ = ("owner", "nvars", "terms")

    def __init__(self, owner: Field, nvars: int, terms: Optional[Dict[Exponents, int]] = None):
        self.owner = owner
        self.nvars = nvars
        clean: Dict[Exponents, int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"Bad exponent vector {exps} for {nvars} variables")
            clean[exps] = owner.add(clean.get(exps, 0), owner(int(c)).code)
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def zero(cls, owner: Field, nvars: int) -> "PolyOverF":
        return cls(owner, nvars)

    @classmethod
    def constant(cls, owner: Field, nvars: int, c: int) -> "PolyOverF":
        return cls(owner, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, owner: Field, nvars: int, j: int) -> "PolyOverF":
        """x_j, j 1-based"""
        exps = [0] * nvars
        exps[j - 1] = 1
        return cls(owner, nvars, {tuple(exps): 1})

    @classmethod
    def linear_form(cls, owner: Field, coeffs: Sequence[int]) -> "PolyOverF":
        """sum_j c_j x_j"""
        n = len(coeffs)
        return cls(owner, n, {tuple(int(i == j) for i in range(n)): c for j, c in enumerate(coeffs)})

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "PolyOverF") -> None:
        if self.owner != other.owner:
            raise FieldMismatchError(f"Polynomials over {self.owner!r} and {other.owner!r}")
        if self.nvars != other.nvars:
            raise ValueError(f"Variable counts differ: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "PolyOverF") -> "PolyOverF":
        self._check(other)
        f = self.owner
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = f.add(terms.get(exps, 0), c)
        return PolyOverF(f, self.nvars, terms)

    def __neg__(self) -> "PolyOverF":
        return PolyOverF(self.owner, self.nvars, {k: self.owner.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other: "PolyOverF") -> "PolyOverF":
        return self + (-other)

    def scale(self, c: int) -> "PolyOverF":
        return PolyOverF(self.owner, self.nvars, {k: self.owner.mul(c, v) for k, v in self.terms.items()})

    def __mul__(self, other: "PolyOverF") -> "PolyOverF":
        self._check(other)
        f = self.owner
        terms: Dict[Exponents, int] = {}
        for (a, x), (b, y) in itertools.product(self.terms.items(), other.terms.items()):
            exps = tuple(i + j for i, j in zip(a, b))
            terms[exps] = f.add(terms.get(exps, 0), f.mul(x, y))
        return PolyOverF(f, self.nvars, terms)

    def __pow__(self, k: int) -> "PolyOverF":
        if k < 0:
            raise ValueError("Negative powers of polynomials are not defined")
        result = PolyOverF.constant(self.owner, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyOverF):
            return NotImplemented
        return self.owner == other.owner and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.owner, self.nvars, tuple(sorted(self.terms.items()))))

    def evaluate(self, point: Sequence[int]) -> int:
        """Value at a point of codes"""
        if len(point) != self.nvars:
            raise ValueError(f"Point has {len(point)} coordinates, expected {self.nvars}")
        f = self.owner
        total = 0
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(point, exps):
                if e:
                    term = f.mul(term, f.power(int(x), e))
            total = f.add(total, term)
        return total

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Values at the rows of points; prime fields only"""
        f = self.owner
        if not f.is_prime_field:
            return np.array([self.evaluate(row) for row in points], dtype=np.int64)
        p = f.p
        points = np.asarray(points, dtype=np.int64)
        values = np.zeros(points.shape[0], dtype=np.int64)
        for exps, c in self.terms.items():
            term = np.full(points.shape[0], c, dtype=np.int64)
            for j, e in enumerate(exps):
                for _ in range(e):
                    term = (term * points[:, j]) % p
            values = (values + term) % p
        return values

    def to_json(self) -> dict:
        text = self.owner.to_text
        return {
            "vars": self.nvars,
            "terms": [{"exps": list(exps), "coeff": text(c)} for exps, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, owner: Field, data: dict) -> "PolyOverF":
        """Inverse of to_json

        Raises:
            ValueError: Malformed document
        """
        try:
            nvars = int(data["vars"])
            terms: Dict[Exponents, int] = {}
            for term in data["terms"]:
                exps = tuple(int(e) for e in term["exps"])
                coeff = term["coeff"]
                code = owner.from_text(coeff).code if isinstance(coeff, str) else owner(int(coeff)).code
                terms[exps] = owner.add(terms.get(exps, 0), code)
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed polynomial document: {e}") from e
        return cls(owner, nvars, terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{self.owner.to_text(c)}*x^{list(e)}" for e, c in sorted(self.terms.items()))
        return f"PolyOverF({body or '0'})"


def compose_univariate(phi: PolyOverF, inner: PolyOverF) -> PolyOverF:
    """phi(inner) for univariate phi"""
    if phi.nvars != 1:
        raise ValueError("compose_univariate needs a univariate outer polynomial")
    if phi.owner != inner.owner:
        raise FieldMismatchError("Outer and inner polynomials live over different fields")
    result = PolyOverF.zero(inner.owner, inner.nvars)
    for (e,), c in phi.terms.items():
        result = result + (inner**e).scale(c)
    return result


@dataclass(frozen=True)
class APolynomial:
    """lambda o phi with phi over F_q and lambda: F_q -> F_p additive"""

    phi: PolyOverF
    lam: AdditiveMap

    def __post_init__(self):
        if self.phi.owner != self.lam.owner:
            raise FieldMismatchError("phi and lambda must share their field")

    @property
    def owner(self) -> Field:
        return self.phi.owner

    @property
    def degree(self) -> int:
        return self.phi.degree

    def __call__(self, *point: int) -> int:
        return self.lam(self.phi.evaluate(point))

    def to_json(self) -> dict:
        return {"phi": self.phi.to_json(), "lambda": list(self.lam.values)}


class AdditiveSubgroup:
    """F_p-subspace of F_q, stored on coefficient vectors"""

    def __init__(self, owner: Field, vectors: Sequence[Sequence[int]] = ()):
        self.owner = owner
        self.prime = field_make(owner.p)
        self.space = Subspace.span(self.prime, owner.e, vectors)

    @classmethod
    def from_codes(cls, owner: Field, codes: Sequence[int]) -> "AdditiveSubgroup":
        return cls(owner, [owner.coeffs(int(c)) for c in codes])

    @classmethod
    def zero(cls, owner: Field) -> "AdditiveSubgroup":
        return cls(owner)

    @classmethod
    def full(cls, owner: Field) -> "AdditiveSubgroup":
        return cls.from_codes(owner, [owner.p**i for i in range(owner.e)])

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def order(self) -> int:
        return self.owner.p**self.dim

    def basis_codes(self) -> List[int]:
        return [self.owner.from_coeffs(row) for row in self.space.basis]

    def contains(self, code: int) -> bool:
        return self.space.contains(self.owner.coeffs(int(code)))

    def __contains__(self, code: int) -> bool:
        return self.contains(code)

    def elements(self) -> List[int]:
        """All codes, sorted"""
        f = self.owner
        basis = self.basis_codes()
        out = set()
        for coords in iter_vectors(self.prime, self.dim):
            total = 0
            for c, b in zip(coords, basis):
                total = f.add(total, f.mul(c, b))
            out.add(total)
        return sorted(out)

    def extend(self, code: int) -> "AdditiveSubgroup":
        """self + F_p code"""
        return AdditiveSubgroup(self.owner, list(self.space.basis) + [self.owner.coeffs(int(code))])

    def contains_subgroup(self, other: "AdditiveSubgroup") -> bool:
        return self.space.contains_subspace(other.space)

    def to_json(self) -> List[str]:
        return [self.owner.to_text(c) for c in self.basis_codes()]


def reduce_exponents(h: PolyOverF) -> PolyOverF:
    """x^e -> x^{((e-1) mod (p-1)) + 1} for e >= p; same values on F_p^m"""
    f = h.owner
    if not f.is_prime_field:
        raise ValueError("Exponent reduction applies to polynomials over a prime field")
    p = f.p
    terms: Dict[Exponents, int] = {}
    for exps, c in h.terms.items():
        reduced = tuple(e if e < p else ((e - 1) % (p - 1)) + 1 for e in exps)
        terms[reduced] = f.add(terms.get(reduced, 0), c)
    return PolyOverF(f, h.nvars, terms)


def _check_prime_system(polys: Sequence[PolyOverF], m: int) -> Field:
    if not polys:
        raise ValueError("Need at least one polynomial")
    f = polys[0].owner
    if not f.is_prime_field:
        raise ValueError("Chevalley-Warning scans run over a prime field")
    for h in polys:
        if h.owner != f:
            raise FieldMismatchError("Polynomials of one system must share their field")
        if h.nvars != m:
            raise ValueError(f"Polynomial in {h.nvars} variables, expected {m}")
    return f


def _scan(polys: Sequence[PolyOverF], m: int, p: int, stop_at_first: bool, cap: int):
    """Yield (index, point) of common zeros, first coordinate fastest"""
    total = p**m
    if total > cap:
        raise CapExceededError("scan_size", total, cap)
    weights = p ** np.arange(m, dtype=np.int64)
    for start in range(0, total, SCAN_CHUNK):
        idx = np.arange(start, min(start + SCAN_CHUNK, total), dtype=np.int64)
        points = (idx[:, None] // weights[None, :]) % p
        mask = np.ones(len(idx), dtype=bool)
        for h in polys:
            mask &= h.evaluate_many(points) == 0
        for k in np.nonzero(mask)[0]:
            yield int(idx[k]), tuple(int(v) for v in points[k])
            if stop_at_first and idx[k] != 0:
                return


def cw_solve(polys: Sequence[PolyOverF], m: int, cap: int = DEFAULT_SCAN_CAP) -> Tuple[int, ...]:
    """First nonzero common zero of polynomials over F_p in m variables

    Raises:
        ValueError: sum of degrees >= m, or some f_i(0) != 0
        CapExceededError: p^m above cap
        InvariantViolation: No nonzero zero exists
    """
    f = _check_prime_system(polys, m)
    degrees = sum(h.degree for h in polys)
    if degrees >= m:
        raise ValueError(f"Degree sum {degrees} is not below the variable count {m}")
    origin = (0,) * m
    if any(h.evaluate(origin) for h in polys):
        raise ValueError("Every polynomial must vanish at 0")
    for index, point in _scan(polys, m, f.p, True, cap):
        if index == 0:
            continue
        if any(h.evaluate(point) for h in polys):
            raise InvariantViolation(f"Scan reported {point} but re-evaluation disagrees")
        logger.debug(f"Common zero {point} after {index} points")
        return point
    raise InvariantViolation("No nonzero common zero despite the degree bound")


def count_common_zeros(polys: Sequence[PolyOverF], m: int, cap: int = DEFAULT_SCAN_CAP) -> int:
    """Number of common zeros in F_p^m, 0 included"""
    f = _check_prime_system(polys, m)
    return sum(1 for _ in _scan(polys, m, f.p, False, cap))


def substitute_linear(f: APolynomial, vectors: Sequence[int]) -> PolyOverF:
    """h(x_1..x_m) = lambda(phi(sum x_j v_j)) over F_p, exponents reduced

    Raises:
        ValueError: phi is not univariate or the v_j are F_p-dependent
        InvariantViolation: h differs from direct evaluation, or deg h > deg phi
    """
    field_q = f.owner
    if f.phi.nvars != 1:
        raise ValueError("Linear substitution needs a univariate phi")
    m = len(vectors)
    span = AdditiveSubgroup.from_codes(field_q, vectors)
    if span.dim != m:
        raise ValueError(f"The {m} substituted elements are not F_p-independent")
    expanded = compose_univariate(f.phi, PolyOverF.linear_form(field_q, vectors))
    prime = field_make(field_q.p)
    h = reduce_exponents(PolyOverF(prime, m, {exps: f.lam(c) for exps, c in expanded.terms.items()}))
    if h.degree > f.degree:
        raise InvariantViolation(f"Substituted degree {h.degree} exceeds deg phi = {f.degree}")
    if prime.q**m <= POINTWISE_CHECK_LIMIT:
        for point in iter_vectors(prime, m):
            value = 0
            for x, v in zip(point, vectors):
                value = field_q.add(value, field_q.mul(x, v))
            if h.evaluate(point) != f(value):
                raise InvariantViolation(f"Substituted polynomial disagrees with direct evaluation at {point}")
    return h


def find_apoly_zero(fs: Sequence[APolynomial], a: AdditiveSubgroup, cap: int = DEFAULT_SCAN_CAP) -> int:
    """Nonzero element of a killed by every f_i

    Uses the first 1 + sum deg phi_i basis elements of a.

    Raises:
        ValueError: Some f_i(0) != 0, or dim a < 1 + sum deg phi_i
        InvariantViolation: The returned element fails re-verification
    """
    if not fs:
        raise ValueError("Need at least one A-polynomial")
    owner = a.owner
    for g in fs:
        if g.owner != owner:
            raise FieldMismatchError("A-polynomials and the subgroup must share their field")
        if g(0) != 0:
            raise ValueError("Every A-polynomial must vanish at 0")
    m = 1 + sum(g.degree for g in fs)
    if a.dim < m:
        raise ValueError(f"Subgroup of dimension {a.dim} is below the {m} independent elements required")
    vectors = a.basis_codes()[:m]
    hs = [substitute_linear(g, vectors) for g in fs]
    point = cw_solve(hs, m, cap)
    result = 0
    for x, v in zip(point, vectors):
        result = owner.add(result, owner.mul(x, v))
    if result == 0 or result not in a or any(g(result) for g in fs):
        raise InvariantViolation(f"Element {owner.to_text(result)} fails verification")
    return result


@dataclass
class USAGroup:
    """U(S, a): generated by monoid images a.s for s in S, a in the subgroup"""

    group: FiniteSubgroup
    generators: Tuple[UnipotentElement, ...]

    @property
    def order(self) -> int:
        return self.group.order

    def to_dict(self) -> dict:
        return {"order": self.order, "generators": [g.to_text() for g in self.generators]}


def usa_group(
    s: Sequence[UnipotentElement],
    a: AdditiveSubgroup,
    gamma: OneParamSubgroup,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> USAGroup:
    """Subgroup closure of {a.s : s in S, a in the subgroup}

    Raises:
        ValueError: S empty or gamma not positive
        CapExceededError: Closure above cap
    """
    if not s:
        raise ValueError("S must be nonempty")
    f, n = s[0].owner, s[0].n
    if a.owner != f:
        raise FieldMismatchError("Elements of S and the additive subgroup must share their field")
    images = sorted({monoid_act(c, u, gamma) for u in s for c in a.elements()})
    identity = UnipotentElement.identity(f, n)
    gens = tuple(g for g in images if not g.is_identity())
    group = subgroup_closure(gens, identity, cap, parent=f"U_{n}(F_{f.q})")
    return USAGroup(group, gens)


def evaluate_on_unipotent(f: APolynomial, u: UnipotentElement) -> int:
    """f on the root coordinates of u, in root_positions order"""
    coords = root_factorize(u)
    return f(*(coords[pos].code for pos in root_positions(u.n)))


@dataclass
class ExtendResult:
    """Outcome of one vanishing-extension step

    Attributes:
        found: A valid d was found
        d: The element (code), when found
        group_order: |U(S, c + F_p d)|
        candidates_tried: Candidates tested
        boundary: Every candidate lay inside c already
        word_count: Word composites evaluated per candidate
    """

    found: bool
    d: Optional[int] = None
    group_order: int = 0
    candidates_tried: int = 0
    boundary: bool = False
    d_text: str = ""
    word_count: int = 0

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "d": self.d_text if self.found else None,
            "group_order": self.group_order,
            "candidates_tried": self.candidates_tried,
            "boundary": self.boundary,
            "word_count": self.word_count,
        }


def vanishing_extend(
    s: Sequence[UnipotentElement],
    f: APolynomial,
    c: AdditiveSubgroup,
    gamma: OneParamSubgroup,
    candidates: Optional[Sequence[int]] = None,
    cap: int = DEFAULT_CLOSURE_CAP,
    words: Optional[Sequence[Sequence[int]]] = None,
) -> ExtendResult:
    """First d (code order) with f vanishing on U(S, c + F_p d)

    Each candidate is filtered through the word composites
    f_w(t) = f(w(t.s_1, ..., t.s_N)) at t = d, for w in a word set over N = |S|
    letters; these cover all of <d.S>. Survivors are then checked by direct
    evaluation on the whole extended group.

    Args:
        s: Elements of U_n(F_q)
        f: A-polynomial in the root coordinates
        c: Base subgroup; f must vanish on U(S, c)
        gamma: Positive one-parameter subgroup
        candidates: Pool of codes to try (default: every nonzero element)
        cap: Closure cap, also bounding the word-set search
        words: Word set to use (default: word_set_discover(n, F_q, |S|))

    Raises:
        ValueError: f does not vanish on U(S, c), or its arity is not n(n-1)/2
        CapExceededError: A closure or the word-set search exceeded cap
    """
    if not s:
        raise ValueError("S must be nonempty")
    n = s[0].n
    if f.phi.nvars != n * (n - 1) // 2:
        raise ValueError(f"f must take {n * (n - 1) // 2} root coordinates, got {f.phi.nvars}")
    base = usa_group(s, c, gamma, cap)
    if any(evaluate_on_unipotent(f, u) for u in base.group.elements):
        raise ValueError("f does not vanish on U(S, c)")
    owner = c.owner
    pool = sorted(set(candidates)) if candidates is not None else list(range(1, owner.q))
    fresh = [d for d in pool if d not in c]
    if not fresh:
        logger.info("Every candidate already lies in the base subgroup")
        return ExtendResult(False, boundary=True)
    if words is None:
        words = word_set_discover(n, owner, len(s), cap).words
    identity = UnipotentElement.identity(owner, n)

    tried = 0
    for d in fresh:
        tried += 1
        images = [monoid_act(d, u, gamma) for u in s]
        if any(evaluate_on_unipotent(f, evaluate_word(w, images, identity)) for w in words):
            continue
        extended = usa_group(s, c.extend(d), gamma, cap)
        if all(evaluate_on_unipotent(f, u) == 0 for u in extended.group.elements):
            return ExtendResult(True, d, extended.order, tried, False, owner.to_text(d), len(words))
        logger.debug(f"Candidate {owner.to_text(d)} passes every word composite but not the extended group")
    return ExtendResult(False, candidates_tried=tried, word_count=len(words))


def random_system(p: int, rng: np.random.Generator, max_vars: int = 6, scan_limit: int = 20_000) -> Tuple[List[PolyOverF], int]:
    """Seeded system over F_p with sum of degrees below the variable count"""
    f = field_make(p)
    m_max = max_vars
    while m_max > 2 and p**m_max > scan_limit:
        m_max -= 1
    m = int(rng.integers(2, m_max + 1))
    budget = m - 1
    polys = []
    while budget > 0 and (not polys or rng.integers(2)):
        degree = int(rng.integers(1, budget + 1))
        budget -= degree
        terms: Dict[Exponents, int] = {}
        for _ in range(int(rng.integers(1, 5))):
            total = int(rng.integers(1, degree + 1))
            exps = [0] * m
            for _ in range(total):
                exps[int(rng.integers(m))] += 1
            terms[tuple(exps)] = int(rng.integers(1, p))
        exps = [0] * m
        exps[int(rng.integers(m))] = degree
        terms[tuple(exps)] = int(rng.integers(1, p))
        polys.append(PolyOverF(f, m, terms))
    return polys, m


__all__ = [
    "PolyOverF",
    "APolynomial",
    "AdditiveSubgroup",
    "USAGroup",
    "ExtendResult",
    "compose_univariate",
    "reduce_exponents",
    "cw_solve",
    "count_common_zeros",
    "substitute_linear",
    "find_apoly_zero",
    "usa_group",
    "evaluate_on_unipotent",
    "vanishing_extend",
    "random_system",
]
