"""Laurent polynomials and the elementary symmetric identity

Every z_i is a root of prod_j (X - z_j) = sum_k (-1)^k e_k X^{n-k}, so

    sum_{j=1}^{n} (-1)^{j-1} e_{n-j}(z) z_i^j = e_n(z)      for each i.

Applied to module elements m_i this gives

    sum_j (-1)^{j-1} e_{n-j}(z) v_j = e_n(z) (m_1 + ... + m_n),
    v_j = z_1^j m_1 + ... + z_n^j m_n,

so a submodule containing every v_j and stable under the z_i^{+-1}
contains m_1 + ... + m_n once e_n acts invertibly. The module side is
checked on commuting integer matrices mod m.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import reduce
from operator import mul
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Matrix, Rational, igcd
from sympy.polys.domains import ZZ
from sympy.polys.rings import ring

from shared.utils.errors import InvariantViolation

from .exactfield import field_make
from .grpring import cyclic_table, regular_action
from .matgroup import elementary

logger = logging.getLogger(__name__)

MAX_SYMBOLIC_N = 8

Exponents = Tuple[int, ...]


class LaurentPolynomial:
    """Element of Z[z_1^{+-1}, ..., z_n^{+-1}] in canonical sparse form"""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[Exponents, int]] = None):
        if n < 0:
            raise ValueError(f"Variable count must be non-negative, got {n}")
        self.n = n
        clean: Dict[Exponents, int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"Exponent vector {exps} has length {len(exps)}, expected {n}")
            if c:
                clean[exps] = clean.get(exps, 0) + int(c)
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def constant(cls, n: int, c: int) -> "LaurentPolynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, n: int, exps: Sequence[int], c: int = 1) -> "LaurentPolynomial":
        return cls(n, {tuple(exps): c})

    @classmethod
    def variable(cls, n: int, i: int, power: int = 1) -> "LaurentPolynomial":
        """z_i^power, i 1-based; negative powers allowed"""
        if not 1 <= i <= n:
            raise ValueError(f"Variable index {i} outside 1..{n}")
        exps = [0] * n
        exps[i - 1] = power
        return cls(n, {tuple(exps): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "LaurentPolynomial") -> None:
        if self.n != other.n:
            raise ValueError(f"Variable counts differ: {self.n} vs {other.n}")

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = terms.get(exps, 0) + c
        return LaurentPolynomial(self.n, terms)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def scale(self, c: int) -> "LaurentPolynomial":
        return LaurentPolynomial(self.n, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        terms: Dict[Exponents, int] = {}
        for (a, x), (b, y) in itertools.product(self.terms.items(), other.terms.items()):
            exps = tuple(i + j for i, j in zip(a, b))
            terms[exps] = terms.get(exps, 0) + x * y
        return LaurentPolynomial(self.n, terms)

    def __pow__(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("Only monomials are invertible")
            (exps, c), = self.terms.items()
            if c not in (1, -1):
                raise ValueError("Only unit monomials are invertible")
            return LaurentPolynomial(self.n, {tuple(-e for e in exps): c ** (-k)})
        result = LaurentPolynomial.constant(self.n, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Largest total degree, 0 for the zero polynomial"""
        return max((sum(e) for e in self.terms), default=0)

    def evaluate(self, point: Sequence) -> Rational:
        """Value at nonzero rationals"""
        if len(point) != self.n:
            raise ValueError(f"Point has {len(point)} coordinates, expected {self.n}")
        values = [Rational(v) for v in point]
        if any(v == 0 for v in values):
            raise ValueError("Laurent polynomials are evaluated at nonzero points")
        total = Rational(0)
        for exps, c in self.terms.items():
            total += c * reduce(mul, (v**e for v, e in zip(values, exps)), Rational(1))
        return total

    def to_dict(self) -> dict:
        return {
            "vars": self.n,
            "terms": [{"exps": list(exps), "coeff": c} for exps, c in sorted(self.terms.items(), reverse=True)],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items(), reverse=True):
            factors = []
            for i, e in enumerate(exps, start=1):
                if e == 1:
                    factors.append(f"z{i}")
                elif e:
                    factors.append(f"z{i}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self})"


def elementary_symmetric(n: int, k: int) -> LaurentPolynomial:
    """e_k(z_1..z_n); e_0 = 1

    Raises:
        ValueError: k outside 0..n
    """
    if not 0 <= k <= n:
        raise ValueError(f"e_k needs 0 <= k <= n, got k={k}, n={n}")
    terms: Dict[Exponents, int] = {}
    for subset in itertools.combinations(range(n), k):
        exps = [0] * n
        for i in subset:
            exps[i] = 1
        terms[tuple(exps)] = 1
    return LaurentPolynomial(n, terms)


@dataclass
class IdentityCheck:
    """Both sides of the symmetric identity with formal m_1..m_n

    Each side is stored as its coefficient of m_i for every i.

    Attributes:
        n: Variable count
        holds: Sides agree term for term
        lhs_terms: Monomials produced by expanding the left side, before cancellation
        rhs_terms: Monomials of e_n(z) (m_1 + ... + m_n)
        lhs: Coefficient of m_i on the left, after cancellation
        rhs: Coefficient of m_i on the right
    """

    n: int
    holds: bool
    lhs_terms: int
    rhs_terms: int
    lhs: Dict[int, LaurentPolynomial] = field(default_factory=dict)
    rhs: Dict[int, LaurentPolynomial] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ok": self.holds,
            "lhs_terms": self.lhs_terms,
            "rhs_terms": self.rhs_terms,
        }


def verify_identity_symbolic(n: int) -> IdentityCheck:
    """sum_j (-1)^{j-1} e_{n-j} (sum_i z_i^j m_i) = e_n (m_1 + ... + m_n)

    Raises:
        ValueError: n outside 1..8
    """
    if not 1 <= n <= MAX_SYMBOLIC_N:
        raise ValueError(f"Symbolic identity check supports 1 <= n <= {MAX_SYMBOLIC_N}, got {n}")
    e = [elementary_symmetric(n, k) for k in range(n + 1)]
    lhs: Dict[int, LaurentPolynomial] = {}
    raw_terms = 0
    for i in range(1, n + 1):
        coefficient = LaurentPolynomial(n)
        for j in range(1, n + 1):
            term = e[n - j] * LaurentPolynomial.variable(n, i, j)
            raw_terms += len(term)
            coefficient = coefficient + (term if j % 2 == 1 else -term)
        lhs[i] = coefficient
    rhs = {i: e[n] for i in range(1, n + 1)}
    holds = all(lhs[i] == rhs[i] for i in range(1, n + 1))
    logger.debug(f"Symmetric identity n={n}: {raw_terms} expanded terms, holds={holds}")
    return IdentityCheck(n, holds, raw_terms, n * len(e[n]), lhs, rhs)


def verify_identity_sympy(n: int) -> bool:
    """Same identity expanded in a sympy polynomial ring over ZZ"""
    if not 1 <= n <= MAX_SYMBOLIC_N:
        raise ValueError(f"Symbolic identity check supports 1 <= n <= {MAX_SYMBOLIC_N}, got {n}")
    names = ",".join([f"z{i}" for i in range(1, n + 1)] + [f"m{i}" for i in range(1, n + 1)])
    R, *gens = ring(names, ZZ)
    z, m = gens[:n], gens[n:]

    def e(k: int):
        return sum((reduce(mul, c, R.one) for c in itertools.combinations(z, k)), R.zero)

    lhs = R.zero
    for j in range(1, n + 1):
        v_j = sum((z[i] ** j * m[i] for i in range(n)), R.zero)
        lhs += (-1) ** (j - 1) * e(n - j) * v_j
    rhs = e(n) * sum(m, R.zero)
    return lhs == rhs


def specialize(n: int, z: Sequence, m: Sequence[Sequence[int]]) -> Tuple[List[Rational], List[Rational]]:
    """Both sides of the identity at nonzero rationals z and integer vectors m

    Returns:
        (lhs, rhs) as vectors of Rationals
    """
    if len(z) != n or len(m) != n:
        raise ValueError(f"Need {n} values of z and {n} vectors m")
    z = [Rational(v) for v in z]
    if any(v == 0 for v in z):
        raise ValueError("Specialization points must be nonzero")
    size = len(m[0]) if m else 0
    e = [elementary_symmetric(n, k).evaluate(z) for k in range(n + 1)]
    lhs = [Rational(0)] * size
    for j in range(1, n + 1):
        sign = 1 if j % 2 == 1 else -1
        for i in range(n):
            factor = sign * e[n - j] * z[i] ** j
            lhs = [a + factor * int(b) for a, b in zip(lhs, m[i])]
    rhs = [e[n] * sum(int(m[i][k]) for i in range(n)) for k in range(size)]
    return lhs, rhs


def random_specialization(rng: np.random.Generator, n_max: int = 5, size_max: int = 3) -> Tuple[int, List[Rational], List[List[int]]]:
    """Seeded nonzero rationals and integer vectors for a specialization check"""
    n = int(rng.integers(1, n_max + 1))
    size = int(rng.integers(1, size_max + 1))
    z = []
    for _ in range(n):
        num = int(rng.integers(1, 10)) * (1 if rng.integers(2) else -1)
        z.append(Rational(num, int(rng.integers(1, 10))))
    m = [[int(v) for v in rng.integers(-20, 21, size=size)] for _ in range(n)]
    return n, z, m


class ModuleInstance:
    """(Z/m)^d with commuting invertible matrices Z_1..Z_n acting on column vectors"""

    def __init__(self, modulus: int, matrices: Sequence[Sequence[Sequence[int]]]):
        if modulus < 2:
            raise ValueError(f"Modulus must be at least 2, got {modulus}")
        if not matrices:
            raise ValueError("A module instance needs at least one matrix")
        self.modulus = modulus
        self.matrices = [np.asarray(z, dtype=np.int64) % modulus for z in matrices]
        d = self.matrices[0].shape[0]
        if any(z.shape != (d, d) for z in self.matrices):
            raise ValueError("Matrices must be square of one size")
        self.dim = d
        for a, b in itertools.combinations(self.matrices, 2):
            if not np.array_equal((a @ b) % modulus, (b @ a) % modulus):
                raise ValueError("Matrices do not commute")
        self.inverses = []
        for z in self.matrices:
            det = int(Matrix(z.tolist()).det()) % modulus
            if igcd(det, modulus) != 1:
                raise ValueError(f"Matrix with determinant {det} is not invertible mod {modulus}")
            inv = Matrix(z.tolist()).inv_mod(modulus)
            self.inverses.append(np.array(inv.tolist(), dtype=np.int64) % modulus)

    @property
    def n(self) -> int:
        return len(self.matrices)

    def apply(self, k: int, v: np.ndarray, power: int = 1) -> np.ndarray:
        """Z_k^power v, k 0-based"""
        base = self.matrices[k] if power >= 0 else self.inverses[k]
        out = np.asarray(v, dtype=np.int64) % self.modulus
        for _ in range(abs(power)):
            out = (base @ out) % self.modulus
        return out

    def to_dict(self) -> dict:
        return {"modulus": self.modulus, "dim": self.dim, "matrices": [z.tolist() for z in self.matrices]}


class SubmoduleModM:
    """Subgroup of (Z/m)^d in echelon form

    Rows are kept with pivot entries dividing m; the rows m e_k are present
    from the start, so entries may always be reduced mod m.
    """

    def __init__(self, modulus: int, dim: int):
        self.modulus = modulus
        self.dim = dim
        self.rows: Dict[int, np.ndarray] = {}
        for k in range(dim):
            row = np.zeros(dim, dtype=object)
            row[k] = modulus
            self.rows[k] = row

    def reduce(self, v: Sequence[int]) -> np.ndarray:
        w = np.array([int(x) % self.modulus for x in v], dtype=object)
        for c in range(self.dim):
            r = self.rows[c]
            if w[c] % r[c]:
                return w
            w = (w - (w[c] // r[c]) * r) % self.modulus
        return w

    def contains(self, v: Sequence[int]) -> bool:
        return not self.reduce(v).any()

    def add(self, v: Sequence[int]) -> bool:
        """Insert v; False when it was already a member"""
        if self.contains(v):
            return False
        w = np.array([int(x) % self.modulus for x in v], dtype=object)
        for c in range(self.dim):
            if w[c] == 0:
                continue
            r = self.rows[c]
            x, y, g = (int(t) for t in ZZ.gcdex(ZZ(int(r[c])), ZZ(int(w[c]))))
            pivot = (x * r + y * w) % self.modulus
            pivot[c] = g
            rest = ((int(w[c]) // g) * r - (int(r[c]) // g) * w) % self.modulus
            self.rows[c] = pivot
            w = rest
        return True

    def order(self) -> int:
        """Number of elements"""
        return self.modulus**self.dim // reduce(mul, (int(self.rows[c][c]) for c in range(self.dim)), 1)


@dataclass
class LemmaResult:
    """Membership of m_1 + ... + m_n in the closure N of the v_d

    Attributes:
        holds: The sum lies in N
        submodule_order: |N|
        generators: v_1..v_n
        target: m_1 + ... + m_n
    """

    holds: bool
    submodule_order: int
    generators: List[List[int]]
    target: List[int]

    def to_dict(self) -> dict:
        return {
            "ok": self.holds,
            "submodule_order": self.submodule_order,
            "generators": self.generators,
            "target": self.target,
        }


def submodule_closure(instance: ModuleInstance, seeds: Sequence[Sequence[int]]) -> SubmoduleModM:
    """Smallest subgroup containing seeds and stable under every Z_k^{+-1}"""
    sub = SubmoduleModM(instance.modulus, instance.dim)
    queue = [np.asarray(v, dtype=np.int64) % instance.modulus for v in seeds]
    while queue:
        v = queue.pop()
        if not sub.add(v):
            continue
        for k in range(instance.n):
            queue.append(instance.apply(k, v, 1))
            queue.append(instance.apply(k, v, -1))
    return sub


def lemma_check(instance: ModuleInstance, m_vectors: Sequence[Sequence[int]]) -> LemmaResult:
    """Check that sum m_i lies in the Z^{+-1}-closure of v_d = sum_i Z_i^d m_i, d = 1..n

    Raises:
        ValueError: Wrong number or length of vectors
    """
    n, mod = instance.n, instance.modulus
    if len(m_vectors) != n:
        raise ValueError(f"Need {n} module elements, got {len(m_vectors)}")
    ms = [np.asarray(v, dtype=np.int64) % mod for v in m_vectors]
    if any(v.shape != (instance.dim,) for v in ms):
        raise ValueError(f"Module elements must have length {instance.dim}")
    generators = []
    for d in range(1, n + 1):
        v_d = sum((instance.apply(i, ms[i], d) for i in range(n)), np.zeros(instance.dim, dtype=np.int64)) % mod
        generators.append(v_d)
    closure = submodule_closure(instance, generators)
    target = sum(ms, np.zeros(instance.dim, dtype=np.int64)) % mod
    holds = closure.contains(target)
    if not holds:
        logger.warning(f"Sum of module elements outside the closure (mod {mod}, n={n})")
    return LemmaResult(holds, closure.order(), [g.tolist() for g in generators], target.tolist())


def random_instance(rng: np.random.Generator, n_max: int = 4, moduli: Sequence[int] = (4, 9, 25), dim_max: int = 4) -> Tuple[ModuleInstance, List[List[int]]]:
    """Commuting matrices c_i A^{k_i} with A invertible mod m and units c_i"""
    modulus = int(rng.choice(list(moduli)))
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, dim_max + 1))
    while True:
        a = rng.integers(0, modulus, size=(d, d), dtype=np.int64)
        if igcd(int(Matrix(a.tolist()).det()) % modulus, modulus) == 1:
            break
    units = [u for u in range(1, modulus) if igcd(u, modulus) == 1]
    matrices = []
    for _ in range(n):
        power = np.eye(d, dtype=np.int64)
        for _ in range(int(rng.integers(0, 4))):
            power = (power @ a) % modulus
        matrices.append((int(rng.choice(units)) * power) % modulus)
    m_vectors = [[int(x) for x in rng.integers(0, modulus, size=d)] for _ in range(n)]
    return ModuleInstance(modulus, matrices), m_vectors


def psi_instance(p: int, lambdas: Sequence[int], coeffs: Sequence[int], ell: int) -> Tuple[ModuleInstance, List[List[int]]]:
    """F_ell[U_2(F_p)] with z_i acting by left translation by E_12(lambda_i)

    With m_i = c_i [id] the v_d are the torus conjugates sum_i c_i [E_12(d lambda_i)],
    and the target is (sum c_i) [id].

    Raises:
        ValueError: ell not prime or lambdas and coeffs of different length
    """
    if not sympy.isprime(ell):
        raise ValueError(f"Coefficient modulus must be prime, got {ell}")
    if len(lambdas) != len(coeffs) or not lambdas:
        raise ValueError("Need matching nonempty lambdas and coefficients")
    table = cyclic_table(p)
    f = field_make(ell)
    fp = field_make(p)
    indices = [table.index[elementary(fp, 2, 1, 2, lam % p)] for lam in lambdas]
    matrices = [m.entries for m in regular_action(table, f, indices)]
    m_vectors = []
    for c in coeffs:
        v = [0] * table.order
        v[table.identity] = int(c) % ell
        m_vectors.append(v)
    return ModuleInstance(ell, matrices), m_vectors


def check_identity_range(n_max: int = MAX_SYMBOLIC_N) -> Dict[int, bool]:
    """verify_identity_symbolic and its sympy cross-check for n = 1..n_max"""
    results = {}
    for n in range(1, n_max + 1):
        ok = verify_identity_symbolic(n).holds and verify_identity_sympy(n)
        if not ok:
            raise InvariantViolation(f"Symmetric identity fails for n={n}")
        results[n] = ok
    return results


__all__ = [
    "LaurentPolynomial",
    "IdentityCheck",
    "ModuleInstance",
    "SubmoduleModM",
    "LemmaResult",
    "MAX_SYMBOLIC_N",
    "elementary_symmetric",
    "verify_identity_symbolic",
    "verify_identity_sympy",
    "specialize",
    "random_specialization",
    "submodule_closure",
    "lemma_check",
    "random_instance",
    "psi_instance",
    "check_identity_range",
]
