"""Matrix groups over finite fields

GL_n(F_q) and its standard subgroups: the Borel B of upper triangular
matrices, its unipotent radical U and the diagonal torus T. Besides
enumeration this module houses the positive one-parameter subgroups and the
monoid extension of their action on U, root coordinates on U, and the
finite-group structure operations used by the census and word-set searches
(closure, lower central series, center, isomorphism testing).

Row/column convention: matrices act on column vectors, so a subspace with
row basis B is carried to the span of the rows of B g^T.
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from sympy import Matrix, Rational, ilcm, primefactors

from shared.utils.errors import CapExceededError, InvariantViolation

from .exactfield import Field, FieldElement, iter_vectors, primitive_element
from .exactlinalg import MatrixOverField, Subspace, determinant, inverse

logger = logging.getLogger(__name__)

DEFAULT_GROUP_CAP = 1_000_000
DEFAULT_CLOSURE_CAP = 100_000
ISOMORPHISM_LIMIT = 64

GROUP_KINDS = ("GL", "B", "U", "T")


class GLElement:
    """An invertible n x n matrix over a finite field

    Attributes:
        matrix: The underlying matrix
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: MatrixOverField, check: bool = True):
        if check:
            self._validate(matrix)
        self.matrix = matrix

    @staticmethod
    def _validate(matrix: MatrixOverField) -> None:
        if matrix.rows != matrix.cols:
            raise ValueError(f"Group elements must be square, got {matrix.shape}")
        if determinant(matrix) == 0:
            raise ValueError("Matrix is singular")

    @classmethod
    def identity(cls, owner: Field, n: int) -> "GLElement":
        return cls(MatrixOverField.identity(owner, n), check=False)

    @property
    def owner(self) -> Field:
        return self.matrix.owner

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    def sort_key(self) -> Tuple[int, ...]:
        return tuple(self.matrix.entries.ravel().tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GLElement):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __lt__(self, other: "GLElement") -> bool:
        return self.sort_key() < other.sort_key()

    def __mul__(self, other: "GLElement") -> "GLElement":
        if not isinstance(other, GLElement):
            return NotImplemented
        cls = type(self) if type(self) is type(other) else GLElement
        return cls(self.matrix @ other.matrix, check=False)

    def inverse(self) -> "GLElement":
        return type(self)(inverse(self.matrix), check=False)

    def power(self, k: int) -> "GLElement":
        base = self if k >= 0 else self.inverse()
        result = type(self).identity(self.owner, self.n)
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix.entries, np.eye(self.n, dtype=np.int64)))

    def order(self) -> int:
        """Multiplicative order"""
        k, x = 1, self
        while not x.is_identity():
            x = x * self
            k += 1
        return k

    def act(self, s: Subspace) -> Subspace:
        return s.image(self.matrix)

    def to_text(self) -> str:
        """Row-major entry string, rows separated by ';'"""
        text = self.owner.to_text
        return ";".join(",".join(text(int(x)) for x in row) for row in self.matrix.entries)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_text()})"


class UnipotentElement(GLElement):
    """Upper triangular matrix with unit diagonal"""

    __slots__ = ()

    @staticmethod
    def _validate(matrix: MatrixOverField) -> None:
        if matrix.rows != matrix.cols:
            raise ValueError(f"Group elements must be square, got {matrix.shape}")
        if not is_unitriangular(matrix.entries):
            raise ValueError("Matrix is not upper unitriangular")


class TorusElement(GLElement):
    """Diagonal matrix with nonzero diagonal"""

    __slots__ = ()

    @staticmethod
    def _validate(matrix: MatrixOverField) -> None:
        entries = matrix.entries
        if matrix.rows != matrix.cols:
            raise ValueError(f"Group elements must be square, got {matrix.shape}")
        if (entries - np.diag(np.diag(entries))).any():
            raise ValueError("Torus elements must be diagonal")
        if not np.diag(entries).all():
            raise ValueError("Torus elements need a nonzero diagonal")

    @property
    def diagonal(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(self.owner, int(c)) for c in np.diag(self.matrix.entries))


def is_unitriangular(entries: np.ndarray) -> bool:
    entries = np.asarray(entries)
    return not np.tril(entries, -1).any() and bool((np.diag(entries) == 1).all())


def _code(f: Field, c: Union[int, FieldElement]) -> int:
    if isinstance(c, FieldElement):
        if c.owner != f:
            raise ValueError(f"Element of F_{c.owner.q} used over F_{f.q}")
        return c.code
    return f(int(c)).code


def elementary(f: Field, n: int, i: int, j: int, c: Union[int, FieldElement]) -> UnipotentElement:
    """E_ij(c) = I + c e_ij with 1-based indices i < j"""
    if not 1 <= i < j <= n:
        raise ValueError(f"Elementary matrix needs 1 <= i < j <= n, got ({i}, {j}) with n={n}")
    entries = np.eye(n, dtype=np.int64)
    entries[i - 1, j - 1] = _code(f, c)
    return UnipotentElement(MatrixOverField(f, entries), check=False)


def diagonal_matrix(f: Field, diagonal: Sequence[Union[int, FieldElement]]) -> TorusElement:
    codes = [_code(f, c) for c in diagonal]
    return TorusElement(MatrixOverField(f, np.diag(np.array(codes, dtype=np.int64))))


def permutation_matrix(f: Field, perm: Sequence[int]) -> GLElement:
    """Matrix sending e_j to e_perm[j] (0-based)"""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"Not a permutation: {perm}")
    entries = np.zeros((n, n), dtype=np.int64)
    for j, image in enumerate(perm):
        entries[image, j] = 1
    return GLElement(MatrixOverField(f, entries), check=False)


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, k = 0, start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def gl_generators(f: Field, n: int) -> List[GLElement]:
    """Small generating set of GL_n(F_q)

    E_12(1), diag(w, 1, ..., 1) for a primitive w, the transposition (1 2)
    and the n-cycle, dropping duplicates and the identity.
    """
    omega = primitive_element(f)
    candidates: List[GLElement] = []
    if n >= 2:
        candidates.append(elementary(f, n, 1, 2, 1))
    candidates.append(GLElement(diagonal_matrix(f, [omega] + [f.one] * (n - 1)).matrix, check=False))
    if n >= 2:
        candidates.append(permutation_matrix(f, [1, 0] + list(range(2, n))))
        candidates.append(permutation_matrix(f, [(j + 1) % n for j in range(n)]))
    gens: List[GLElement] = []
    for g in candidates:
        if not g.is_identity() and g not in gens:
            gens.append(g)
    return gens


# -- enumeration -----------------------------------------------------------


def group_order(which: str, n: int, q: int) -> int:
    """Order of GL_n, B, U or T over F_q"""
    which = which.upper()
    u = q ** (n * (n - 1) // 2)
    t = (q - 1) ** n
    if which == "U":
        return u
    if which == "T":
        return t
    if which == "B":
        return u * t
    if which == "GL":
        order = 1
        for i in range(n):
            order *= q**n - q**i
        return order
    raise ValueError(f"Unknown group {which!r}; expected one of {GROUP_KINDS}")


def _enumerate_unipotent(f: Field, n: int) -> List[UnipotentElement]:
    positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for codes in iter_vectors(f, len(positions)):
        entries = np.eye(n, dtype=np.int64)
        for (i, j), c in zip(positions, codes):
            entries[i, j] = c
        out.append(UnipotentElement(MatrixOverField(f, entries), check=False))
    return out


def _enumerate_torus(f: Field, n: int) -> List[TorusElement]:
    out = []
    for codes in itertools.product(range(1, f.q), repeat=n):
        entries = np.diag(np.array(codes, dtype=np.int64))
        out.append(TorusElement(MatrixOverField(f, entries), check=False))
    return out


def _enumerate_general(f: Field, n: int) -> List[GLElement]:
    vectors = [np.array(v, dtype=np.int64) for v in iter_vectors(f, n)]
    out: List[GLElement] = []

    def extend(rows: List[np.ndarray], span: Subspace) -> None:
        if len(rows) == n:
            out.append(GLElement(MatrixOverField(f, np.vstack(rows)), check=False))
            return
        for v in vectors:
            if not span.contains(v):
                extend(rows + [v], span + Subspace.span(f, n, [v]))

    extend([], Subspace.zero(f, n))
    return out


def enumerate_group(which: str, n: int, f: Field, cap: int = DEFAULT_GROUP_CAP) -> List[GLElement]:
    """All elements of GL_n(F_q), B, U or T, sorted by row-major entries

    Args:
        which: 'GL', 'B', 'U' or 'T'
        n: Matrix size
        f: Field F_q
        cap: Maximum group order

    Returns:
        Deterministically ordered elements; U elements are UnipotentElement
        and T elements TorusElement

    Raises:
        CapExceededError: Group order above cap
    """
    which = which.upper()
    order = group_order(which, n, f.q)
    if order > cap:
        raise CapExceededError("group_order", order, cap)

    if which == "U":
        elements: List[GLElement] = list(_enumerate_unipotent(f, n))
    elif which == "T":
        elements = list(_enumerate_torus(f, n))
    elif which == "B":
        elements = [t * u for t in _enumerate_torus(f, n) for u in _enumerate_unipotent(f, n)]
    else:
        elements = _enumerate_general(f, n)

    elements.sort()
    if len(elements) != order or len(set(elements)) != order:
        raise InvariantViolation(f"Enumerated {len(elements)} elements of {which}_{n}(F_{f.q}), expected {order}")
    logger.info(f"Enumerated {which}_{n}(F_{f.q}): {order} elements")
    return elements


# -- characters and one-parameter subgroups --------------------------------


@dataclass(frozen=True)
class Character:
    """Character diag(t_1..t_n) -> prod t_i^{c_i} of the diagonal torus"""

    exponents: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.exponents)

    def pair(self, gamma: "OneParamSubgroup") -> int:
        if len(gamma.exponents) != self.n:
            raise ValueError("Character and one-parameter subgroup have different ranks")
        return sum(c * a for c, a in zip(self.exponents, gamma.exponents))

    def evaluate(self, t: TorusElement) -> FieldElement:
        f = t.owner
        value = f.one
        for c, entry in zip(self.exponents, t.diagonal):
            value = value * entry**c
        return value


@dataclass(frozen=True)
class OneParamSubgroup:
    """Cocharacter t -> diag(t^{a_1}, ..., t^{a_n})"""

    exponents: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.exponents)

    def pair(self, chi: Character) -> int:
        return chi.pair(self)

    def is_positive(self) -> bool:
        """True when every positive root e_i - e_j (i < j) pairs to at least 1"""
        return all(a > b for a, b in zip(self.exponents, self.exponents[1:]))

    def at(self, t: FieldElement) -> TorusElement:
        if t.is_zero():
            raise ZeroDivisionError("A one-parameter subgroup is only defined at nonzero t")
        return diagonal_matrix(t.owner, [t**a for a in self.exponents])

    def to_dict(self) -> dict:
        return {"exponents": list(self.exponents)}


def root(n: int, i: int, j: int) -> Character:
    """The root e_i - e_j, 1-based"""
    exps = [0] * n
    exps[i - 1] += 1
    exps[j - 1] -= 1
    return Character(tuple(exps))


def positive_roots(n: int) -> List[Character]:
    return [root(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def simple_roots(n: int) -> List[Character]:
    return [root(n, i, i + 1) for i in range(1, n)]


def one_param_positive(n: int) -> OneParamSubgroup:
    """t -> diag(t^n, t^{n-1}, ..., t)"""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return OneParamSubgroup(tuple(range(n, 0, -1)))


def construct_positive_oneparam(roots: Sequence[Character]) -> OneParamSubgroup:
    """Integral cocharacter pairing to the same d >= 1 with every simple root

    Solves <chi_i, alpha> = 1 over Q, clears denominators, and, when every
    root kills the constant vector, shifts so the smallest exponent is 1.

    Args:
        roots: Linearly independent simple roots

    Returns:
        The one-parameter subgroup; for the GL_n simple roots this is
        (n, n-1, ..., 1)

    Raises:
        ValueError: Empty, ragged or dependent input, or an inconsistent system
    """
    if not roots:
        raise ValueError("No simple roots given")
    n = roots[0].n
    if any(chi.n != n for chi in roots):
        raise ValueError("Simple roots have different ranks")

    system = Matrix([list(chi.exponents) for chi in roots])
    if system.rank() < len(roots):
        raise ValueError("Simple roots are linearly dependent")
    try:
        solution, params = system.gauss_jordan_solve(Matrix([1] * len(roots)))
    except ValueError as e:
        raise ValueError(f"No cocharacter pairs to 1 with every simple root: {e}") from e
    if params.shape[0]:
        solution = solution.subs({tau: 0 for tau in params})

    values = [Rational(x) for x in solution]
    d = reduce(ilcm, [v.q for v in values], 1)
    alpha = [int(v * d) for v in values]
    if all(sum(chi.exponents) == 0 for chi in roots):
        shift = 1 - min(alpha)
        alpha = [a + shift for a in alpha]

    gamma = OneParamSubgroup(tuple(alpha))
    for chi in roots:
        if chi.pair(gamma) != d:
            raise InvariantViolation(f"Pairing with {chi.exponents} is {chi.pair(gamma)}, expected {d}")
    # sums of consecutive simple roots are the positive roots for GL_n
    for i in range(len(roots)):
        for j in range(i, len(roots)):
            total = tuple(sum(col) for col in zip(*(chi.exponents for chi in roots[i : j + 1])))
            if Character(total).pair(gamma) < 1:
                raise InvariantViolation(f"Root {total} pairs non-positively with {gamma.exponents}")
    logger.debug(f"Positive cocharacter {gamma.exponents} with pairing {d}")
    return gamma


def torus_conjugate(t: GLElement, u: UnipotentElement) -> UnipotentElement:
    """t u t^{-1}"""
    product = t.matrix @ u.matrix @ inverse(t.matrix)
    return UnipotentElement(product, check=False)


def monoid_act(a: Union[FieldElement, int], u: UnipotentElement, gamma: OneParamSubgroup) -> UnipotentElement:
    """Action of the multiplicative monoid (F_q, *) on U through gamma

    Entry (i, j), i < j, is multiplied by a^{a_i - a_j}; a = 0 sends every u
    to the identity, and for a != 0 the result is gamma(a) u gamma(a)^{-1}.

    Raises:
        ValueError: gamma is not positive or has the wrong rank
    """
    if not gamma.is_positive():
        raise ValueError(f"One-parameter subgroup {gamma.exponents} is not positive")
    if gamma.n != u.n:
        raise ValueError(f"Rank mismatch: gamma has {gamma.n} exponents, u is {u.n}x{u.n}")
    f = u.owner
    a_code = _code(f, a)
    if a_code == 0:
        return UnipotentElement.identity(f, u.n)
    entries = np.array(u.matrix.entries, copy=True)
    exps = gamma.exponents
    for i in range(u.n):
        for j in range(i + 1, u.n):
            if entries[i, j]:
                entries[i, j] = f.mul(int(entries[i, j]), f.power(a_code, exps[i] - exps[j]))
    return UnipotentElement(MatrixOverField(f, entries), check=False)


# -- root coordinates on U --------------------------------------------------


def root_positions(n: int) -> List[Tuple[int, int]]:
    """Factor order: columns left to right, within a column top to bottom"""
    return [(i, j) for j in range(2, n + 1) for i in range(1, j)]


def root_factorize(u: UnipotentElement) -> Dict[Tuple[int, int], FieldElement]:
    """Coordinates c_ij with u = prod E_ij(c_ij) in root_positions order

    Column j of u is peeled off as X_j = prod_i E_ij(c_ij); what remains
    is X_j^{-1} u, whose columns up to j are those of the identity.
    """
    f, n = u.owner, u.n
    residual = np.array(u.matrix.entries, copy=True)
    coords: Dict[Tuple[int, int], FieldElement] = {}
    for j in range(1, n):
        column = residual[:j, j].copy()
        for i in range(j):
            coords[(i + 1, j + 1)] = FieldElement(f, int(column[i]))
        for i in range(j):
            c = int(column[i])
            if c:
                residual[i] = f.sub_arr(residual[i], f.scale_arr(c, residual[j]))
    if not np.array_equal(residual, np.eye(n, dtype=np.int64)):
        raise InvariantViolation(f"Root factorization of {u!r} left a nontrivial residual")
    return coords


def root_reconstruct(f: Field, n: int, coords: Dict[Tuple[int, int], Union[int, FieldElement]]) -> UnipotentElement:
    """Inverse of root_factorize; missing coordinates are 0"""
    result = UnipotentElement.identity(f, n)
    for i, j in root_positions(n):
        c = coords.get((i, j), 0)
        if _code(f, c):
            result = result * elementary(f, n, i, j, c)
    return result


# -- finite subgroups --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteSubgroup:
    """A finite matrix group given by its sorted elements

    Attributes:
        parent: Descriptor of the ambient group ('U_3(F_2)', ...)
        elements: Sorted elements
        generators: Generators the group was closed from (may be empty)
    """

    parent: str
    elements: Tuple[GLElement, ...]
    generators: Tuple[GLElement, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def element_set(self) -> FrozenSet[GLElement]:
        return frozenset(self.elements)

    @cached_property
    def index(self) -> Dict[GLElement, int]:
        return {g: k for k, g in enumerate(self.elements)}

    @property
    def identity(self) -> GLElement:
        g = self.elements[0]
        return type(g).identity(g.owner, g.n)

    @property
    def owner(self) -> Field:
        return self.elements[0].owner

    @property
    def n(self) -> int:
        return self.elements[0].n

    def generating_set(self) -> Tuple[GLElement, ...]:
        return self.generators if self.generators else self.elements

    def __contains__(self, g: GLElement) -> bool:
        return g in self.element_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSubgroup):
            return NotImplemented
        return self.element_set == other.element_set

    def __hash__(self) -> int:
        return hash(self.element_set)

    def is_abelian(self) -> bool:
        gens = self.generating_set()
        return all(x * y == y * x for x in gens for y in gens)

    def is_unipotent(self) -> bool:
        return all(is_unitriangular(g.entries) for g in self.elements)

    def to_json(self) -> dict:
        return {
            "parent": self.parent,
            "order": self.order,
            "elements": [g.to_text() for g in self.elements],
        }


def mulclose(gens: Iterable[GLElement], identity: GLElement, cap: int = DEFAULT_CLOSURE_CAP) -> Set[GLElement]:
    """Breadth-first closure of gens under right multiplication"""
    gens = list(gens)
    elements = {identity}
    frontier = [identity]
    while frontier:
        fresh = []
        for g in gens:
            for x in frontier:
                y = x * g
                if y not in elements:
                    elements.add(y)
                    fresh.append(y)
                    if len(elements) > cap:
                        raise CapExceededError("closure_size", len(elements), cap)
        frontier = fresh
    return elements


def subgroup_closure(
    gens: Sequence[GLElement],
    identity: Optional[GLElement] = None,
    cap: int = DEFAULT_CLOSURE_CAP,
    parent: str = "",
) -> FiniteSubgroup:
    """Subgroup generated by gens

    Args:
        gens: Generators (may be empty)
        identity: Identity element; required when gens is empty
        cap: Maximum subgroup order
        parent: Descriptor recorded on the result

    Raises:
        CapExceededError: Closure grows past cap
    """
    gens = tuple(gens)
    if identity is None:
        if not gens:
            raise ValueError("An identity element is needed to close an empty generator list")
        identity = type(gens[0]).identity(gens[0].owner, gens[0].n)
    elements = mulclose(gens, identity, cap)
    return FiniteSubgroup(parent, tuple(sorted(elements)), gens)


def commutator(x: GLElement, y: GLElement) -> GLElement:
    """[x, y] = x^{-1} y^{-1} x y"""
    return x.inverse() * y.inverse() * x * y


@dataclass(frozen=True)
class NilpotenceData:
    """Lower central series summary

    Attributes:
        nilpotency_class: Steps to reach the trivial group, None if it stalls
        exponent: Least common multiple of element orders
        series_orders: Orders of G = g_1 > g_2 > ... down to 1
    """

    nilpotency_class: Optional[int]
    exponent: int
    series_orders: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "class": self.nilpotency_class,
            "exponent": self.exponent,
            "series_orders": list(self.series_orders),
        }


def nilpotence_data(g: FiniteSubgroup, cap: int = DEFAULT_CLOSURE_CAP) -> NilpotenceData:
    """Nilpotency class, exponent and lower central series orders

    For subgroups of U_n(F_q) the bounds class <= n and exponent <= p^n are
    asserted.

    Raises:
        InvariantViolation: A unipotent group breaks the bounds
    """
    identity = g.identity
    current: Set[GLElement] = set(g.elements)
    orders = [len(current)]
    nil_class: Optional[int] = 0
    while len(current) > 1:
        comms = {commutator(x, y) for x in current for y in g.elements}
        following = mulclose(comms, identity, cap)
        if len(following) == len(current):
            nil_class = None
            break
        current = following
        orders.append(len(current))
        nil_class += 1

    exponent = reduce(ilcm, (x.order() for x in g.elements), 1)
    data = NilpotenceData(nil_class, int(exponent), tuple(orders))

    if g.is_unipotent():
        n, p = g.n, g.owner.p
        if nil_class is None or nil_class > n:
            raise InvariantViolation(f"Unipotent group of order {g.order} has class {nil_class} > {n}")
        if exponent > p**n:
            raise InvariantViolation(f"Unipotent group of order {g.order} has exponent {exponent} > {p ** n}")
    return data


def center(g: FiniteSubgroup) -> FiniteSubgroup:
    """Elements commuting with every generator"""
    gens = g.generating_set()
    elements = tuple(x for x in g.elements if all(x * y == y * x for y in gens))
    return FiniteSubgroup(g.parent, elements)


def abelian_invariants(g: FiniteSubgroup, cap: int = DEFAULT_CLOSURE_CAP) -> Tuple[int, ...]:
    """Invariant factors of G/[G, G] for a p-group, ascending

    Read off from the counts |Omega_k| of quotient elements of order
    dividing p^k.

    Raises:
        ValueError: The abelianization is not a p-group
    """
    identity = g.identity
    derived = mulclose({commutator(x, y) for x in g.elements for y in g.elements}, identity, cap)
    quotient_order = g.order // len(derived)
    if quotient_order == 1:
        return ()
    primes = primefactors(quotient_order)
    if len(primes) != 1:
        raise ValueError(f"Abelianization of order {quotient_order} is not a p-group")
    p = primes[0]

    representatives = {min(x * d for d in derived) for x in g.elements}
    counts: Counter = Counter()
    for rep in representatives:
        k, power = 1, rep
        while power not in derived:
            power = power * rep
            k += 1
        counts[k] += 1

    # |Omega_k| for k = 0, 1, ...; ranks r_k = log_p |Omega_k / Omega_{k-1}|
    ranks = []
    previous, level = 1, 0
    while previous < quotient_order:
        level += 1
        omega = sum(c for order, c in counts.items() if (p**level) % order == 0)
        ratio, r = omega // previous, 0
        while ratio > 1:
            ratio //= p
            r += 1
        ranks.append(r)
        previous = omega
    parts = [sum(1 for r in ranks if r >= i) for i in range(1, ranks[0] + 1)]
    return tuple(sorted(p**part for part in parts))


def element_order_profile(g: FiniteSubgroup) -> Tuple[Tuple[int, int], ...]:
    """Sorted (order, count) pairs"""
    return tuple(sorted(Counter(x.order() for x in g.elements).items()))


def fingerprint(g: FiniteSubgroup) -> Tuple:
    """(order, class, exponent, abelian invariants, element-order multiset)"""
    data = nilpotence_data(g)
    return (
        g.order,
        data.nilpotency_class,
        data.exponent,
        abelian_invariants(g),
        element_order_profile(g),
    )


def small_generating_set(g: FiniteSubgroup) -> List[GLElement]:
    """Greedy generating set: add each element not yet generated, in order"""
    gens: List[GLElement] = []
    span = {g.identity}
    for x in g.elements:
        if x not in span:
            gens.append(x)
            span = mulclose(gens, g.identity)
    return gens


def _extend_hom(
    gens: Sequence[GLElement], images: Sequence[GLElement], source_id: GLElement, target_id: GLElement
) -> Optional[Dict[GLElement, GLElement]]:
    hom = {source_id: target_id}
    frontier = [source_id]
    while frontier:
        fresh = []
        for x in frontier:
            for s, t in zip(gens, images):
                y = x * s
                image = hom[x] * t
                known = hom.get(y)
                if known is None:
                    hom[y] = image
                    fresh.append(y)
                elif known != image:
                    return None
        frontier = fresh
    return hom


def are_isomorphic(g: FiniteSubgroup, h: FiniteSubgroup, max_order: int = ISOMORPHISM_LIMIT) -> bool:
    """Exhaustive isomorphism test by generator images

    Raises:
        CapExceededError: Order above max_order
    """
    if g.order != h.order:
        return False
    if g.order == 1:
        return True
    if g.order > max_order:
        raise CapExceededError("isomorphism_order", g.order, max_order)
    if fingerprint(g) != fingerprint(h):
        return False

    gens = small_generating_set(g)
    by_order: Dict[int, List[GLElement]] = {}
    for y in h.elements:
        by_order.setdefault(y.order(), []).append(y)
    candidates = [by_order.get(s.order(), []) for s in gens]
    for images in itertools.product(*candidates):
        hom = _extend_hom(gens, images, g.identity, h.identity)
        if hom is not None and len(set(hom.values())) == g.order:
            return True
    return False


# -- census and word sets -----------------------------------------------------


@dataclass
class CensusResult:
    """Isomorphism classes of m-generated subgroups of U_n(F_q)

    Attributes:
        n: Matrix size
        q: Field order
        m: Generator count
        tuples_scanned: Number of m-tuples closed
        distinct_subgroups: Number of distinct subgroups met
        classes: One (fingerprint, representative) pair per class, sorted
        unresolved_collisions: Subgroups merged into a class by fingerprint alone
    """

    n: int
    q: int
    m: int
    tuples_scanned: int
    distinct_subgroups: int
    classes: List[Tuple[Tuple, FiniteSubgroup]] = field(default_factory=list)
    unresolved_collisions: int = 0

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "m": self.m,
            "tuples_scanned": self.tuples_scanned,
            "distinct_subgroups": self.distinct_subgroups,
            "class_count": self.class_count,
            "unresolved_collisions": self.unresolved_collisions,
            "classes": [
                {
                    "order": fp[0],
                    "class": fp[1],
                    "exponent": fp[2],
                    "abelian_invariants": list(fp[3]),
                    "element_orders": [list(pair) for pair in fp[4]],
                    "generators": [s.to_text() for s in rep.generators],
                }
                for fp, rep in self.classes
            ],
        }


def _tuples(f: Field, n: int, m: int, cap: int) -> Tuple[List[GLElement], List[Tuple[GLElement, ...]]]:
    size = f.q ** (n * (n - 1) // 2)
    if size**m > cap:
        raise CapExceededError("scan_size", size**m, cap)
    unipotent = enumerate_group("U", n, f, cap)
    return unipotent, list(itertools.product(unipotent, repeat=m))


def subgroup_census(
    n: int, f: Field, m: int, cap: int = DEFAULT_GROUP_CAP, isomorphism_limit: int = ISOMORPHISM_LIMIT
) -> CensusResult:
    """Isomorphism classes of subgroups of U_n(F_q) generated by m elements

    Every m-tuple is closed; distinct subgroups are grouped by fingerprint,
    and fingerprint collisions are split by exhaustive isomorphism search
    for orders up to isomorphism_limit. Larger colliding subgroups are
    merged and counted in unresolved_collisions.

    Raises:
        CapExceededError: More than cap tuples
    """
    unipotent, tuples = _tuples(f, n, m, cap)
    identity = unipotent[0]
    parent = f"U_{n}(F_{f.q})"

    subgroups: Dict[FrozenSet[GLElement], FiniteSubgroup] = {}
    for gens in tuples:
        sub = subgroup_closure(gens, identity, parent=parent)
        subgroups.setdefault(sub.element_set, sub)

    classes: Dict[Tuple, List[FiniteSubgroup]] = {}
    unresolved = 0
    for sub in subgroups.values():
        fp = fingerprint(sub)
        reps = classes.setdefault(fp, [])
        if not reps:
            reps.append(sub)
        elif sub.order <= isomorphism_limit:
            if not any(are_isomorphic(sub, rep) for rep in reps):
                reps.append(sub)
        else:
            unresolved += 1
            logger.warning(f"Order {sub.order} above isomorphism limit; classified by fingerprint only")

    ordered = sorted(((fp, rep) for fp, reps in classes.items() for rep in reps), key=lambda item: item[0])
    result = CensusResult(n, f.q, m, len(tuples), len(subgroups), ordered, unresolved)
    logger.info(f"Census {parent}, m={m}: {len(subgroups)} subgroups in {result.class_count} classes")
    return result


def evaluate_word(word: Sequence[int], gens: Sequence[GLElement], identity: GLElement) -> GLElement:
    """Evaluate a word of signed 1-based generator indices (-k is the inverse of x_k)"""
    result = identity
    for letter in word:
        if letter == 0 or abs(letter) > len(gens):
            raise ValueError(f"Letter {letter} out of range for {len(gens)} generators")
        g = gens[abs(letter) - 1]
        result = result * (g if letter > 0 else g.inverse())
    return result


@dataclass
class WordSetResult:
    """Words whose values on any m-tuple fill the generated subgroup

    Attributes:
        words: Words as tuples of signed generator indices
        tuples_checked: Number of tuples the equality was verified on
        distinct_subgroups: Number of distinct generated subgroups
    """

    n: int
    q: int
    m: int
    words: List[Tuple[int, ...]]
    tuples_checked: int
    distinct_subgroups: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "m": self.m,
            "words": [list(w) for w in self.words],
            "word_count": len(self.words),
            "tuples_checked": self.tuples_checked,
            "distinct_subgroups": self.distinct_subgroups,
        }


def word_set_discover(n: int, f: Field, m: int, cap: int = DEFAULT_GROUP_CAP) -> WordSetResult:
    """Finite word set W with {w(s) : w in W} = <s> for every m-tuple s of U_n(F_q)

    Words are searched breadth-first over positive letters (finite groups
    need no inverses). A word is extended only when its value tuple over all
    m-tuples is new, and kept only when it reaches an element some tuple has
    not produced yet.

    Raises:
        CapExceededError: More than cap tuples
        InvariantViolation: Verification of the final word set failed
    """
    unipotent, tuples = _tuples(f, n, m, cap)
    identity = unipotent[0]
    targets = [mulclose(t, identity) for t in tuples]
    covered: List[Set[GLElement]] = [{identity} for _ in tuples]

    words: List[Tuple[int, ...]] = [()]
    start = tuple(identity for _ in tuples)
    seen = {start}
    frontier: List[Tuple[Tuple[int, ...], Tuple[GLElement, ...]]] = [((), start)]

    def complete() -> bool:
        return all(len(c) == len(t) for c, t in zip(covered, targets))

    while frontier and not complete():
        fresh = []
        for word, values in frontier:
            for letter in range(1, m + 1):
                extended = tuple(v * t[letter - 1] for v, t in zip(values, tuples))
                if extended in seen:
                    continue
                seen.add(extended)
                fresh.append((word + (letter,), extended))
                if any(v not in c for v, c in zip(extended, covered)):
                    words.append(word + (letter,))
                    for v, c in zip(extended, covered):
                        c.add(v)
        frontier = fresh
        logger.debug(f"Word search: {len(words)} words, frontier {len(frontier)}")

    for t, target in zip(tuples, targets):
        values = {evaluate_word(w, t, identity) for w in words}
        if values != target:
            raise InvariantViolation(f"Word set misses part of the subgroup generated by {[g.to_text() for g in t]}")

    distinct = len({frozenset(t) for t in targets})
    logger.info(f"Word set for U_{n}(F_{f.q}), m={m}: {len(words)} words verified on {len(tuples)} tuples")
    return WordSetResult(n, f.q, m, words, len(tuples), distinct)


# -- flags --------------------------------------------------------------------


def standard_subspace(f: Field, n: int, k: int) -> Subspace:
    """span(e_1, ..., e_k)"""
    return Subspace(f, n, np.eye(n, dtype=np.int64)[:k], range(k))


def flag_to_standard(fl) -> GLElement:
    """g with g V_i = span(e_1..e_i) for a complete flag V_1 < ... < V_{n-1}

    The adapted basis takes b_i as the first RREF row of V_i outside
    V_{i-1} and b_n as the first unit vector outside V_{n-1}; g inverts the
    matrix with columns b_i, so the standard flag maps to the identity.

    Args:
        fl: A Flag (iterable of Subspaces with owner and ambient attributes)

    Raises:
        ValueError: The flag is not complete
        InvariantViolation: The constructed g fails to standardize the flag
    """
    spaces = list(fl)
    f, n = fl.owner, fl.ambient
    if [s.dim for s in spaces] != list(range(1, n)):
        raise ValueError(f"Flag with dimensions {[s.dim for s in spaces]} is not complete in F^{n}")

    columns = []
    previous = Subspace.zero(f, n)
    for s in spaces:
        if not s.contains_subspace(previous):
            raise ValueError("Flag members are not nested")
        columns.append(next(row for row in s.basis if not previous.contains(row)))
        previous = s
    units = np.eye(n, dtype=np.int64)
    columns.append(next(e for e in units if not previous.contains(e)))

    adapted = MatrixOverField(f, np.array(columns, dtype=np.int64).T)
    g = GLElement(inverse(adapted), check=False)
    for k, s in enumerate(spaces, start=1):
        if g.act(s) != standard_subspace(f, n, k):
            raise InvariantViolation(f"flag_to_standard failed at member {k}")
    return g


__all__ = [
    "GLElement",
    "UnipotentElement",
    "TorusElement",
    "Character",
    "OneParamSubgroup",
    "FiniteSubgroup",
    "NilpotenceData",
    "CensusResult",
    "WordSetResult",
    "GROUP_KINDS",
    "elementary",
    "diagonal_matrix",
    "permutation_matrix",
    "permutation_sign",
    "gl_generators",
    "group_order",
    "enumerate_group",
    "root",
    "positive_roots",
    "simple_roots",
    "one_param_positive",
    "construct_positive_oneparam",
    "torus_conjugate",
    "monoid_act",
    "root_positions",
    "root_factorize",
    "root_reconstruct",
    "mulclose",
    "subgroup_closure",
    "commutator",
    "nilpotence_data",
    "center",
    "abelian_invariants",
    "fingerprint",
    "are_isomorphic",
    "subgroup_census",
    "evaluate_word",
    "word_set_discover",
    "standard_subspace",
    "flag_to_standard",
]
