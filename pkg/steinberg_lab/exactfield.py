"""Exact arithmetic in finite fields F_{p^e}

Elements are stored as integer codes: the code of a_0 + a_1 x + ... +
a_{e-1} x^{e-1} is a_0 + a_1 p + ... + a_{e-1} p^{e-1}. Code order is the
canonical enumeration order (0 first; F_4 enumerates as 0, 1, x, x+1).

Addition and multiplication use numpy lookup tables for small extension
fields, plain modular arithmetic for prime fields, and polynomial arithmetic
otherwise. The vectorized `*_arr` methods are what the linear algebra layer
builds on.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from sympy import isprime, primefactors
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from shared.utils.errors import CapExceededError, FieldMismatchError, InvariantViolation

logger = logging.getLogger(__name__)

DEFAULT_FIELD_CAP = 1 << 16
TABLE_LIMIT = 1024
TRACE_CHECK_LIMIT = 256


class Field:
    """The finite field F_q, q = p^e, in the polynomial basis

    Attributes:
        p: Characteristic
        e: Extension degree
        q: Number of elements
        modulus: Little-endian coefficients of the monic modulus (length e+1);
            (0, 1) is the placeholder for prime fields
    """

    def __init__(self, p: int, e: int, modulus: Tuple[int, ...]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = tuple(modulus)
        self._powers = [p**i for i in range(e)]

        self._add_table = None
        self._mul_table = None
        self._neg_table = None
        self._inv_table = None
        if e > 1 and self.q <= TABLE_LIMIT:
            self._build_tables()
        elif e > 1:
            self._add_ufunc = np.frompyfunc(self._add_codes, 2, 1)
            self._mul_ufunc = np.frompyfunc(self._mul_codes, 2, 1)
            self._neg_ufunc = np.frompyfunc(self._neg_code, 1, 1)

    # -- identity -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, e={self.e}, q={self.q})"

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    # -- code <-> coefficients -------------------------------------------

    def coeffs(self, code: int) -> Tuple[int, ...]:
        """Little-endian F_p coefficient vector of an element code"""
        out = []
        for _ in range(self.e):
            code, digit = divmod(code, self.p)
            out.append(digit)
        return tuple(out)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        """Element code of a little-endian coefficient vector"""
        if len(coeffs) != self.e:
            raise ValueError(f"Expected {self.e} coefficients, got {len(coeffs)}")
        return sum((c % self.p) * w for c, w in zip(coeffs, self._powers))

    # -- scalar arithmetic on codes --------------------------------------

    def _add_codes(self, a: int, b: int) -> int:
        ca, cb = self.coeffs(a), self.coeffs(b)
        return self.from_coeffs([x + y for x, y in zip(ca, cb)])

    def _neg_code(self, a: int) -> int:
        return self.from_coeffs([-x for x in self.coeffs(a)])

    def _mul_codes(self, a: int, b: int) -> int:
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        # reduce by the monic modulus from the top degree down
        for deg in range(len(prod) - 1, self.e - 1, -1):
            c = prod[deg] % self.p
            if c:
                shift = deg - self.e
                for k, m in enumerate(self.modulus):
                    prod[shift + k] -= c * m
        return self.from_coeffs(prod[: self.e])

    def _build_tables(self) -> None:
        """Pre-compute addition, multiplication, negation and inverse tables"""
        q = self.q
        self._add_table = np.zeros((q, q), dtype=np.int64)
        self._mul_table = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                s = self._add_codes(a, b)
                m = self._mul_codes(a, b)
                self._add_table[a, b] = self._add_table[b, a] = s
                self._mul_table[a, b] = self._mul_table[b, a] = m
        self._neg_table = np.array([self._neg_code(a) for a in range(q)], dtype=np.int64)
        self._inv_table = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            hits = np.nonzero(self._mul_table[a] == 1)[0]
            if len(hits) != 1:
                raise InvariantViolation(
                    f"Element {a} of {self!r} has {len(hits)} inverses; modulus not irreducible"
                )
            self._inv_table[a] = hits[0]
        logger.debug(f"Built arithmetic tables for {self!r}")

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return int(self._add_table[a, b])
        return self._add_codes(a, b)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self._neg_table is not None:
            return int(self._neg_table[a])
        return self._neg_code(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        if self._mul_table is not None:
            return int(self._mul_table[a, b])
        return self._mul_codes(a, b)

    def power(self, a: int, k: int) -> int:
        """a^k for k >= 0 (0^0 = 1); negative k inverts first"""
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self._inv_table is not None:
            return int(self._inv_table[a])
        return self.power(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # -- vectorized arithmetic on numpy code arrays ----------------------

    def add_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._add_ufunc(a, b).astype(np.int64)

    def neg_arr(self, a: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (-np.asarray(a)) % self.p
        if self._neg_table is not None:
            return self._neg_table[a]
        return self._neg_ufunc(a).astype(np.int64)

    def sub_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (np.asarray(a) * np.asarray(b)) % self.p
        if self._mul_table is not None:
            return self._mul_table[a, b]
        return self._mul_ufunc(a, b).astype(np.int64)

    def scale_arr(self, c: int, a: np.ndarray) -> np.ndarray:
        """Multiply every entry of a by the scalar code c"""
        return self.mul_arr(np.full_like(np.asarray(a), c), a)

    def dot_arr(self, a: np.ndarray, b: np.ndarray) -> int:
        """Dot product of two code vectors"""
        if self.e == 1:
            return int(np.dot(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % self.p)
        total = 0
        for x in self.mul_arr(a, b).ravel():
            total = self.add(total, int(x))
        return total

    def sum_arr(self, a: np.ndarray, axis: int = 0) -> np.ndarray:
        """Field sum along an axis"""
        a = np.asarray(a)
        if self.e == 1:
            return a.sum(axis=axis) % self.p
        a = np.moveaxis(a, axis, 0)
        acc = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            acc = self.add_arr(acc, row)
        return acc

    # -- elements --------------------------------------------------------

    def __call__(self, value: Union[int, Sequence[int]]) -> "FieldElement":
        """Element from a code, or from a little-endian coefficient vector"""
        if isinstance(value, (int, np.integer)):
            if self.e == 1:
                return FieldElement(self, int(value) % self.p)
            if not 0 <= value < self.q:
                raise ValueError(f"Code {value} out of range for {self!r}")
            return FieldElement(self, int(value))
        return FieldElement(self, self.from_coeffs(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def x(self) -> "FieldElement":
        """The class of the polynomial variable (the generator p^1 code)"""
        if self.e == 1:
            raise ValueError("Prime fields have no polynomial generator")
        return FieldElement(self, self.p)

    def elements(self) -> List["FieldElement"]:
        return [FieldElement(self, c) for c in range(self.q)]

    def nonzero_elements(self) -> List["FieldElement"]:
        return [FieldElement(self, c) for c in range(1, self.q)]

    def prime_subfield(self) -> "Field":
        return field_make(self.p, 1)

    # -- text form -------------------------------------------------------

    def to_text(self, code: int) -> str:
        """Canonical little-endian coefficient string ('01' is x in F_4)"""
        digits = self.coeffs(code)
        if self.p <= 10:
            return "".join(str(d) for d in digits)
        return ".".join(str(d) for d in digits)

    def from_text(self, text: str) -> "FieldElement":
        """Inverse of to_text"""
        text = text.strip()
        if self.p <= 10:
            digits = [int(ch) for ch in text]
        else:
            digits = [int(part) for part in text.split(".")]
        if len(digits) != self.e or any(not 0 <= d < self.p for d in digits):
            raise ValueError(f"Invalid element text {text!r} for {self!r}")
        return FieldElement(self, self.from_coeffs(digits))


@dataclass(frozen=True)
class FieldElement:
    """An element of a finite field

    Attributes:
        owner: Field the element lives in
        code: Integer code in [0, q)
    """

    owner: Field
    code: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.owner.coeffs(self.code)

    def is_zero(self) -> bool:
        return self.code == 0

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"Expected FieldElement, got {type(other).__name__}")
        if other.owner != self.owner:
            raise FieldMismatchError(f"{self.owner!r} vs {other.owner!r}")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, (int, np.integer)):
            return self.owner(int(other) % self.owner.p) if self.owner.e > 1 else self.owner(int(other))
        self._check(other)
        return other

    def __add__(self, other) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(self.owner, self.owner.add(self.code, other.code))

    __radd__ = __add__

    def __sub__(self, other) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(self.owner, self.owner.sub(self.code, other.code))

    def __rsub__(self, other) -> "FieldElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(self.owner, self.owner.mul(self.code, other.code))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(self.owner, self.owner.div(self.code, other.code))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.owner, self.owner.neg(self.code))

    def __pow__(self, k: int) -> "FieldElement":
        return FieldElement(self.owner, self.owner.power(self.code, k))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.owner, self.owner.inv(self.code))

    def frobenius(self) -> "FieldElement":
        """a -> a^p"""
        return self ** self.owner.p

    def __int__(self) -> int:
        return self.code

    def __str__(self) -> str:
        return self.owner.to_text(self.code)

    def __repr__(self) -> str:
        return f"FieldElement({self.owner.to_text(self.code)!r} in F_{self.owner.q})"


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Exact field arithmetic by operation name

    Args:
        a: Left operand
        b: Right operand, same owner field
        op: One of 'add', 'sub', 'mul', 'div'

    Returns:
        Canonical result

    Raises:
        FieldMismatchError: Owners differ
        ZeroDivisionError: Division by zero
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown operation: {op}")


@lru_cache(maxsize=None)
def _least_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """Least monic irreducible of degree e over F_p, ordered by lower-coefficient code"""
    for lower in range(p**e):
        coeffs = []
        rest = lower
        for _ in range(e):
            rest, digit = divmod(rest, p)
            coeffs.append(digit)
        coeffs.append(1)
        # galoistools wants big-endian coefficient lists
        if gf_irreducible_p(list(reversed(coeffs)), p, ZZ):
            return tuple(coeffs)
    raise InvariantViolation(f"No monic irreducible of degree {e} over F_{p}")


@lru_cache(maxsize=None)
def _cached_field(p: int, e: int) -> Field:
    modulus = (0, 1) if e == 1 else _least_irreducible(p, e)
    field = Field(p, e, modulus)
    logger.debug(f"Constructed {field!r} with modulus {modulus}")
    return field


def field_make(p: int, e: int = 1, cap: int = DEFAULT_FIELD_CAP) -> Field:
    """Construct F_{p^e} with the canonical modulus

    Args:
        p: Prime characteristic
        e: Extension degree >= 1
        cap: Maximum allowed field order

    Returns:
        The field; repeated calls return the same instance

    Raises:
        ValueError: p not prime or e < 1
        CapExceededError: p^e > cap
    """
    if not isprime(p):
        raise ValueError(f"Characteristic must be prime, got {p}")
    if e < 1:
        raise ValueError(f"Extension degree must be >= 1, got {e}")
    if p**e > cap:
        raise CapExceededError("field_order", p**e, cap)
    return _cached_field(p, e)


def field_of_order(q: int, cap: int = DEFAULT_FIELD_CAP) -> Field:
    """F_q for a prime power q"""
    factors = primefactors(q)
    if len(factors) != 1:
        raise ValueError(f"Field order must be a prime power, got {q}")
    p = factors[0]
    e, rest = 0, q
    while rest > 1:
        rest //= p
        e += 1
    return field_make(p, e, cap)


def enumerate_field(f: Field) -> List[FieldElement]:
    """All q elements in canonical (code) order"""
    return f.elements()


def iter_vectors(f: Field, length: int) -> Iterator[Tuple[int, ...]]:
    """All code vectors of a given length, first coordinate varying fastest"""
    for index in range(f.q**length):
        vec = []
        for _ in range(length):
            index, digit = divmod(index, f.q)
            vec.append(digit)
        yield tuple(vec)


def primitive_element(f: Field) -> FieldElement:
    """First element (in code order) generating the multiplicative group"""
    if f.q == 2:
        return f.one
    order = f.q - 1
    exponents = [order // r for r in primefactors(order)]
    for code in range(2, f.q):
        if all(f.power(code, k) != 1 for k in exponents):
            return FieldElement(f, code)
    raise InvariantViolation(f"No primitive element found in {f!r}")


@dataclass(frozen=True)
class AdditiveMap:
    """An F_p-linear map F_q -> F_p

    Attributes:
        owner: Source field
        values: Images (in [0, p)) of the basis 1, x, ..., x^{e-1}
    """

    owner: Field
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.owner.e:
            raise ValueError(f"Additive map needs {self.owner.e} values, got {len(self.values)}")
        if any(not 0 <= v < self.owner.p for v in self.values):
            raise ValueError(f"Additive map values must lie in [0, {self.owner.p})")

    def __call__(self, a: Union[FieldElement, int]) -> int:
        code = a.code if isinstance(a, FieldElement) else int(a)
        coeffs = self.owner.coeffs(code)
        return sum(c * v for c, v in zip(coeffs, self.values)) % self.owner.p

    def is_zero(self) -> bool:
        return not any(self.values)

    def kernel(self) -> List[Tuple[int, ...]]:
        """F_p-basis of the kernel, as coefficient vectors"""
        p, e = self.owner.p, self.owner.e
        units = [tuple(int(i == j) for i in range(e)) for j in range(e)]
        if self.is_zero():
            return units
        k = next(i for i, v in enumerate(self.values) if v)
        inv_k = pow(self.values[k], p - 2, p)
        basis = []
        for j in range(e):
            if j == k:
                continue
            vec = [0] * e
            vec[j] = 1
            vec[k] = (-self.values[j] * inv_k) % p
            basis.append(tuple(vec))
        return basis


def absolute_trace(a: FieldElement) -> int:
    """a + a^p + ... + a^{p^{e-1}}, returned as an integer in [0, p)"""
    f = a.owner
    total, term = 0, a.code
    for _ in range(f.e):
        total = f.add(total, term)
        term = f.power(term, f.p)
    if total >= f.p:
        raise InvariantViolation(f"Trace of {a!r} left the prime field")
    return total


def trace_map(f: Field) -> AdditiveMap:
    """The absolute trace F_q -> F_p as an AdditiveMap

    For q <= 256 the linear formula is checked against the power sum on every
    element, which also establishes additivity and surjectivity.
    """
    values = tuple(absolute_trace(FieldElement(f, f.p**i)) for i in range(f.e))
    trace = AdditiveMap(f, values)
    if f.q <= TRACE_CHECK_LIMIT:
        for a in f.elements():
            if trace(a) != absolute_trace(a):
                raise InvariantViolation(f"Trace formula disagrees at {a!r}")
    if trace.is_zero():
        raise InvariantViolation(f"Trace of {f!r} is not surjective")
    return trace


__all__ = [
    "Field",
    "FieldElement",
    "AdditiveMap",
    "DEFAULT_FIELD_CAP",
    "arith",
    "field_make",
    "field_of_order",
    "enumerate_field",
    "iter_vectors",
    "primitive_element",
    "absolute_trace",
    "trace_map",
]
