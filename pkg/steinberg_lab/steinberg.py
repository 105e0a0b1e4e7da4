"""The Steinberg module St(GL_n(F_q); F)

St is the kernel of the top boundary map of the building, a subspace of
the chamber space. It has the apartment basis {u A_0 : u in U}, where A_0
is the alternating sum of the chambers of the standard frame, so the
isomorphism iota: St -> F[U] is a coordinate lookup and the augmentation
of iota(x) is the coefficient of x on the standard (B-fixed) chamber.

Vectors are numpy code arrays in chamber coordinates. Generator matrices in
apartment coordinates act on column vectors, like the chamber actions.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import CapExceededError, InvariantViolation, SteinbergLabError

from .building import (
    Flag,
    ReducedComplex,
    apply_permutation,
    build_complex,
    chamber_action,
    chamber_permutation,
    is_cycle,
    steinberg_kernel,
)
from .exactfield import Field, FieldElement, field_make, iter_vectors
from .exactlinalg import MatrixOverField, Subspace, inverse, kernel_basis, matmul_codes, rref_codes
from .grpring import GroupRingElement, GroupTable, LeftIdeal, regular_action, spin
from .matgroup import (
    FiniteSubgroup,
    GLElement,
    UnipotentElement,
    elementary,
    enumerate_group,
    flag_to_standard,
    gl_generators,
    permutation_sign,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_SPIN_BUDGET = 1 << 20
DEFAULT_IRREDUCIBLE_DIM = 256
NORTON_ATTEMPTS = 200


class Frame:
    """n lines spanning F^n, stored in canonical order"""

    __slots__ = ("lines",)

    def __init__(self, lines: Sequence[Subspace]):
        lines = sorted(lines)
        if not lines:
            raise ValueError("A frame needs at least one line")
        n = lines[0].ambient
        if len(lines) != n or any(s.dim != 1 or s.ambient != n for s in lines):
            raise ValueError(f"A frame of F^{n} consists of {n} lines")
        total = Subspace.span(lines[0].owner, n, [s.basis[0] for s in lines])
        if total.dim != n:
            raise ValueError("Frame lines do not span the space")
        self.lines = tuple(lines)

    @classmethod
    def standard(cls, f: Field, n: int) -> "Frame":
        eye = np.eye(n, dtype=np.int64)
        return cls([Subspace(f, n, eye[k : k + 1], (k,)) for k in range(n)])

    @property
    def owner(self) -> Field:
        return self.lines[0].owner

    @property
    def n(self) -> int:
        return len(self.lines)

    def act(self, g: GLElement) -> "Frame":
        return Frame([g.act(s) for s in self.lines])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.lines == other.lines

    def __hash__(self) -> int:
        return hash(self.lines)


def apartment_class(fr: Frame, c: ReducedComplex) -> np.ndarray:
    """Sum over orderings of the frame of sign times the flag of partial spans

    Raises:
        InvariantViolation: The result is not a cycle
    """
    f, n = fr.owner, fr.n
    if f != c.field or n != c.n:
        raise ValueError("Frame and complex disagree on field or dimension")
    vector = np.zeros(len(c.chambers), dtype=np.int64)
    coeff = c.coeff
    for perm in itertools.permutations(range(n)):
        rows = [fr.lines[k].basis[0] for k in perm]
        flag = Flag([Subspace.span(f, n, rows[:k]) for k in range(1, n)], f, n)
        k = c.chamber_of(flag)
        sign = 1 if permutation_sign(perm) > 0 else coeff.neg(1)
        vector[k] = coeff.add(int(vector[k]), sign)
    if not is_cycle(c, vector):
        raise InvariantViolation("Apartment class is not a cycle")
    return vector


@dataclass(eq=False)
class SteinbergModule:
    """St(GL_n(F_q); F_ell) with its apartment basis

    Attributes:
        complex: Reduced chain complex of the building
        kernel: Kernel of the top boundary
        unipotent: Elements of U(F_q), identity first
        table: Group table of U, indexed like unipotent
        apartment: |U| x |chambers| array; row k is alpha(u_k) = u_k A_0
        standard_chamber: Index of the B-fixed chamber
        generators: Generators of GL_n(F_q)
        actions: Chamber action matrices of the generators
    """

    complex: ReducedComplex
    kernel: Subspace
    unipotent: List[UnipotentElement]
    table: GroupTable
    apartment: np.ndarray
    standard_chamber: int
    generators: List[GLElement]
    actions: List[MatrixOverField]
    pivot_columns: List[int] = field(default_factory=list)
    block_inverse: Optional[np.ndarray] = None
    coord_actions: List[MatrixOverField] = field(default_factory=list)
    _perm_cache: Dict[GLElement, List[int]] = field(default_factory=dict)
    _standardizers: Dict[int, GLElement] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.complex.n

    @property
    def q(self) -> int:
        return self.complex.q

    @property
    def coeff(self) -> Field:
        return self.complex.coeff

    @property
    def ell(self) -> int:
        return self.coeff.q

    @property
    def dim(self) -> int:
        return self.kernel.dim

    @property
    def chamber_count(self) -> int:
        return len(self.complex.chambers)

    @property
    def a0(self) -> np.ndarray:
        return self.apartment[0]

    def permutation(self, g: GLElement) -> List[int]:
        perm = self._perm_cache.get(g)
        if perm is None:
            perm = chamber_permutation(g, self.complex)
            self._perm_cache[g] = perm
        return perm

    def act(self, g: GLElement, x: np.ndarray) -> np.ndarray:
        """g x in chamber coordinates"""
        return apply_permutation(self.coeff, self.permutation(g), x)

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """c with c . apartment = x

        Raises:
            ValueError: x is not in St
        """
        f = self.coeff
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.chamber_count,):
            raise ValueError(f"Expected a vector of length {self.chamber_count}, got shape {x.shape}")
        coords = matmul_codes(f, x[self.pivot_columns].reshape(1, -1), self.block_inverse)[0]
        if not np.array_equal(matmul_codes(f, coords.reshape(1, -1), self.apartment)[0], x):
            raise ValueError("Vector is not a cycle of the building")
        return coords

    def from_coordinates(self, coords: Sequence[int]) -> np.ndarray:
        return matmul_codes(self.coeff, np.asarray(coords, dtype=np.int64).reshape(1, -1), self.apartment)[0]

    def standardizer(self, chamber: int) -> GLElement:
        g = self._standardizers.get(chamber)
        if g is None:
            g = flag_to_standard(self.complex.chamber_flag(chamber))
            self._standardizers[chamber] = g
        return g

    def random_vector(self, rng: np.random.Generator) -> np.ndarray:
        coords = rng.integers(0, self.coeff.q, size=self.dim, dtype=np.int64)
        return self.from_coordinates(coords)

    def vectors(self):
        """Every vector of St, ordered by apartment coordinates"""
        for coords in iter_vectors(self.coeff, self.dim):
            yield self.from_coordinates(coords)

    def describe(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "ell": self.ell,
            "dim": self.dim,
            "chambers": self.chamber_count,
        }


def _coordinate_action(module: SteinbergModule, g: GLElement) -> MatrixOverField:
    """Matrix C_g with coords(g x) = C_g coords(x)"""
    f = module.coeff
    moved = np.zeros_like(module.apartment)
    perm = module.permutation(g)
    moved[:, perm] = module.apartment
    rows = matmul_codes(f, moved[:, module.pivot_columns], module.block_inverse)
    return MatrixOverField(f, rows.T)


def build_module(n: int, q: int, ell: int, cap: int = 1_000_000) -> SteinbergModule:
    """Assemble St(GL_n(F_q); F_ell) with its apartment basis

    Raises:
        InvariantViolation: The alpha images are not a basis of the kernel
    """
    coeff = field_make(ell)
    c = build_complex(n, q, coeff, cap)
    kernel = steinberg_kernel(c)
    unipotent = enumerate_group("U", n, c.field, cap)
    table = GroupTable.from_subgroup(FiniteSubgroup(f"U_{n}(F_{q})", tuple(unipotent)))

    a0 = apartment_class(Frame.standard(c.field, n), c)
    module = SteinbergModule(c, kernel, unipotent, table, np.zeros((0, 0), dtype=np.int64), 0, [], [])
    rows = [module.act(u, a0) for u in unipotent]
    apartment = np.vstack(rows) if rows else np.zeros((0, len(c.chambers)), dtype=np.int64)
    module.apartment = apartment

    reduced, pivots = rref_codes(coeff, apartment)
    if len(pivots) != len(unipotent) or len(unipotent) != kernel.dim:
        raise InvariantViolation(f"Apartment classes have rank {len(pivots)}; |U| = {len(unipotent)}, dim St = {kernel.dim}")
    if not all(kernel.contains(row) for row in apartment):
        raise InvariantViolation("An apartment class lies outside the Steinberg kernel")

    module.pivot_columns = list(pivots)
    module.block_inverse = inverse(MatrixOverField(coeff, apartment[:, pivots])).entries
    module.standard_chamber = c.standard_chamber
    module.generators = gl_generators(c.field, n)
    module.actions = [chamber_action(g, c) for g in module.generators]
    module.coord_actions = [_coordinate_action(module, g) for g in module.generators]
    logger.info(f"Built St(GL_{n}(F_{q}); F_{ell}): dim {module.dim}, {module.chamber_count} chambers")
    return module


def alpha(u: UnipotentElement, module: SteinbergModule) -> np.ndarray:
    """u A_0"""
    return module.act(u, module.a0)


def epsilon(v: GroupRingElement) -> FieldElement:
    """Augmentation: sum of coefficients"""
    return v.augmentation()


def iota(x: np.ndarray, module: SteinbergModule) -> GroupRingElement:
    """Apartment coordinates of x as an element of F[U]

    Raises:
        ValueError: x is not a cycle
        InvariantViolation: The augmentation differs from the B-coefficient
    """
    coords = module.coordinates(x)
    image = GroupRingElement.from_vector(module.table, module.coeff, coords)
    if epsilon(image).code != int(np.asarray(x)[module.standard_chamber]):
        raise InvariantViolation("Augmentation of iota(x) differs from the B-coefficient of x")
    return image


def iota_inverse(v: GroupRingElement, module: SteinbergModule) -> np.ndarray:
    """sum c_u u A_0"""
    return module.from_coordinates(v.to_vector())


@dataclass
class GateResult:
    """Outcome of the gate procedure

    Attributes:
        g: Group element moving the chosen chamber to the standard one
        value: epsilon(iota(g x)), nonzero
        chamber: Index of the chosen chamber
    """

    g: GLElement
    value: FieldElement
    chamber: int

    def to_dict(self) -> dict:
        return {"g": self.g.to_text(), "value": str(self.value), "chamber": self.chamber}


def gate(x: np.ndarray, module: SteinbergModule) -> GateResult:
    """Find g with epsilon(iota(g x)) != 0

    Among chambers with nonzero coefficient, the one whose standardizer has
    the fewest nonzero entries is used, ties going to the lower index.

    Raises:
        ValueError: x = 0
        InvariantViolation: The value is zero or differs from the chamber coefficient
    """
    x = np.asarray(x, dtype=np.int64)
    support = np.nonzero(x)[0]
    if len(support) == 0:
        raise ValueError("The gate needs a nonzero vector")
    chamber = min(support, key=lambda k: (int(np.count_nonzero(module.standardizer(int(k)).entries)), int(k)))
    chamber = int(chamber)
    g = module.standardizer(chamber)
    value = epsilon(iota(module.act(g, x), module))
    if value.is_zero() or value.code != int(x[chamber]):
        raise InvariantViolation(f"Gate value {value} does not match chamber coefficient {int(x[chamber])}")
    return GateResult(g, value, chamber)


@dataclass
class WalkthroughResult:
    """The GL_2 gate written out line by line

    Attributes:
        line: Chosen line l_0 (its RREF basis row)
        g: Element with g l_0 = <e_1>
        c0: Coefficient of l_0
        terms: (lambda, coefficient) for every other line [lambda, 1] after g
        image: iota(g x)
    """

    line: List[int]
    g: GLElement
    c0: FieldElement
    terms: List[Tuple[FieldElement, FieldElement]]
    image: GroupRingElement

    def to_dict(self) -> dict:
        return {
            "line": self.line,
            "g": self.g.to_text(),
            "c0": str(self.c0),
            "terms": [[str(lam), str(c)] for lam, c in self.terms],
            "image": self.image.to_json(),
        }


def gl2_gate_walkthrough(x: np.ndarray, module: SteinbergModule) -> WalkthroughResult:
    """Gate for GL_2 via lines

    After moving l_0 to [1, 0], every other line is [lambda, 1] and
    iota([1,0] - [lambda,1]) = [E_12(lambda)], so the coefficient of
    E_12(lambda) in iota(g x) is minus that of [lambda, 1] and the
    augmentation is c_0.

    Raises:
        ValueError: n != 2 or x = 0
        InvariantViolation: A step disagrees with the general gate
    """
    if module.n != 2:
        raise ValueError("The walkthrough is specific to GL_2")
    result = gate(x, module)
    f, coeff = module.complex.field, module.coeff
    moved = module.act(result.g, x)
    c = module.complex
    e1 = c.standard_chamber
    c0 = FieldElement(coeff, int(moved[e1]))

    expected = np.zeros(module.dim, dtype=np.int64)
    terms = []
    for k in range(len(c.chambers)):
        if k == e1:
            continue
        row = c.chamber_flag(k)[0].basis[0]
        lam = f.div(int(row[0]), int(row[1]))
        u = module.table.index[elementary(f, 2, 1, 2, lam)]
        coefficient = int(moved[k])
        expected[u] = coeff.neg(coefficient)
        if coefficient:
            terms.append((FieldElement(f, lam), FieldElement(coeff, coefficient)))

    image = iota(moved, module)
    if not np.array_equal(image.to_vector(), expected):
        raise InvariantViolation("iota(g x) differs from the line-by-line formula")
    if epsilon(image) != c0 or c0 != result.value:
        raise InvariantViolation("Walkthrough augmentation differs from c_0")
    line = [int(v) for v in c.chamber_flag(result.chamber)[0].basis[0]]
    return WalkthroughResult(line, result.g, c0, terms, image)


def spin_vectors(module: SteinbergModule, seeds: Sequence[np.ndarray]) -> Subspace:
    """Submodule of St generated by chamber vectors"""
    return spin(seeds, module.actions, module.coeff, module.chamber_count)


@dataclass
class IrreducibilityResult:
    """Verdict with its certificate

    Attributes:
        irreducible: The verdict
        method: 'exhaustive' or 'norton'
        witness: Proper invariant subspace in chamber coordinates when reducible
        certificate: Method-specific record (vectors spun, Norton word, seed)
    """

    irreducible: bool
    method: str
    witness: Optional[Subspace]
    certificate: Dict[str, object]

    @property
    def witness_dim(self) -> Optional[int]:
        return self.witness.dim if self.witness is not None else None

    def to_dict(self) -> dict:
        data = {
            "verdict": "irreducible" if self.irreducible else "reducible",
            "method": self.method,
            "witness_dim": self.witness_dim,
            "certificate": self.certificate,
        }
        if self.witness is not None:
            text = self.witness.owner.to_text
            data["witness"] = [[text(int(v)) for v in row] for row in self.witness.basis]
        return data


def _to_chambers(module: SteinbergModule, coord_space: Subspace) -> Subspace:
    rows = [module.from_coordinates(row) for row in coord_space.basis]
    return Subspace.span(module.coeff, module.chamber_count, rows)


def verify_witness(module: SteinbergModule, witness: Subspace) -> bool:
    """Proper, nonzero, inside St and invariant under every generator"""
    if not 0 < witness.dim < module.dim:
        return False
    if not module.kernel.contains_subspace(witness):
        return False
    return all(witness.is_invariant(m) for m in module.actions)


def _projective_vectors(f: Field, dim: int):
    """Nonzero vectors whose first nonzero entry is 1"""
    for coords in iter_vectors(f, dim):
        nonzero = [c for c in coords if c]
        if nonzero and nonzero[0] == 1:
            yield np.array(coords, dtype=np.int64)


def _random_algebra_element(module: SteinbergModule, rng: np.random.Generator) -> Tuple[MatrixOverField, List[Tuple[int, List[int]]]]:
    f = module.coeff
    gens = module.coord_actions
    total = MatrixOverField.zeros(f, module.dim, module.dim)
    words = []
    for _ in range(int(rng.integers(2, 5))):
        word = [int(rng.integers(len(gens))) for _ in range(int(rng.integers(1, 4)))]
        coefficient = int(rng.integers(1, f.q))
        product = MatrixOverField.identity(f, module.dim)
        for k in word:
            product = product @ gens[k]
        total = total + product.scale(coefficient)
        words.append((coefficient, word))
    return total, words


def is_irreducible(
    module: SteinbergModule,
    seed: int = 0,
    budget: int = EXHAUSTIVE_SPIN_BUDGET,
    dim_cap: int = DEFAULT_IRREDUCIBLE_DIM,
) -> IrreducibilityResult:
    """Decide irreducibility of St under GL_n(F_q)

    Exhaustive spinning of every projective vector when ell^dim <= budget;
    the witness is then the smallest proper spin. Otherwise a seeded Norton
    test: for a = theta - lambda I with nullity 1, a proper spin of ker a or
    of ker a^T under the transposed action gives a witness, and full spins
    of both prove irreducibility.

    Raises:
        CapExceededError: dim above dim_cap
        SteinbergLabError: Norton search found no nullity-1 element
    """
    if module.dim > dim_cap:
        raise CapExceededError("irreducible_dim", module.dim, dim_cap)
    f, dim = module.coeff, module.dim
    gens = module.coord_actions

    if dim <= 1:
        return IrreducibilityResult(True, "exhaustive", None, {"vectors_spun": dim})

    if f.q**dim <= budget:
        smallest: Optional[Subspace] = None
        spun = 0
        for v in _projective_vectors(f, dim):
            spun += 1
            sub = spin([v], gens, f, dim)
            if sub.dim < dim and (smallest is None or sub.dim < smallest.dim):
                smallest = sub
        if smallest is None:
            logger.info(f"St(GL_{module.n}(F_{module.q}); F_{f.q}) irreducible: {spun} vectors spun")
            return IrreducibilityResult(True, "exhaustive", None, {"vectors_spun": spun})
        witness = _to_chambers(module, smallest)
        if not verify_witness(module, witness):
            raise InvariantViolation("Spin witness failed verification")
        return IrreducibilityResult(False, "exhaustive", witness, {"vectors_spun": spun})

    rng = np.random.default_rng(seed)
    transposed = [m.T for m in gens]
    for attempt in range(NORTON_ATTEMPTS):
        theta, words = _random_algebra_element(module, rng)
        for lam in range(f.q):
            a = theta - MatrixOverField.identity(f, dim).scale(lam)
            kernel = kernel_basis(a)
            if kernel.dim == 0:
                continue
            certificate = {"seed": seed, "attempt": attempt, "words": [[c, w] for c, w in words], "lambda": f.to_text(lam), "nullity": kernel.dim}
            sub = spin([kernel.basis[0]], gens, f, dim)
            if sub.dim < dim:
                witness = _to_chambers(module, sub)
                if not verify_witness(module, witness):
                    raise InvariantViolation("Norton witness failed verification")
                return IrreducibilityResult(False, "norton", witness, certificate)
            dual_kernel = kernel_basis(a.T)
            dual = spin([dual_kernel.basis[0]], transposed, f, dim)
            if dual.dim < dim:
                annihilator = kernel_basis(dual.as_matrix())
                witness = _to_chambers(module, annihilator)
                if not verify_witness(module, witness):
                    raise InvariantViolation("Norton annihilator witness failed verification")
                return IrreducibilityResult(False, "norton", witness, certificate)
            if kernel.dim == 1:
                logger.info(f"Norton certificate found on attempt {attempt}")
                return IrreducibilityResult(True, "norton", None, certificate)
    raise SteinbergLabError(f"Norton test found no nullity-1 element in {NORTON_ATTEMPTS} attempts")


@dataclass
class DeductionReport:
    """iota(V) for an invariant subspace V

    Attributes:
        left_ideal: iota(V) is closed under left multiplication by U
        t_stable: iota(V) is closed under T-conjugation
        nonzero_augmentation: Some element of iota(V) has nonzero augmentation
        ideal_dim: dim iota(V)
    """

    left_ideal: bool
    t_stable: bool
    nonzero_augmentation: bool
    ideal_dim: int

    @property
    def ok(self) -> bool:
        return self.left_ideal and self.t_stable and self.nonzero_augmentation

    def to_dict(self) -> dict:
        return {
            "left_ideal": self.left_ideal,
            "t_stable": self.t_stable,
            "nonzero_augmentation": self.nonzero_augmentation,
            "ideal_dim": self.ideal_dim,
        }


def deduction_check(v: Subspace, module: SteinbergModule) -> DeductionReport:
    """iota of a nonzero GL-invariant subspace is a T-stable left ideal outside ker epsilon

    Raises:
        ValueError: v is zero or not invariant
    """
    if v.dim == 0:
        raise ValueError("The subspace must be nonzero")
    if not all(v.is_invariant(m) for m in module.actions):
        raise ValueError("The subspace is not invariant under GL_n")
    f = module.coeff
    image = Subspace.span(f, module.dim, [module.coordinates(row) for row in v.basis])
    table = module.table
    ideal = LeftIdeal(table, f, image)
    left = all(image.is_invariant(m) for m in regular_action(table, f, table.generators))

    torus = enumerate_group("T", module.n, module.complex.field)
    t_stable = True
    for t in torus:
        perm = table.conjugation_perm(t)
        moved = [apply_permutation(f, perm, row) for row in image.basis]
        if not all(image.contains(row) for row in moved):
            t_stable = False
            break

    result = gate(v.basis[0], module)
    gx = module.act(result.g, v.basis[0])
    nonzero = ideal.contains(iota(gx, module)) and not epsilon(iota(gx, module)).is_zero()
    return DeductionReport(left, t_stable, nonzero, image.dim)


@dataclass
class EquivarianceReport:
    """Exhaustive equivariance of iota

    Attributes:
        unipotent_checked: (u, basis vector) pairs checked for left multiplication
        torus_checked: (t, basis vector) pairs checked for conjugation
        failures: Descriptions of mismatches
    """

    unipotent_checked: int = 0
    torus_checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "unipotent_checked": self.unipotent_checked,
            "torus_checked": self.torus_checked,
            "failures": self.failures,
        }


def check_equivariance(module: SteinbergModule) -> EquivarianceReport:
    """iota(u x) = [u] iota(x) and iota(t x) = t iota(x) t^{-1} on the apartment basis"""
    report = EquivarianceReport()
    table, f = module.table, module.coeff
    basis = [module.apartment[k] for k in range(module.dim)]
    for k, u in enumerate(module.unipotent):
        for j, x in enumerate(basis):
            lhs = iota(module.act(u, x), module)
            rhs = iota(x, module).left_translate(k)
            report.unipotent_checked += 1
            if lhs != rhs:
                report.failures.append(f"U-equivariance fails for u={u.to_text()} on basis vector {j}")
    for t in enumerate_group("T", module.n, module.complex.field):
        perm = table.conjugation_perm(t)
        for j, x in enumerate(basis):
            lhs = iota(module.act(t, x), module).to_vector()
            rhs = apply_permutation(f, perm, iota(x, module).to_vector())
            report.torus_checked += 1
            if not np.array_equal(lhs, rhs):
                report.failures.append(f"T-equivariance fails for t={t.to_text()} on basis vector {j}")
    return report


__all__ = [
    "Frame",
    "SteinbergModule",
    "GateResult",
    "WalkthroughResult",
    "IrreducibilityResult",
    "DeductionReport",
    "EquivarianceReport",
    "apartment_class",
    "build_module",
    "alpha",
    "epsilon",
    "iota",
    "iota_inverse",
    "gate",
    "gl2_gate_walkthrough",
    "spin_vectors",
    "verify_witness",
    "is_irreducible",
    "deduction_check",
    "check_equivariance",
]
