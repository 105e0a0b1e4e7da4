"""Group rings F[G] of finite matrix groups

A GroupTable freezes a FiniteSubgroup into index form (multiplication
table, inverses, generators). Group ring elements are sparse coefficient
maps over those indices; left ideals are subspaces of the regular module
closed under left translation and, optionally, extra endomorphisms such as
torus conjugation.

Conventions: the left translation by g sends the basis vector e_h to
e_{gh}, and all matrices here act on column coefficient vectors.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import CapExceededError, InvariantViolation

from .exactfield import Field, FieldElement, field_make, field_of_order, iter_vectors
from .exactlinalg import (
    EchelonBasis,
    MatrixOverField,
    QuotientMap,
    Subspace,
    determinant,
    inverse,
    matmul_codes,
    quotient_coords,
    rref_codes,
)
from .matgroup import (
    FiniteSubgroup,
    GLElement,
    elementary,
    enumerate_group,
    mulclose,
    small_generating_set,
    subgroup_closure,
)

logger = logging.getLogger(__name__)

DEFAULT_REGULAR_CAP = 4096
EXHAUSTIVE_BUDGET = 1 << 16


@dataclass(eq=False)
class GroupTable:
    """Index form of a finite group

    Attributes:
        name: Descriptor ('C_2', 'U_3(F_2)', ...)
        elements: Group elements; index 0 need not be the identity
        mult: mult[i, j] = index of elements[i] * elements[j]
        inverse: inverse[i] = index of elements[i]^{-1}
        identity: Index of the identity
        generators: Indices of a generating set
    """

    name: str
    elements: Tuple[GLElement, ...]
    mult: np.ndarray
    inverse: np.ndarray
    identity: int
    generators: Tuple[int, ...]
    index: Dict[GLElement, int] = field(default_factory=dict)

    @classmethod
    def from_subgroup(cls, g: FiniteSubgroup, name: Optional[str] = None, cap: int = DEFAULT_REGULAR_CAP) -> "GroupTable":
        """Multiplication table of a finite subgroup

        Raises:
            CapExceededError: Order above cap
        """
        if g.order > cap:
            raise CapExceededError("group_order", g.order, cap)
        elements = tuple(g.elements)
        index = {x: k for k, x in enumerate(elements)}
        size = len(elements)
        mult = np.zeros((size, size), dtype=np.int64)
        for i, x in enumerate(elements):
            for j, y in enumerate(elements):
                mult[i, j] = index[x * y]
        identity = index[g.identity]
        inverse_idx = np.array([int(np.nonzero(mult[i] == identity)[0][0]) for i in range(size)], dtype=np.int64)
        gens = g.generators if g.generators else tuple(small_generating_set(g))
        generators = tuple(sorted({index[s] for s in gens if index[s] != identity}))
        table = cls(name or g.parent, elements, mult, inverse_idx, identity, generators, index)
        logger.debug(f"Group table {table.name}: order {size}, generators {generators}")
        return table

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def p(self) -> int:
        """Characteristic of the matrix field the group lives over"""
        return self.elements[0].owner.p

    def index_of(self, g: GLElement) -> int:
        return self.index[g]

    def conjugation_perm(self, t: GLElement) -> List[int]:
        """perm[j] = index of t g_j t^{-1}"""
        t_inv = t.inverse()
        return [self.index[t * g * t_inv] for g in self.elements]


def unipotent_table(n: int, q: int) -> GroupTable:
    """U_n(F_q) with elements in enumeration order (identity first)"""
    elements = enumerate_group("U", n, field_of_order(q))
    return GroupTable.from_subgroup(FiniteSubgroup(f"U_{n}(F_{q})", tuple(elements)))


def cyclic_table(p: int) -> GroupTable:
    """C_p realized as U_2(F_p), generated by E_12(1)"""
    f = field_make(p)
    gen = elementary(f, 2, 1, 2, 1)
    return GroupTable.from_subgroup(subgroup_closure([gen], parent=f"C_{p}"), name=f"C_{p}")


def klein_four_table() -> GroupTable:
    """C_2 x C_2 realized as <E_12(1), E_13(1)> inside U_3(F_2)"""
    f = field_make(2)
    gens = [elementary(f, 3, 1, 2, 1), elementary(f, 3, 1, 3, 1)]
    return GroupTable.from_subgroup(subgroup_closure(gens, parent="C_2xC_2"), name="C_2xC_2")


NAMED_GROUPS = ("C_2", "C_3", "C_2xC_2", "U_3(F_2)", "U_2(F_3)")


def named_table(name: str) -> GroupTable:
    """Group table by descriptor ('C_2', 'C_3', 'C_2xC_2', 'U_3(F_2)', ...)"""
    if name == "C_2xC_2":
        return klein_four_table()
    if name.startswith("C_"):
        return cyclic_table(int(name[2:]))
    if name.startswith("U_"):
        n_part, q_part = name[2:].split("(F_")
        return unipotent_table(int(n_part), int(q_part.rstrip(")")))
    raise ValueError(f"Unknown group {name!r}; expected one of {NAMED_GROUPS}")


class GroupRingElement:
    """Sparse element sum c_g [g] of F[G]

    Attributes:
        table: Group the ring is built on
        owner: Coefficient field
        terms: Group index -> nonzero coefficient code
    """

    __slots__ = ("table", "owner", "terms")

    def __init__(self, table: GroupTable, owner: Field, terms: Optional[Dict[int, int]] = None):
        self.table = table
        self.owner = owner
        codes = {int(k): owner(int(v)).code for k, v in (terms or {}).items()}
        self.terms = {k: v for k, v in codes.items() if v}

    @classmethod
    def basis(cls, table: GroupTable, owner: Field, k: int) -> "GroupRingElement":
        """[g_k]"""
        return cls(table, owner, {k: 1})

    @classmethod
    def from_vector(cls, table: GroupTable, owner: Field, vector: Sequence[int]) -> "GroupRingElement":
        return cls(table, owner, {k: int(c) for k, c in enumerate(vector) if c})

    def to_vector(self) -> np.ndarray:
        out = np.zeros(self.table.order, dtype=np.int64)
        for k, c in self.terms.items():
            out[k] = c
        return out

    def augmentation(self) -> FieldElement:
        """Sum of coefficients"""
        total = 0
        for c in self.terms.values():
            total = self.owner.add(total, c)
        return FieldElement(self.owner, total)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "GroupRingElement") -> None:
        if other.table is not self.table or other.owner != self.owner:
            raise ValueError("Group ring elements live in different rings")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        f = self.owner
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = f.add(terms.get(k, 0), c)
        return GroupRingElement(self.table, f, terms)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.table, self.owner, {k: self.owner.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement(self.table, self.owner, {k: self.owner.mul(c, v) for k, v in self.terms.items()})

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        f = self.owner
        terms: Dict[int, int] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = int(self.table.mult[i, j])
                terms[k] = f.add(terms.get(k, 0), f.mul(a, b))
        return GroupRingElement(self.table, f, terms)

    def left_translate(self, k: int) -> "GroupRingElement":
        """[g_k] * self"""
        return GroupRingElement(self.table, self.owner, {int(self.table.mult[k, j]): c for j, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.table is other.table and self.owner == other.owner and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((id(self.table), tuple(sorted(self.terms.items()))))

    def to_json(self) -> Dict[str, str]:
        """{element text: coefficient text} in index order"""
        return {self.table.elements[k].to_text(): self.owner.to_text(c) for k, c in sorted(self.terms.items())}

    def __repr__(self) -> str:
        body = " + ".join(f"{self.owner.to_text(c)}[{k}]" for k, c in sorted(self.terms.items()))
        return f"GroupRingElement({body or '0'})"


def multiply_vectors(table: GroupTable, f: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in F[G] of two dense coefficient vectors"""
    out = np.zeros(table.order, dtype=np.int64)
    for i in np.nonzero(a)[0]:
        contribution = np.zeros(table.order, dtype=np.int64)
        contribution[table.mult[i]] = f.scale_arr(int(a[i]), b)
        out = f.add_arr(out, contribution)
    return out


def permutation_matrix_over(f: Field, perm: Sequence[int]) -> MatrixOverField:
    """Matrix with e_j -> e_perm[j]"""
    size = len(perm)
    entries = np.zeros((size, size), dtype=np.int64)
    entries[list(perm), np.arange(size)] = 1
    return MatrixOverField(f, entries)


def regular_action(table: GroupTable, f: Field, which: Optional[Sequence[int]] = None, cap: int = DEFAULT_REGULAR_CAP) -> List[MatrixOverField]:
    """Left-translation matrices L_g (e_h -> e_{gh})

    Args:
        table: Group
        f: Coefficient field
        which: Element indices to return matrices for (default: all)
        cap: Maximum group order

    Raises:
        CapExceededError: Order above cap
        InvariantViolation: L_g L_h != L_{gh} on the checked pairs
    """
    if table.order > cap:
        raise CapExceededError("group_order", table.order, cap)
    which = list(range(table.order)) if which is None else list(which)
    matrices = {k: permutation_matrix_over(f, table.mult[k].tolist()) for k in range(table.order)}
    checked = 0
    for g, h in itertools.product(range(table.order), repeat=2):
        if checked >= 256:
            break
        if matrices[g] @ matrices[h] != matrices[int(table.mult[g, h])]:
            raise InvariantViolation(f"Regular action of {table.name} is not multiplicative at ({g}, {h})")
        checked += 1
    return [matrices[k] for k in which]


@dataclass
class LeftIdeal:
    """Left ideal of F[G] as a subspace of the regular module

    Attributes:
        table: Group
        owner: Coefficient field
        space: The subspace
        extra: Extra endomorphisms the ideal is closed under
    """

    table: GroupTable
    owner: Field
    space: Subspace
    extra: Tuple[MatrixOverField, ...] = ()

    @property
    def dim(self) -> int:
        return self.space.dim

    def is_proper(self) -> bool:
        return self.space.dim < self.table.order

    def contains(self, x: GroupRingElement) -> bool:
        return self.space.contains(x.to_vector())

    def basis_elements(self) -> List[GroupRingElement]:
        return [GroupRingElement.from_vector(self.table, self.owner, row) for row in self.space.basis]

    def has_nonzero_augmentation(self) -> bool:
        return any(not x.augmentation().is_zero() for x in self.basis_elements())

    def verify(self) -> bool:
        """Closed under every left translation and every extra endomorphism"""
        for m in regular_action(self.table, self.owner, self.table.generators) + list(self.extra):
            if not self.space.is_invariant(m):
                return False
        return True

    def to_json(self) -> dict:
        text = self.owner.to_text
        return {
            "dim": self.dim,
            "ring_dim": self.table.order,
            "basis": [[text(int(c)) for c in row] for row in self.space.basis],
        }


def spin(seeds: Sequence[Sequence[int]], generators: Sequence[MatrixOverField], owner: Field, ambient: int) -> Subspace:
    """Smallest subspace containing seeds and stable under each generator (column action)"""
    basis = EchelonBasis(owner, ambient)
    queue = []
    for v in seeds:
        v = np.asarray(v, dtype=np.int64)
        if basis.add(v):
            queue.append(v)
    transposed = [m.entries.T for m in generators]
    while queue:
        v = queue.pop()
        for mt in transposed:
            w = matmul_codes(owner, v.reshape(1, -1), mt)[0]
            if basis.add(w):
                queue.append(w)
    return basis.to_subspace()


def ideal_closure(
    gens: Sequence[GroupRingElement],
    extra: Sequence[MatrixOverField] = (),
    table: Optional[GroupTable] = None,
    owner: Optional[Field] = None,
) -> LeftIdeal:
    """Smallest left ideal containing gens and closed under the extra endomorphisms

    Raises:
        InvariantViolation: The closure fails its own invariance check
    """
    if gens:
        table, owner = gens[0].table, gens[0].owner
    if table is None or owner is None:
        raise ValueError("An empty generator list needs the group table and field")
    translations = regular_action(table, owner, table.generators)
    space = spin([x.to_vector() for x in gens], translations + list(extra), owner, table.order)
    ideal = LeftIdeal(table, owner, space, tuple(extra))
    if not ideal.verify():
        raise InvariantViolation("Ideal closure is not closed")
    return ideal


def augmentation_ideal(table: GroupTable, f: Field) -> Subspace:
    """span{[g] - [1] : g != 1}"""
    rows = []
    for k in range(table.order):
        if k != table.identity:
            v = np.zeros(table.order, dtype=np.int64)
            v[k] = 1
            v[table.identity] = f.neg(1)
            rows.append(v)
    return Subspace.span(f, table.order, rows)


@dataclass
class NilpotencyReport:
    """Powers of the augmentation ideal

    Attributes:
        nilpotent: Whether some power vanished
        index: Least N with I^N = 0 (None when the powers stall)
        dims: dim I^k for k = 1, 2, ...
        characteristic_matches: char F equals the prime of the group
    """

    nilpotent: bool
    index: Optional[int]
    dims: List[int]
    characteristic_matches: bool

    def to_dict(self) -> dict:
        return {
            "nilpotent": self.nilpotent,
            "N": self.index,
            "dims": self.dims,
            "characteristic_matches": self.characteristic_matches,
        }


def aug_nilpotency(table: GroupTable, f: Field) -> NilpotencyReport:
    """Compute I, I^2, ... for the augmentation ideal I of F[G]

    Stops at the zero ideal or when the dimension stops dropping; a stall
    (the cross-characteristic case) is reported, not raised.

    Raises:
        InvariantViolation: Nilpotent with N > dim F[G]
    """
    ideal = augmentation_ideal(table, f)
    power = ideal
    dims = [power.dim]
    while power.dim > 0:
        products = [
            multiply_vectors(table, f, a, b) for a in power.basis for b in ideal.basis
        ]
        following = Subspace.span(f, table.order, products)
        if following.dim >= power.dim:
            break
        power = following
        dims.append(power.dim)

    nilpotent = power.dim == 0
    index = len(dims) if nilpotent else None
    report = NilpotencyReport(nilpotent, index, dims, f.p == table.p)
    if nilpotent and index > table.order:
        raise InvariantViolation(f"Augmentation ideal of {table.name} needs N={index} > {table.order}")
    logger.info(f"Augmentation powers of F_{f.q}[{table.name}]: {dims} (nilpotent={nilpotent})")
    return report


def generates_unit_ideal(table: GroupTable, f: Field, x: np.ndarray) -> bool:
    """True when the left translates g x span F[G]"""
    translates = np.zeros((table.order, table.order), dtype=np.int64)
    for g in range(table.order):
        translates[g, table.mult[g]] = x
    return len(rref_codes(f, translates)[1]) == table.order


@dataclass
class UniqueMaximalReport:
    passed: bool
    checked: int
    exhaustive: bool
    seed: Optional[int]
    counterexample: Optional[List[int]] = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "counterexample": self.counterexample,
        }


def unique_maximal_check(
    table: GroupTable, f: Field, seed: int = 0, budget: int = EXHAUSTIVE_BUDGET, samples: int = 1000
) -> UniqueMaximalReport:
    """Every x with nonzero augmentation generates the unit left ideal

    Exhaustive when |F|^|G| <= budget, otherwise seeded sampling.
    """
    exhaustive = f.q ** table.order <= budget
    if exhaustive:
        candidates = (np.array(v, dtype=np.int64) for v in iter_vectors(f, table.order))
    else:
        rng = np.random.default_rng(seed)
        candidates = (rng.integers(0, f.q, size=table.order, dtype=np.int64) for _ in range(samples))

    checked = 0
    for x in candidates:
        if f.sum_arr(x) == 0:
            continue
        checked += 1
        if not generates_unit_ideal(table, f, x):
            logger.info(f"F_{f.q}[{table.name}]: {x.tolist()} has nonzero augmentation but a proper ideal")
            return UniqueMaximalReport(False, checked, exhaustive, None if exhaustive else seed, x.tolist())
    return UniqueMaximalReport(True, checked, exhaustive, None if exhaustive else seed)


def torus_conjugation_permutations(table: GroupTable, torus: Sequence[GLElement]) -> List[List[int]]:
    """Permutations u -> t u t^{-1} of U-indices, skipping the ones that act trivially"""
    out = []
    for t in torus:
        perm = table.conjugation_perm(t)
        if perm != list(range(table.order)):
            out.append(perm)
    return out


@dataclass
class CounterexampleResult:
    """Outcome of the T-stable ideal search

    Attributes:
        found: Whether a proper T-stable ideal with nonzero augmentation exists
        ideal: The ideal when found
        generator: Its generator
        epsilon: Augmentation of the generator
        checks: Verification booleans (proper, left_ideal, t_stable, nonzero_augmentation)
        searched: Generators examined
        exhaustive: Whether every generator was examined
        seed: Sampling seed (None for exhaustive runs)
    """

    found: bool
    ideal: Optional[LeftIdeal]
    generator: Optional[GroupRingElement]
    epsilon: Optional[FieldElement]
    checks: Dict[str, bool]
    searched: int
    exhaustive: bool
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "ideal": self.ideal.to_json() if self.ideal else None,
            "generator": self.generator.to_json() if self.generator else None,
            "epsilon": str(self.epsilon) if self.epsilon is not None else None,
            "checks": self.checks,
            "searched": self.searched,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
        }


def t_stable_counterexample(
    n: int, q: int, ell: int, seed: int = 0, budget: int = EXHAUSTIVE_BUDGET, samples: int = 2000
) -> CounterexampleResult:
    """Search for a proper T-stable left ideal of F_ell[U_n(F_q)] with nonzero augmentation

    Single-generator ideals suffice: any such ideal contains the ideal
    generated by one of its nonzero-augmentation elements. Generators run
    over all coefficient vectors in code order when ell^|U| <= budget.
    """
    f = field_make(ell)
    table = unipotent_table(n, q)
    torus = enumerate_group("T", n, table.elements[0].owner)
    extra = [permutation_matrix_over(f, perm) for perm in torus_conjugation_permutations(table, torus)]
    if f.p == table.p:
        logger.info(f"Equal characteristic {f.p}: the search is expected to find nothing")

    exhaustive = f.q ** table.order <= budget
    if exhaustive:
        candidates = (np.array(v, dtype=np.int64) for v in iter_vectors(f, table.order))
    else:
        rng = np.random.default_rng(seed)
        candidates = (rng.integers(0, f.q, size=table.order, dtype=np.int64) for _ in range(samples))

    searched = 0
    for x in candidates:
        if f.sum_arr(x) == 0:
            continue
        searched += 1
        generator = GroupRingElement.from_vector(table, f, x)
        ideal = ideal_closure([generator], extra)
        if not ideal.is_proper():
            continue
        checks = {
            "proper": ideal.is_proper(),
            "left_ideal": ideal.verify(),
            "t_stable": all(ideal.space.is_invariant(m) for m in extra),
            "nonzero_augmentation": ideal.has_nonzero_augmentation(),
        }
        if not all(checks.values()):
            raise InvariantViolation(f"Counterexample candidate failed verification: {checks}")
        logger.info(f"T-stable counterexample in F_{ell}[U_{n}(F_{q})]: ideal of dim {ideal.dim}")
        return CounterexampleResult(
            True, ideal, generator, generator.augmentation(), checks, searched, exhaustive, None if exhaustive else seed
        )
    return CounterexampleResult(False, None, None, None, {}, searched, exhaustive, None if exhaustive else seed)


# -- coinvariants -------------------------------------------------------------


def coinvariants(actions: Sequence[MatrixOverField], dim: int, owner: Field) -> QuotientMap:
    """Quotient of F^dim by span{h m - m} over the given matrices h"""
    rows = []
    eye = np.eye(dim, dtype=np.int64)
    for h in actions:
        diff = owner.sub_arr(h.entries, eye)
        rows.extend(diff.T)
    return quotient_coords(dim, Subspace.span(owner, dim, rows))


def direct_sum(first: Sequence[MatrixOverField], second: Sequence[MatrixOverField]) -> List[MatrixOverField]:
    """Block-diagonal sum of two representations given element by element"""
    out = []
    for a, b in zip(first, second):
        entries = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.int64)
        entries[: a.rows, : a.cols] = a.entries
        entries[a.rows :, a.cols :] = b.entries
        out.append(MatrixOverField(a.owner, entries))
    return out


def subgroups(table: GroupTable) -> List[Tuple[int, ...]]:
    """Subgroups generated by at most two elements, as sorted index tuples"""
    found = set()
    identity = table.elements[table.identity]
    for i, j in itertools.combinations_with_replacement(range(table.order), 2):
        closure = mulclose([table.elements[i], table.elements[j]], identity)
        found.add(tuple(sorted(table.index[x] for x in closure)))
    return sorted(found, key=lambda s: (len(s), s))


def index_p_subgroups(table: GroupTable) -> List[Tuple[int, ...]]:
    """Subgroups of index p in an elementary abelian p-group, canonical order"""
    p = table.p
    target = table.order // p
    found = set()
    identity = table.elements[table.identity]
    rank = 0
    while p**rank < table.order:
        rank += 1
    for gens in itertools.combinations(range(table.order), max(rank - 1, 0)):
        closure = mulclose([table.elements[k] for k in gens], identity)
        if len(closure) == target:
            found.add(tuple(sorted(table.index[x] for x in closure)))
    return sorted(found)


@dataclass
class CoinvariantWitness:
    subgroup: Tuple[int, ...]
    index: int
    image: List[int]

    def to_dict(self) -> dict:
        return {"subgroup": list(self.subgroup), "index": self.index, "image": self.image}


def abelian_coinv_witness(
    table: GroupTable, rho: Sequence[MatrixOverField], m: Sequence[int]
) -> CoinvariantWitness:
    """H of index 1 or p with m nonzero in M_H

    Args:
        table: Elementary abelian p-group
        rho: Representation matrices, one per element index, over F_ell with ell != p
        m: Nonzero module element

    Raises:
        ValueError: m is zero or the characteristics agree
        InvariantViolation: No subgroup works
    """
    m = np.asarray(m, dtype=np.int64)
    if not m.any():
        raise ValueError("The module element must be nonzero")
    owner = rho[0].owner
    if owner.p == table.p:
        raise ValueError(f"Coefficient characteristic {owner.p} equals the group prime")
    dim = rho[0].rows
    candidates = [tuple(range(table.order))] + index_p_subgroups(table)
    for sub in candidates:
        quotient = coinvariants([rho[k] for k in sub], dim, owner)
        image = quotient(m)
        if image.any():
            return CoinvariantWitness(sub, table.order // len(sub), image.tolist())
    raise InvariantViolation(f"No index-1 or index-{table.p} subgroup keeps {m.tolist()} alive")


def coset_permutation_module(table: GroupTable, f: Field, sub: Tuple[int, ...]) -> List[MatrixOverField]:
    """F[G/H] with g (xH) = (gx)H, one matrix per element index"""
    cosets: List[frozenset] = []
    coset_of: Dict[int, int] = {}
    for x in range(table.order):
        if x in coset_of:
            continue
        coset = frozenset(int(table.mult[x, h]) for h in sub)
        for y in coset:
            coset_of[y] = len(cosets)
        cosets.append(coset)
    out = []
    for g in range(table.order):
        perm = [coset_of[int(table.mult[g, min(c)])] for c in cosets]
        out.append(permutation_matrix_over(f, perm))
    return out


def random_module(table: GroupTable, f: Field, max_dim: int, rng: np.random.Generator) -> List[MatrixOverField]:
    """Random representation of dimension <= max_dim

    A direct sum of coset permutation modules conjugated by a random
    invertible matrix.
    """
    options = [s for s in subgroups(table) if table.order // len(s) <= max_dim]
    rep: Optional[List[MatrixOverField]] = None
    dim = 0
    while True:
        sub = options[int(rng.integers(len(options)))]
        size = table.order // len(sub)
        if rep is not None and dim + size > max_dim:
            break
        block = coset_permutation_module(table, f, sub)
        rep = block if rep is None else direct_sum(rep, block)
        dim += size
        if rng.random() < 0.3:
            break
    assert rep is not None
    while True:
        q_mat = MatrixOverField(f, rng.integers(0, f.q, size=(dim, dim), dtype=np.int64))
        if determinant(q_mat) != 0:
            break
    q_inv = inverse(q_mat)
    return [q_mat @ r @ q_inv for r in rep]


__all__ = [
    "GroupTable",
    "GroupRingElement",
    "LeftIdeal",
    "NilpotencyReport",
    "UniqueMaximalReport",
    "CounterexampleResult",
    "CoinvariantWitness",
    "NAMED_GROUPS",
    "unipotent_table",
    "cyclic_table",
    "klein_four_table",
    "named_table",
    "multiply_vectors",
    "permutation_matrix_over",
    "regular_action",
    "spin",
    "ideal_closure",
    "augmentation_ideal",
    "aug_nilpotency",
    "generates_unit_ideal",
    "unique_maximal_check",
    "torus_conjugation_permutations",
    "t_stable_counterexample",
    "coinvariants",
    "direct_sum",
    "subgroups",
    "index_p_subgroups",
    "abelian_coinv_witness",
    "coset_permutation_module",
    "random_module",
]
