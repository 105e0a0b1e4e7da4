"""The Tits building of GL_n(F_q)

The building is the order complex of proper nonzero subspaces of F_q^n: a
d-simplex is a chain V_0 < ... < V_d. Chambers (top simplices) are complete
flags. The reduced chain complex carries an explicit (-1)-simplex, so
reduced homology, and the GL_1 convention St = F, come out uniformly.

Vertices are ordered by canonical subspace key (dimension, pivots, RREF
entries) and simplices lexicographically by vertex index, which makes every
boundary and action matrix reproducible bit for bit.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import CapExceededError, FieldMismatchError, InvariantViolation

from .exactfield import Field, field_of_order, iter_vectors
from .exactlinalg import MatrixOverField, Subspace, kernel_basis, matmul_codes, rank
from .matgroup import GLElement

logger = logging.getLogger(__name__)

DEFAULT_SIMPLEX_CAP = 1_000_000


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n"""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(f: Field, n: int, k: int) -> List[Subspace]:
    """All k-dimensional subspaces of F^n in canonical key order

    Pivot columns run over k-subsets in lexicographic order; the free
    entries of each pivot pattern (non-pivot columns right of a row's pivot)
    run over all field values.

    Raises:
        InvariantViolation: Count differs from the Gaussian binomial
    """
    out: List[Subspace] = []
    for pivots in itertools.combinations(range(n), k):
        pivot_set = set(pivots)
        free = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivot_set]
        for values in iter_vectors(f, len(free)):
            basis = np.zeros((k, n), dtype=np.int64)
            for r, p in enumerate(pivots):
                basis[r, p] = 1
            for (r, c), v in zip(free, values):
                basis[r, c] = v
            out.append(Subspace(f, n, basis, pivots))
    expected = gaussian_binomial(n, k, f.q)
    if len(out) != expected:
        raise InvariantViolation(f"Found {len(out)} subspaces of dimension {k} in F_{f.q}^{n}, expected {expected}")
    out.sort()
    return out


class Flag:
    """Strictly increasing chain of proper nonzero subspaces of F^n

    Attributes:
        owner: Field of the subspaces
        ambient: n
        spaces: The chain, smallest first
    """

    __slots__ = ("owner", "ambient", "spaces")

    def __init__(self, spaces: Sequence[Subspace], owner: Optional[Field] = None, ambient: Optional[int] = None):
        spaces = tuple(spaces)
        if spaces:
            owner = owner or spaces[0].owner
            ambient = ambient if ambient is not None else spaces[0].ambient
        if owner is None or ambient is None:
            raise ValueError("An empty flag needs its field and ambient dimension")
        for s in spaces:
            if s.ambient != ambient or not 0 < s.dim < ambient:
                raise ValueError(f"Flag members must be proper nonzero subspaces of F^{ambient}")
        for a, b in zip(spaces, spaces[1:]):
            if not (a.dim < b.dim and b.contains_subspace(a)):
                raise ValueError("Flag members must be strictly increasing")
        self.owner = owner
        self.ambient = ambient
        self.spaces = spaces

    @classmethod
    def standard(cls, f: Field, n: int) -> "Flag":
        """<e_1> < <e_1, e_2> < ... < <e_1..e_{n-1}>"""
        eye = np.eye(n, dtype=np.int64)
        return cls([Subspace(f, n, eye[:k], range(k)) for k in range(1, n)], f, n)

    def __iter__(self):
        return iter(self.spaces)

    def __len__(self) -> int:
        return len(self.spaces)

    def __getitem__(self, index: int) -> Subspace:
        return self.spaces[index]

    def key(self) -> Tuple:
        return tuple(s.key() for s in self.spaces)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Flag):
            return NotImplemented
        return self.ambient == other.ambient and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.ambient, self.key()))

    def __lt__(self, other: "Flag") -> bool:
        return self.key() < other.key()

    def is_complete(self) -> bool:
        return [s.dim for s in self.spaces] == list(range(1, self.ambient))

    def act(self, g: GLElement) -> "Flag":
        return Flag([g.act(s) for s in self.spaces], self.owner, self.ambient)

    def to_json(self) -> List[List[List[str]]]:
        text = self.owner.to_text
        return [[[text(int(x)) for x in row] for row in s.basis] for s in self.spaces]

    def __repr__(self) -> str:
        return f"Flag({[s.basis.tolist() for s in self.spaces]})"


@dataclass
class ReducedComplex:
    """Reduced simplicial chain complex of the building, coefficients in F

    Attributes:
        n: Matrix size
        field: Building field F_q
        coeff: Coefficient field F
        vertices: Proper nonzero subspaces in canonical order
        simplices: simplices[d] lists the d-simplices as vertex index tuples
        boundaries: boundaries[d] is the |C_{d-1}| x |C_d| matrix of d_d,
            d_0 mapping onto the (-1)-simplex
    """

    n: int
    field: Field
    coeff: Field
    vertices: List[Subspace]
    simplices: List[List[Tuple[int, ...]]]
    boundaries: Dict[int, MatrixOverField]
    vertex_index: Dict[Subspace, int] = field(default_factory=dict)
    simplex_index: List[Dict[Tuple[int, ...], int]] = field(default_factory=list)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def rank(self) -> int:
        """Semisimple rank r = n - 1; chambers have dimension r - 1"""
        return self.n - 1

    @property
    def top(self) -> int:
        return self.rank - 1

    def count(self, d: int) -> int:
        """|C_d|, with |C_{-1}| = 1"""
        if d == -1:
            return 1
        if 0 <= d < len(self.simplices):
            return len(self.simplices[d])
        return 0

    def simplex_counts(self) -> List[int]:
        """|C_d| for d = -1 .. r-1"""
        return [self.count(d) for d in range(-1, self.rank)]

    @property
    def chambers(self) -> List[Tuple[int, ...]]:
        return self.simplices[self.top] if self.top >= 0 else [()]

    def chamber_flag(self, index: int) -> Flag:
        return Flag([self.vertices[v] for v in self.chambers[index]], self.field, self.n)

    def chamber_flags(self) -> List[Flag]:
        return [self.chamber_flag(k) for k in range(len(self.chambers))]

    @property
    def standard_chamber(self) -> int:
        """Index of the standard flag, the chamber fixed by B"""
        return self.chamber_of(Flag.standard(self.field, self.n))

    def chamber_of(self, fl: Flag) -> int:
        key = tuple(self.vertex_index[s] for s in fl)
        if self.top < 0:
            return 0
        return self.simplex_index[self.top][key]


def build_complex(n: int, q: int, coeff: Field, cap: int = DEFAULT_SIMPLEX_CAP) -> ReducedComplex:
    """Build the reduced chain complex of the GL_n(F_q) building over coeff

    Args:
        n: Matrix size (n = 1 gives the empty complex)
        q: Order of the building field
        coeff: Coefficient field F
        cap: Maximum total number of simplices

    Returns:
        The complex, with d^2 = 0 verified

    Raises:
        CapExceededError: Too many simplices
        InvariantViolation: A boundary composite is nonzero
    """
    f = field_of_order(q)
    vertex_count = sum(gaussian_binomial(n, k, q) for k in range(1, n))
    if vertex_count > cap:
        raise CapExceededError("simplex_count", vertex_count, cap)

    vertices: List[Subspace] = []
    for k in range(1, n):
        vertices.extend(enumerate_subspaces(f, n, k))
    vertices.sort()
    vertex_index = {s: i for i, s in enumerate(vertices)}

    above: List[List[int]] = [
        [j for j in range(i + 1, len(vertices)) if vertices[j].dim > vertices[i].dim and vertices[j].contains_subspace(vertices[i])]
        for i in range(len(vertices))
    ]

    simplices: List[List[Tuple[int, ...]]] = []
    if vertices:
        layer = [(i,) for i in range(len(vertices))]
        total = len(layer)
        while layer:
            simplices.append(layer)
            layer = sorted(chain + (j,) for chain in layer for j in above[chain[-1]])
            total += len(layer)
            if total > cap:
                raise CapExceededError("simplex_count", total, cap)
    simplex_index = [{s: k for k, s in enumerate(layer)} for layer in simplices]

    minus_one = coeff.neg(1)
    boundaries: Dict[int, MatrixOverField] = {}
    for d, layer in enumerate(simplices):
        if d == 0:
            boundaries[0] = MatrixOverField(coeff, np.ones((1, len(layer)), dtype=np.int64))
            continue
        entries = np.zeros((len(simplices[d - 1]), len(layer)), dtype=np.int64)
        faces = simplex_index[d - 1]
        for col, chain in enumerate(layer):
            for j in range(d + 1):
                face = chain[:j] + chain[j + 1 :]
                entries[faces[face], col] = 1 if j % 2 == 0 else minus_one
        boundaries[d] = MatrixOverField(coeff, entries)

    for d in range(1, len(simplices)):
        if not (boundaries[d - 1] @ boundaries[d]).is_zero():
            raise InvariantViolation(f"Boundary composite d_{d - 1} d_{d} is nonzero")

    complex_ = ReducedComplex(n, f, coeff, vertices, simplices, boundaries, vertex_index, simplex_index)
    logger.info(
        f"Built building of GL_{n}(F_{q}) over F_{coeff.q}: simplex counts {complex_.simplex_counts()}"
    )
    return complex_


def homology_dims(c: ReducedComplex) -> List[int]:
    """dim H_d of the reduced complex for d = -1 .. r-1"""
    ranks = {d: rank(m) for d, m in c.boundaries.items()}
    dims = []
    for d in range(-1, c.rank):
        kernel = c.count(d) - ranks.get(d, 0)
        dims.append(kernel - ranks.get(d + 1, 0))
    return dims


def steinberg_kernel(c: ReducedComplex) -> Subspace:
    """ker of the top boundary map, inside the chamber space C_{r-1}

    Raises:
        InvariantViolation: Dimension differs from q^{n(n-1)/2}
    """
    if c.top < 0:
        kernel = Subspace.full(c.coeff, 1)
    else:
        kernel = kernel_basis(c.boundaries[c.top])
    expected = c.q ** (c.n * (c.n - 1) // 2)
    if kernel.dim != expected:
        raise InvariantViolation(f"Steinberg kernel has dimension {kernel.dim}, expected {expected}")
    return kernel


def vertex_permutation(g: GLElement, c: ReducedComplex) -> List[int]:
    """perm[i] = index of g V_i"""
    if g.owner != c.field:
        raise FieldMismatchError(f"Element over F_{g.owner.q} acting on a building over F_{c.q}")
    return [c.vertex_index[g.act(v)] for v in c.vertices]


def simplex_permutation(g: GLElement, c: ReducedComplex, d: int, vertex_perm: Optional[List[int]] = None) -> List[int]:
    """perm[k] = index of g sigma_k among the d-simplices"""
    if d == -1:
        return [0]
    vertex_perm = vertex_perm if vertex_perm is not None else vertex_permutation(g, c)
    index = c.simplex_index[d]
    return [index[tuple(vertex_perm[v] for v in chain)] for chain in c.simplices[d]]


def _permutation_to_matrix(coeff: Field, perm: List[int]) -> MatrixOverField:
    size = len(perm)
    entries = np.zeros((size, size), dtype=np.int64)
    entries[perm, np.arange(size)] = 1
    return MatrixOverField(coeff, entries)


def simplex_action(g: GLElement, c: ReducedComplex, d: int) -> MatrixOverField:
    """Permutation matrix of g on C_d: P[idx(g s), idx(s)] = 1"""
    return _permutation_to_matrix(c.coeff, simplex_permutation(g, c, d))


def chamber_permutation(g: GLElement, c: ReducedComplex) -> List[int]:
    return simplex_permutation(g, c, c.top)


def chamber_action(g: GLElement, c: ReducedComplex) -> MatrixOverField:
    """Action of g on the chamber space C_{r-1}

    Raises:
        FieldMismatchError: g is not over the building field
    """
    return simplex_action(g, c, c.top)


def is_equivariant(g: GLElement, c: ReducedComplex) -> bool:
    """d_d P_d = P_{d-1} d_d in every degree"""
    vertex_perm = vertex_permutation(g, c)
    actions = {d: _permutation_to_matrix(c.coeff, simplex_permutation(g, c, d, vertex_perm)) for d in range(-1, c.rank)}
    for d, boundary in c.boundaries.items():
        if boundary @ actions[d] != actions[d - 1] @ boundary:
            return False
    return True


def apply_permutation(coeff: Field, perm: List[int], vector: np.ndarray) -> np.ndarray:
    """Chain vector pushed forward along a permutation of basis simplices"""
    out = np.zeros_like(np.asarray(vector, dtype=np.int64))
    out[perm] = vector
    return out


def is_cycle(c: ReducedComplex, vector: np.ndarray) -> bool:
    """True when the top boundary kills the chamber vector"""
    if c.top < 0:
        return True
    boundary = c.boundaries[c.top]
    return not matmul_codes(c.coeff, boundary.entries, np.asarray(vector, dtype=np.int64).reshape(-1, 1)).any()


def field_independence(n: int, q: int, coeffs: Sequence[Field]) -> Dict[int, int]:
    """dim St over each coefficient field, keyed by field order"""
    return {f.q: steinberg_kernel(build_complex(n, q, f)).dim for f in coeffs}


__all__ = [
    "Flag",
    "ReducedComplex",
    "gaussian_binomial",
    "enumerate_subspaces",
    "build_complex",
    "homology_dims",
    "steinberg_kernel",
    "vertex_permutation",
    "simplex_permutation",
    "simplex_action",
    "chamber_permutation",
    "chamber_action",
    "is_equivariant",
    "apply_permutation",
    "is_cycle",
    "field_independence",
]
