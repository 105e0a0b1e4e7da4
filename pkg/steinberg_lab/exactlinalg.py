"""Dense exact linear algebra over a finite field

Matrices are numpy int64 arrays of element codes paired with their field.
Vectors are 1-D code arrays and are treated as rows; the right null space of
a matrix is the set of column vectors it kills.

A Subspace is stored by its reduced row-echelon basis with zero rows removed,
so two subspaces are equal exactly when their bases are equal.
"""
import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import FieldMismatchError, InvariantViolation

from .exactfield import Field, iter_vectors

logger = logging.getLogger(__name__)


def _as_codes(entries, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
    arr = np.array(entries, dtype=np.int64)
    if arr.ndim == 1 and rows is not None and cols is not None:
        arr = arr.reshape(rows, cols)
    if arr.ndim != 2:
        if arr.size == 0 and rows is not None and cols is not None:
            return np.zeros((rows, cols), dtype=np.int64)
        raise ValueError(f"Matrix entries must be two-dimensional, got shape {arr.shape}")
    return arr


class MatrixOverField:
    """Immutable dense matrix over a finite field

    Attributes:
        owner: Field of the entries
        entries: (rows, cols) int64 array of element codes, read-only
    """

    __slots__ = ("owner", "entries", "_key")

    def __init__(self, owner: Field, entries, rows: Optional[int] = None, cols: Optional[int] = None):
        arr = _as_codes(entries, rows, cols)
        if arr.size and (arr.min() < 0 or arr.max() >= owner.q):
            raise ValueError(f"Matrix entries out of range for {owner!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.owner = owner
        self.entries = arr
        self._key = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def zeros(cls, owner: Field, rows: int, cols: int) -> "MatrixOverField":
        return cls(owner, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, owner: Field, n: int) -> "MatrixOverField":
        return cls(owner, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, owner: Field, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "MatrixOverField":
        if len(rows) == 0:
            return cls.zeros(owner, 0, cols or 0)
        return cls(owner, np.array(rows, dtype=np.int64))

    # -- shape and identity ----------------------------------------------

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def key(self) -> Tuple:
        if self._key is None:
            self._key = (self.owner.q, self.entries.shape, self.entries.tobytes())
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixOverField):
            return NotImplemented
        return self.owner == other.owner and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"MatrixOverField(F_{self.owner.q}, {self.entries.tolist()})"

    def __getitem__(self, index):
        return self.entries[index]

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "MatrixOverField") -> None:
        if self.owner != other.owner:
            raise FieldMismatchError(f"{self.owner!r} vs {other.owner!r}")

    def __add__(self, other: "MatrixOverField") -> "MatrixOverField":
        self._check(other)
        return MatrixOverField(self.owner, self.owner.add_arr(self.entries, other.entries))

    def __sub__(self, other: "MatrixOverField") -> "MatrixOverField":
        self._check(other)
        return MatrixOverField(self.owner, self.owner.sub_arr(self.entries, other.entries))

    def __matmul__(self, other: "MatrixOverField") -> "MatrixOverField":
        self._check(other)
        return MatrixOverField(self.owner, matmul_codes(self.owner, self.entries, other.entries))

    def scale(self, c: int) -> "MatrixOverField":
        return MatrixOverField(self.owner, self.owner.scale_arr(c, self.entries))

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix times a column vector, returned as a 1-D code array"""
        return matmul_codes(self.owner, self.entries, np.asarray(vector, dtype=np.int64).reshape(-1, 1))[:, 0]

    def transpose(self) -> "MatrixOverField":
        return MatrixOverField(self.owner, self.entries.T)

    @property
    def T(self) -> "MatrixOverField":
        return self.transpose()

    def is_zero(self) -> bool:
        return not self.entries.any()

    def to_json(self) -> dict:
        """{"rows": r, "cols": c, "entries": [[...]]} with canonical element strings"""
        text = self.owner.to_text
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[text(int(x)) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, owner: Field, data) -> "MatrixOverField":
        if isinstance(data, str):
            data = json.loads(data)
        rows = [[owner.from_text(x).code for x in row] for row in data["entries"]]
        return cls.from_rows(owner, rows, cols=data.get("cols"))


def matmul_codes(f: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two code arrays over f"""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"Shape mismatch: {a.shape} @ {b.shape}")
    if f.is_prime_field:
        if f.p < 3037000499 // max(1, a.shape[1]):
            return (a @ b) % f.p
        return np.array((a.astype(object) @ b.astype(object)) % f.p, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = f.add_arr(out, f.mul_arr(a[:, k : k + 1], b[k : k + 1, :]))
    return out


def rref_codes(f: Field, a: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form of a code array

    Returns:
        (R, pivots) with R the same shape as a and pivots the strictly
        increasing pivot columns
    """
    r = np.array(a, dtype=np.int64, copy=True)
    if r.ndim != 2:
        raise ValueError(f"Expected a 2-D array, got shape {r.shape}")
    rows, cols = r.shape
    pivots: List[int] = []
    pivot_row = 0
    for col in range(cols):
        if pivot_row >= rows:
            break
        nonzero = np.nonzero(r[pivot_row:, col])[0]
        if len(nonzero) == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            r[[pivot_row, found]] = r[[found, pivot_row]]
        lead = int(r[pivot_row, col])
        if lead != 1:
            r[pivot_row] = f.scale_arr(f.inv(lead), r[pivot_row])
        factors = r[:, col].copy()
        factors[pivot_row] = 0
        hit = np.nonzero(factors)[0]
        if len(hit):
            update = f.mul_arr(factors[hit][:, None], np.broadcast_to(r[pivot_row], (len(hit), cols)))
            r[hit] = f.sub_arr(r[hit], update)
        pivots.append(col)
        pivot_row += 1
    return r, pivots


def rref(m: MatrixOverField) -> Tuple[MatrixOverField, int]:
    """Reduced row-echelon form and rank

    Args:
        m: Input matrix

    Returns:
        (R, rank) where R keeps the shape of m with zero rows at the bottom
    """
    r, pivots = rref_codes(m.owner, m.entries)
    return MatrixOverField(m.owner, r), len(pivots)


def rank(m: MatrixOverField) -> int:
    return len(rref_codes(m.owner, m.entries)[1])


class Subspace:
    """Subspace of F^ambient stored by its canonical RREF basis

    Attributes:
        owner: Coefficient field
        ambient: Ambient dimension
        basis: (dim, ambient) RREF code array, no zero rows
        pivots: Pivot column of each basis row
    """

    __slots__ = ("owner", "ambient", "basis", "pivots", "_key")

    def __init__(self, owner: Field, ambient: int, basis: np.ndarray, pivots: Sequence[int]):
        basis = np.array(basis, dtype=np.int64).reshape(-1, ambient)
        basis.setflags(write=False)
        self.owner = owner
        self.ambient = ambient
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = None

    @classmethod
    def span(cls, owner: Field, ambient: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        """Span of the given row vectors"""
        rows = [np.asarray(v, dtype=np.int64) for v in vectors]
        if not rows:
            return cls.zero(owner, ambient)
        mat = np.vstack(rows).reshape(len(rows), ambient)
        r, pivots = rref_codes(owner, mat)
        return cls(owner, ambient, r[: len(pivots)], pivots)

    @classmethod
    def zero(cls, owner: Field, ambient: int) -> "Subspace":
        return cls(owner, ambient, np.zeros((0, ambient), dtype=np.int64), ())

    @classmethod
    def full(cls, owner: Field, ambient: int) -> "Subspace":
        return cls(owner, ambient, np.eye(ambient, dtype=np.int64), range(ambient))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def key(self) -> Tuple:
        """Canonical encoding: (dim, pivots, basis codes)"""
        if self._key is None:
            self._key = (self.dim, self.pivots, tuple(int(x) for x in self.basis.ravel()))
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.owner == other.owner and self.ambient == other.ambient and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.ambient, self.key()))

    def __lt__(self, other: "Subspace") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, basis={self.basis.tolist()})"

    def as_matrix(self) -> MatrixOverField:
        return MatrixOverField(self.owner, self.basis.reshape(self.dim, self.ambient))

    def reduce(self, v: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Residual of v after clearing pivot coordinates, and the coordinates used"""
        f = self.owner
        v = np.asarray(v, dtype=np.int64).copy()
        if v.shape != (self.ambient,):
            raise ValueError(f"Vector of length {v.shape} does not match ambient dimension {self.ambient}")
        coords = v[list(self.pivots)].copy() if self.pivots else np.zeros(0, dtype=np.int64)
        if self.dim:
            combo = matmul_codes(f, coords.reshape(1, -1), self.basis)[0]
            v = f.sub_arr(v, combo)
        return v, coords

    def contains(self, v: Sequence[int]) -> bool:
        residual, _ = self.reduce(v)
        return not residual.any()

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("Ambient dimensions differ")
        return Subspace.span(self.owner, self.ambient, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        """self & other, from the relations between the two bases"""
        if self.ambient != other.ambient:
            raise ValueError("Ambient dimensions differ")
        if not self.dim or not other.dim:
            return Subspace.zero(self.owner, self.ambient)
        stacked = np.vstack([self.basis, other.basis])
        relations = kernel_basis(MatrixOverField(self.owner, stacked.T))
        if not relations.dim:
            return Subspace.zero(self.owner, self.ambient)
        vectors = matmul_codes(self.owner, relations.basis[:, : self.dim], self.basis)
        return Subspace.span(self.owner, self.ambient, vectors)

    def __and__(self, other: "Subspace") -> "Subspace":
        return self.intersect(other)

    def image(self, m: MatrixOverField) -> "Subspace":
        """Image under the column action v -> m v"""
        if not self.dim:
            return Subspace.zero(self.owner, m.rows)
        images = matmul_codes(self.owner, self.basis, m.entries.T)
        return Subspace.span(self.owner, m.rows, images)

    def is_invariant(self, m: MatrixOverField) -> bool:
        """True when m maps the subspace into itself"""
        if not self.dim:
            return True
        images = matmul_codes(self.owner, self.basis, m.entries.T)
        return all(self.contains(row) for row in images)

    def vectors(self) -> List[np.ndarray]:
        """Every vector of the subspace, ordered by coordinate code"""
        out = []
        for coords in iter_vectors(self.owner, self.dim):
            if self.dim:
                out.append(matmul_codes(self.owner, np.array(coords).reshape(1, -1), self.basis)[0])
            else:
                out.append(np.zeros(self.ambient, dtype=np.int64))
        return out


def kernel_basis(m: MatrixOverField) -> Subspace:
    """Right null space {v : m v = 0} of m, as a subspace of F^cols"""
    f = m.owner
    r, pivots = rref_codes(f, m.entries)
    cols = m.cols
    free = [c for c in range(cols) if c not in set(pivots)]
    vectors = []
    for fc in free:
        v = np.zeros(cols, dtype=np.int64)
        v[fc] = 1
        for row, pc in enumerate(pivots):
            v[pc] = f.neg(int(r[row, fc]))
        vectors.append(v)
    kernel = Subspace.span(f, cols, vectors)
    if kernel.dim + len(pivots) != cols:
        raise InvariantViolation(f"Rank-nullity failed: rank {len(pivots)} + nullity {kernel.dim} != {cols}")
    return kernel


def membership(s: Subspace, v: Sequence[int]) -> Tuple[bool, Optional[np.ndarray]]:
    """Row-space membership

    Args:
        s: Subspace
        v: Vector of length s.ambient

    Returns:
        (True, coords) with coords . basis == v, or (False, None)

    Raises:
        ValueError: Dimension mismatch
    """
    residual, coords = s.reduce(v)
    if residual.any():
        return False, None
    return True, coords


@dataclass(frozen=True)
class QuotientMap:
    """Linear surjection F^ambient -> F^(ambient - dim s) with kernel s

    Attributes:
        subspace: The subspace being killed
        matrix: (ambient, target_dim) matrix acting on row vectors
        kept: Non-pivot coordinates that survive
    """

    subspace: Subspace
    matrix: MatrixOverField
    kept: Tuple[int, ...]

    @property
    def target_dim(self) -> int:
        return len(self.kept)

    def __call__(self, v: Sequence[int]) -> np.ndarray:
        residual, _ = self.subspace.reduce(v)
        return residual[list(self.kept)]


def quotient_coords(ambient: int, s: Subspace) -> QuotientMap:
    """Quotient map by s via projection onto the non-pivot coordinates"""
    if s.ambient != ambient:
        raise ValueError(f"Subspace ambient {s.ambient} != {ambient}")
    f = s.owner
    kept = tuple(c for c in range(ambient) if c not in set(s.pivots))
    rows = []
    for i in range(ambient):
        unit = np.zeros(ambient, dtype=np.int64)
        unit[i] = 1
        residual, _ = s.reduce(unit)
        rows.append(residual[list(kept)])
    matrix = MatrixOverField(f, np.array(rows, dtype=np.int64).reshape(ambient, len(kept)))
    return QuotientMap(s, matrix, kept)


def solve(m: MatrixOverField, b: Sequence[int]) -> Optional[np.ndarray]:
    """Some x with m x = b, or None when inconsistent"""
    f = m.owner
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([m.entries, b])
    r, pivots = rref_codes(f, aug)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = r[row, m.cols]
    return x


def inverse(m: MatrixOverField) -> MatrixOverField:
    """Inverse of a square matrix

    Raises:
        ValueError: Matrix is singular or not square
    """
    if m.rows != m.cols:
        raise ValueError(f"Only square matrices are invertible, got {m.shape}")
    n = m.rows
    aug = np.hstack([m.entries, np.eye(n, dtype=np.int64)])
    r, pivots = rref_codes(m.owner, aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("Matrix is singular")
    return MatrixOverField(m.owner, r[:, n:])


def determinant(m: MatrixOverField) -> int:
    """Determinant code by elimination"""
    if m.rows != m.cols:
        raise ValueError(f"Determinant needs a square matrix, got {m.shape}")
    f = m.owner
    r = np.array(m.entries, copy=True)
    n = m.rows
    det = 1
    for col in range(n):
        nonzero = np.nonzero(r[col:, col])[0]
        if len(nonzero) == 0:
            return 0
        found = col + int(nonzero[0])
        if found != col:
            r[[col, found]] = r[[found, col]]
            det = f.neg(det)
        lead = int(r[col, col])
        det = f.mul(det, lead)
        inv_lead = f.inv(lead)
        for row in range(col + 1, n):
            factor = int(r[row, col])
            if factor:
                scale = f.mul(factor, inv_lead)
                r[row] = f.sub_arr(r[row], f.scale_arr(scale, r[col]))
    return det


class EchelonBasis:
    """Incrementally grown echelon basis, used for spinning and closures

    Rows are kept fully reduced against each other, so membership is one
    reduction pass.
    """

    def __init__(self, owner: Field, ambient: int):
        self.owner = owner
        self.ambient = ambient
        self.rows: Dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence[int]) -> np.ndarray:
        f = self.owner
        v = np.array(v, dtype=np.int64, copy=True)
        for pivot, row in self.rows.items():
            c = int(v[pivot])
            if c:
                v = f.sub_arr(v, f.scale_arr(c, row))
        return v

    def add(self, v: Sequence[int]) -> bool:
        """Add v to the span; returns True when the dimension grew"""
        f = self.owner
        residual = self.reduce(v)
        nonzero = np.nonzero(residual)[0]
        if len(nonzero) == 0:
            return False
        pivot = int(nonzero[0])
        residual = f.scale_arr(f.inv(int(residual[pivot])), residual)
        for other_pivot, row in list(self.rows.items()):
            c = int(row[pivot])
            if c:
                self.rows[other_pivot] = f.sub_arr(row, f.scale_arr(c, residual))
        self.rows[pivot] = residual
        return True

    def contains(self, v: Sequence[int]) -> bool:
        return not self.reduce(v).any()

    def to_subspace(self) -> Subspace:
        return Subspace.span(self.owner, self.ambient, list(self.rows.values()))


__all__ = [
    "MatrixOverField",
    "Subspace",
    "QuotientMap",
    "EchelonBasis",
    "matmul_codes",
    "rref_codes",
    "rref",
    "rank",
    "kernel_basis",
    "membership",
    "quotient_coords",
    "solve",
    "inverse",
    "determinant",
]
