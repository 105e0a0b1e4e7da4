"""Unit tests for exact linear algebra over finite fields"""
import numpy as np
import pytest

from shared.utils.errors import FieldMismatchError
from steinberg_lab.exactlinalg import (
    EchelonBasis,
    MatrixOverField,
    Subspace,
    determinant,
    inverse,
    kernel_basis,
    membership,
    quotient_coords,
    rank,
    rref,
    solve,
)


class TestMatrix:
    def test_rejects_out_of_range_entries(self, f3):
        with pytest.raises(ValueError):
            MatrixOverField(f3, [[0, 3]])

    def test_product_over_f4(self, f4):
        x = f4.x.code
        m = MatrixOverField(f4, [[x, 1], [0, x]])
        square = m @ m
        assert square.entries.tolist() == [[f4.mul(x, x), 0], [0, f4.mul(x, x)]]

    def test_field_mismatch(self, f2, f3):
        with pytest.raises(FieldMismatchError):
            MatrixOverField(f2, [[1]]) + MatrixOverField(f3, [[1]])

    def test_apply_is_column_action(self, f5):
        m = MatrixOverField(f5, [[1, 2], [0, 1]])
        assert m.apply([1, 1]).tolist() == [3, 1]

    def test_json_round_trip(self, f4):
        m = MatrixOverField(f4, [[0, 1, 2], [3, 2, 1]])
        assert MatrixOverField.from_json(f4, m.to_json()) == m

    def test_equality_and_hash(self, f3):
        a = MatrixOverField(f3, [[1, 2]])
        b = MatrixOverField.from_rows(f3, [[1, 2]])
        assert a == b
        assert len({a, b}) == 1


class TestElimination:
    def test_rref_and_rank(self, f3):
        m = MatrixOverField(f3, [[1, 2, 0], [2, 1, 0], [0, 0, 2]])
        r, k = rref(m)
        assert k == 2
        assert r.entries.tolist() == [[1, 2, 0], [0, 0, 1], [0, 0, 0]]

    def test_rank_nullity(self, f2, rng):
        for _ in range(10):
            m = MatrixOverField(f2, rng.integers(0, 2, size=(4, 6)))
            assert rank(m) + kernel_basis(m).dim == 6

    def test_kernel_vectors_are_killed(self, f5):
        m = MatrixOverField(f5, [[1, 2, 3, 4], [0, 1, 1, 1]])
        kernel = kernel_basis(m)
        assert kernel.dim == 2
        for v in kernel.basis:
            assert not m.apply(v).any()

    def test_solve(self, f5):
        m = MatrixOverField(f5, [[1, 1], [1, 4]])
        x = solve(m, [2, 0])
        assert m.apply(x).tolist() == [2, 0]
        assert solve(MatrixOverField(f5, [[1, 1], [1, 1]]), [1, 2]) is None

    def test_inverse(self, f8):
        x = f8.x.code
        m = MatrixOverField(f8, [[1, x], [0, 1]])
        assert (m @ inverse(m)) == MatrixOverField.identity(f8, 2)
        with pytest.raises(ValueError):
            inverse(MatrixOverField(f8, [[1, 1], [1, 1]]))

    def test_determinant(self, f5):
        assert determinant(MatrixOverField(f5, [[0, 1], [1, 0]])) == 4
        assert determinant(MatrixOverField(f5, [[2, 3], [4, 1]])) == (2 - 12) % 5


class TestSubspace:
    def test_canonical_key(self, f3):
        a = Subspace.span(f3, 3, [[1, 1, 0], [0, 1, 1]])
        b = Subspace.span(f3, 3, [[1, 2, 1], [2, 0, 1]])
        assert a.dim == 2
        assert a == b
        assert hash(a) == hash(b)

    def test_membership(self, f3):
        s = Subspace.span(f3, 3, [[1, 1, 0]])
        ok, coords = membership(s, [2, 2, 0])
        assert ok and coords.tolist() == [2]
        assert membership(s, [1, 0, 0]) == (False, None)
        with pytest.raises(ValueError):
            membership(s, [1, 0])

    def test_sum_and_intersection(self, f2):
        a = Subspace.span(f2, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])
        b = Subspace.span(f2, 4, [[0, 1, 0, 0], [0, 0, 1, 0]])
        assert (a + b).dim == 3
        meet = a & b
        assert meet == Subspace.span(f2, 4, [[0, 1, 0, 0]])
        assert (a & Subspace.zero(f2, 4)).dim == 0

    def test_image_and_invariance(self, f3):
        m = MatrixOverField(f3, [[1, 1], [0, 1]])
        line = Subspace.span(f3, 2, [[1, 0]])
        assert line.is_invariant(m)
        assert not Subspace.span(f3, 2, [[0, 1]]).is_invariant(m)
        assert line.image(m) == line

    def test_vectors(self, f3):
        s = Subspace.span(f3, 2, [[1, 2]])
        assert [v.tolist() for v in s.vectors()] == [[0, 0], [1, 2], [2, 1]]

    def test_quotient(self, f2):
        s = Subspace.span(f2, 3, [[1, 1, 0]])
        q = quotient_coords(3, s)
        assert q.target_dim == 2
        assert not q([1, 1, 0]).any()
        assert q([1, 0, 0]).any()


class TestEchelonBasis:
    def test_grows_and_matches_span(self, f5):
        basis = EchelonBasis(f5, 3)
        assert basis.add([1, 2, 3])
        assert not basis.add([2, 4, 1])
        assert basis.add([0, 1, 1])
        assert basis.contains([1, 3, 4])
        assert basis.to_subspace() == Subspace.span(f5, 3, [[1, 2, 3], [0, 1, 1]])
        assert np.array_equal(basis.reduce([1, 2, 3]), np.zeros(3))
