"""Unit tests for the building and its chain complex"""
import numpy as np
import pytest

from shared.utils.errors import CapExceededError
from steinberg_lab.building import (
    Flag,
    apply_permutation,
    build_complex,
    chamber_action,
    enumerate_subspaces,
    field_independence,
    gaussian_binomial,
    homology_dims,
    is_cycle,
    is_equivariant,
    steinberg_kernel,
)
from steinberg_lab.exactfield import field_make
from steinberg_lab.exactlinalg import Subspace
from steinberg_lab.matgroup import gl_generators


class TestSubspaces:
    @pytest.mark.parametrize("n,k,q,count", [(2, 1, 3, 4), (3, 1, 2, 7), (3, 2, 2, 7), (4, 2, 2, 35), (3, 1, 4, 21)])
    def test_gaussian_binomial(self, n, k, q, count):
        assert gaussian_binomial(n, k, q) == count

    def test_enumeration_is_sorted_and_distinct(self, f3):
        lines = enumerate_subspaces(f3, 2, 1)
        assert len(lines) == 4
        assert lines == sorted(lines)
        assert len(set(lines)) == 4
        assert lines[0].basis.tolist() == [[1, 0]]

    def test_extension_field(self, f4):
        assert len(enumerate_subspaces(f4, 3, 2)) == 21


class TestFlag:
    def test_rejects_non_nested(self, f2):
        a = Subspace.span(f2, 3, [[1, 0, 0]])
        b = Subspace.span(f2, 3, [[0, 1, 0], [0, 0, 1]])
        with pytest.raises(ValueError):
            Flag([a, b])

    def test_rejects_improper_member(self, f2):
        with pytest.raises(ValueError):
            Flag([Subspace.full(f2, 2)])

    def test_empty_flag_needs_context(self, f2):
        with pytest.raises(ValueError):
            Flag([])
        assert len(Flag([], f2, 1)) == 0

    def test_standard_is_complete(self, f3):
        assert Flag.standard(f3, 4).is_complete()


class TestComplex:
    @pytest.mark.parametrize("n,q,dim", [(2, 2, 2), (2, 3, 3), (2, 5, 5), (2, 7, 7), (3, 2, 8)])
    def test_solomon_tits(self, n, q, dim, f3):
        c = build_complex(n, q, f3)
        dims = homology_dims(c)
        assert dims[:-1] == [0] * (len(dims) - 1)
        assert dims[-1] == dim
        assert steinberg_kernel(c).dim == dim

    @pytest.mark.slow
    def test_solomon_tits_gl3_f3(self, f2):
        c = build_complex(3, 3, f2)
        assert homology_dims(c) == [0, 0, 27]

    def test_simplex_counts(self, f2):
        c = build_complex(3, 2, f2)
        assert c.simplex_counts() == [1, 14, 21]
        assert len(c.chambers) == 21

    def test_gl1_convention(self, f5):
        c = build_complex(1, 3, f5)
        assert c.chambers == [()]
        assert homology_dims(c) == [1]
        assert steinberg_kernel(c).dim == 1

    def test_standard_chamber(self, f2):
        c = build_complex(3, 2, f2)
        assert c.chamber_flag(c.standard_chamber) == Flag.standard(c.field, 3)

    def test_cap(self, f2):
        with pytest.raises(CapExceededError):
            build_complex(3, 3, f2, cap=10)

    def test_field_independence(self):
        dims = field_independence(2, 5, [field_make(ell) for ell in (2, 3, 5, 7)])
        assert set(dims.values()) == {5}


class TestAction:
    def test_generators_commute_with_boundaries(self, f3):
        c = build_complex(3, 2, f3)
        for g in gl_generators(c.field, 3):
            assert is_equivariant(g, c)

    def test_action_preserves_cycles(self, f2):
        c = build_complex(2, 3, f2)
        kernel = steinberg_kernel(c)
        for g in gl_generators(c.field, 2):
            moved = kernel.image(chamber_action(g, c))
            assert moved == kernel

    def test_apply_permutation(self, f2):
        v = np.array([1, 0, 1])
        assert apply_permutation(f2, [2, 0, 1], v).tolist() == [0, 1, 1]

    def test_is_cycle(self, f2):
        c = build_complex(2, 2, f2)
        assert is_cycle(c, np.array([1, 1, 0]))
        assert not is_cycle(c, np.array([1, 0, 0]))
