"""Unit tests for the Steinberg module, iota and the gate"""
import numpy as np
import pytest

from shared.utils.errors import CapExceededError
from steinberg_lab.exactlinalg import Subspace
from steinberg_lab.grpring import GroupRingElement
from steinberg_lab.steinberg import (
    Frame,
    alpha,
    apartment_class,
    build_module,
    check_equivariance,
    deduction_check,
    epsilon,
    gate,
    gl2_gate_walkthrough,
    iota,
    iota_inverse,
    is_irreducible,
    verify_witness,
)


class TestModule:
    @pytest.mark.parametrize("n,q,ell,dim", [(2, 2, 3, 2), (2, 3, 2, 3), (2, 5, 2, 5), (2, 7, 3, 7), (2, 4, 3, 4)])
    def test_dimension(self, n, q, ell, dim):
        module = build_module(n, q, ell)
        assert module.dim == dim == len(module.unipotent)

    def test_gl3_dimension(self, st_3_2_2):
        assert st_3_2_2.dim == 8
        assert st_3_2_2.chamber_count == 21

    def test_apartment_rows_are_alpha(self, st_2_3_2):
        for k, u in enumerate(st_2_3_2.unipotent):
            assert np.array_equal(alpha(u, st_2_3_2), st_2_3_2.apartment[k])

    def test_standard_apartment(self, st_3_2_2):
        a0 = apartment_class(Frame.standard(st_3_2_2.complex.field, 3), st_3_2_2.complex)
        assert np.array_equal(a0, st_3_2_2.a0)
        assert a0[st_3_2_2.standard_chamber] == 1
        assert np.count_nonzero(a0) == 6

    def test_vectors_enumerates_module(self, st_2_2_3):
        vectors = list(st_2_2_3.vectors())
        assert len(vectors) == 9
        assert len({v.tobytes() for v in vectors}) == 9

    def test_coordinates_reject_non_cycles(self, st_2_3_2):
        x = np.zeros(st_2_3_2.chamber_count, dtype=np.int64)
        x[0] = 1
        with pytest.raises(ValueError):
            st_2_3_2.coordinates(x)
        with pytest.raises(ValueError):
            st_2_3_2.coordinates(np.zeros(2, dtype=np.int64))


class TestFrame:
    def test_lines_must_span(self, f3):
        line = Subspace.span(f3, 2, [[1, 1]])
        with pytest.raises(ValueError):
            Frame([line, line])

    def test_wrong_count(self, f3):
        with pytest.raises(ValueError):
            Frame([Subspace.span(f3, 3, [[1, 0, 0]])])

    def test_order_independent(self, f3):
        a = Subspace.span(f3, 2, [[1, 0]])
        b = Subspace.span(f3, 2, [[1, 2]])
        assert Frame([a, b]) == Frame([b, a])


class TestIota:
    def test_round_trip(self, st_3_2_2, rng):
        for _ in range(10):
            x = st_3_2_2.random_vector(rng)
            assert np.array_equal(iota_inverse(iota(x, st_3_2_2), st_3_2_2), x)

    def test_augmentation_is_standard_coefficient(self, st_2_3_2, rng):
        for _ in range(10):
            x = st_2_3_2.random_vector(rng)
            assert epsilon(iota(x, st_2_3_2)).code == int(x[st_2_3_2.standard_chamber])

    def test_a0_maps_to_identity(self, st_2_2_3):
        image = iota(st_2_2_3.a0, st_2_2_3)
        assert image == GroupRingElement.basis(st_2_2_3.table, st_2_2_3.coeff, 0)

    def test_equivariance(self, st_2_3_2):
        report = check_equivariance(st_2_3_2)
        assert report.ok
        assert report.unipotent_checked == 9
        assert report.torus_checked == 12

    def test_equivariance_gl3(self, st_3_2_2):
        assert check_equivariance(st_3_2_2).ok


class TestGate:
    def test_value_is_nonzero(self, st_3_2_2, rng):
        for _ in range(10):
            x = st_3_2_2.random_vector(rng)
            if not x.any():
                continue
            result = gate(x, st_3_2_2)
            assert not result.value.is_zero()
            assert result.value.code == int(x[result.chamber])

    def test_zero_vector(self, st_2_3_2):
        with pytest.raises(ValueError):
            gate(np.zeros(st_2_3_2.chamber_count, dtype=np.int64), st_2_3_2)

    def test_walkthrough(self, st_2_2_3):
        x = st_2_2_3.apartment[1]
        result = gl2_gate_walkthrough(x, st_2_2_3)
        assert epsilon(result.image) == result.c0
        assert not result.c0.is_zero()
        assert set(result.to_dict()) == {"line", "g", "c0", "terms", "image"}

    def test_walkthrough_needs_gl2(self, st_3_2_2):
        with pytest.raises(ValueError):
            gl2_gate_walkthrough(st_3_2_2.a0, st_3_2_2)


class TestIrreducibility:
    @pytest.mark.parametrize(
        "q,ell,irreducible",
        [(2, 3, False), (2, 5, True), (3, 2, False), (3, 3, True), (3, 5, True), (5, 2, False), (5, 3, False), (4, 2, True), (4, 5, False)],
    )
    def test_gl2_grid(self, q, ell, irreducible):
        result = is_irreducible(build_module(2, q, ell))
        assert result.irreducible == irreducible
        if not irreducible:
            assert result.witness_dim == 1

    def test_reducible_witness(self, st_2_3_2):
        result = is_irreducible(st_2_3_2)
        assert result.method == "exhaustive"
        assert not result.irreducible
        assert result.witness_dim == 1
        assert verify_witness(st_2_3_2, result.witness)
        assert result.to_dict()["verdict"] == "reducible"

    def test_defining_characteristic(self, st_3_2_2):
        result = is_irreducible(st_3_2_2)
        assert result.irreducible
        assert result.certificate["vectors_spun"] == 255

    def test_norton_irreducible(self, st_3_2_2):
        result = is_irreducible(st_3_2_2, seed=7, budget=1)
        assert result.method == "norton"
        assert result.irreducible
        assert result.certificate["seed"] == 7

    def test_norton_reducible(self, st_2_3_2):
        result = is_irreducible(st_2_3_2, seed=3, budget=1)
        assert result.method == "norton"
        assert not result.irreducible
        assert verify_witness(st_2_3_2, result.witness)

    def test_dim_cap(self, st_3_2_2):
        with pytest.raises(CapExceededError):
            is_irreducible(st_3_2_2, dim_cap=4)

    def test_full_kernel_is_not_a_witness(self, st_2_3_2):
        assert not verify_witness(st_2_3_2, st_2_3_2.kernel)


class TestDeduction:
    def test_witness_gives_t_stable_ideal(self, st_2_3_2):
        witness = is_irreducible(st_2_3_2).witness
        report = deduction_check(witness, st_2_3_2)
        assert report.ok
        assert report.ideal_dim == 1

    def test_whole_module(self, st_2_2_3):
        report = deduction_check(st_2_2_3.kernel, st_2_2_3)
        assert report.ok
        assert report.ideal_dim == 2

    def test_rejects_zero(self, st_2_3_2):
        with pytest.raises(ValueError):
            deduction_check(Subspace.zero(st_2_3_2.coeff, st_2_3_2.chamber_count), st_2_3_2)
