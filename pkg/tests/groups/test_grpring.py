"""Unit tests for group rings, augmentation ideals and coinvariants"""
import numpy as np
import pytest

from shared.utils.errors import CapExceededError
from steinberg_lab.exactfield import field_make
from steinberg_lab.grpring import (
    GroupRingElement,
    abelian_coinv_witness,
    aug_nilpotency,
    coinvariants,
    coset_permutation_module,
    direct_sum,
    generates_unit_ideal,
    ideal_closure,
    index_p_subgroups,
    named_table,
    random_module,
    regular_action,
    t_stable_counterexample,
    unipotent_table,
    unique_maximal_check,
)


class TestTables:
    @pytest.mark.parametrize("name,order", [("C_2", 2), ("C_3", 3), ("C_2xC_2", 4), ("U_3(F_2)", 8), ("U_2(F_3)", 3)])
    def test_named(self, name, order):
        table = named_table(name)
        assert table.order == order
        assert table.elements[table.identity].is_identity()

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            named_table("S_3")

    def test_inverses(self):
        table = named_table("U_3(F_2)")
        for k in range(table.order):
            assert table.mult[k, table.inverse[k]] == table.identity

    def test_regular_action_cap(self, f2):
        with pytest.raises(CapExceededError):
            regular_action(named_table("U_3(F_2)"), f2, cap=4)


class TestElements:
    def test_multiplication_in_c2(self, f3):
        table = named_table("C_2")
        g = next(k for k in range(2) if k != table.identity)
        x = GroupRingElement.basis(table, f3, g)
        one = GroupRingElement.basis(table, f3, table.identity)
        assert x * x == one
        assert (one + x).augmentation().code == 2
        assert ((one + x) * (one - x)).is_zero()

    def test_left_translate_matches_product(self, f2):
        table = named_table("U_3(F_2)")
        x = GroupRingElement.from_vector(table, f2, [1, 0, 1, 1, 0, 0, 1, 0])
        for k in range(table.order):
            assert x.left_translate(k) == GroupRingElement.basis(table, f2, k) * x

    def test_different_rings(self, f2, f3):
        table = named_table("C_2")
        with pytest.raises(ValueError):
            GroupRingElement.basis(table, f2, 0) + GroupRingElement.basis(table, f3, 0)


class TestAugmentation:
    @pytest.mark.parametrize("name,p,dims", [("C_2", 2, [1, 0]), ("C_3", 3, [2, 1, 0]), ("C_2xC_2", 2, [3, 1, 0])])
    def test_nilpotent_in_matching_characteristic(self, name, p, dims):
        report = aug_nilpotency(named_table(name), field_make(p))
        assert report.nilpotent
        assert report.dims == dims
        assert report.index == len(dims)
        assert report.characteristic_matches

    def test_u3_nilpotent(self, f2):
        report = aug_nilpotency(named_table("U_3(F_2)"), f2)
        assert report.nilpotent
        assert report.index <= 8

    def test_stalls_across_characteristic(self, f3):
        report = aug_nilpotency(named_table("C_2"), f3)
        assert not report.nilpotent
        assert report.index is None
        assert not report.characteristic_matches
        assert report.to_dict()["N"] is None

    def test_unique_maximal_in_p_group(self, f2):
        report = unique_maximal_check(named_table("C_2xC_2"), f2)
        assert report.passed
        assert report.exhaustive
        assert report.checked == 8

    def test_unique_maximal_fails_across_characteristic(self, f3):
        table = named_table("C_2")
        report = unique_maximal_check(table, f3)
        assert not report.passed
        assert not generates_unit_ideal(table, f3, np.array(report.counterexample))

    def test_sampled_check_records_seed(self, f2):
        report = unique_maximal_check(named_table("U_3(F_2)"), f2, seed=11, budget=16, samples=50)
        assert report.passed
        assert not report.exhaustive
        assert report.seed == 11


class TestIdeals:
    def test_closure_of_unit(self, f2):
        table = named_table("C_3")
        ideal = ideal_closure([GroupRingElement.basis(table, f2, table.identity)])
        assert not ideal.is_proper()

    def test_empty_closure_needs_ring(self):
        with pytest.raises(ValueError):
            ideal_closure([])

    @pytest.mark.parametrize("ell", [2, 3])
    def test_closure_is_idempotent_and_monotone(self, ell, rng):
        """Test closing a closure changes nothing and more generators give a larger ideal"""
        f = field_make(ell)
        table = named_table("U_3(F_2)")
        for _ in range(5):
            x, y = (
                GroupRingElement.from_vector(table, f, rng.integers(0, ell, size=table.order))
                for _ in range(2)
            )
            if x.is_zero():
                continue
            small = ideal_closure([x])
            large = ideal_closure([x, y])
            assert ideal_closure(large.basis_elements()).space == large.space
            assert ideal_closure(small.basis_elements()).space == small.space
            assert large.space.contains_subspace(small.space)

    def test_counterexample_cross_characteristic(self):
        result = t_stable_counterexample(2, 2, 3)
        assert result.found
        assert result.ideal.dim == 1
        assert result.epsilon.code == 2
        assert all(result.checks.values())
        assert result.exhaustive

    def test_counterexample_with_torus(self):
        result = t_stable_counterexample(2, 3, 2)
        assert result.found
        assert result.ideal.dim == 1
        assert result.ideal.has_nonzero_augmentation()

    def test_no_counterexample_in_equal_characteristic(self):
        result = t_stable_counterexample(2, 2, 2)
        assert not result.found
        assert result.to_dict()["ideal"] is None

    def test_u3_equal_characteristic(self):
        assert not t_stable_counterexample(3, 2, 2).found


class TestCoinvariants:
    def test_trivial_module(self, f3):
        table = named_table("C_2")
        eye = regular_action(table, f3, [table.identity])[0]
        quotient = coinvariants([eye], 2, f3)
        assert quotient.target_dim == 2

    def test_regular_module_collapses_to_line(self, f3):
        table = named_table("C_2xC_2")
        quotient = coinvariants(regular_action(table, f3), 4, f3)
        assert quotient.target_dim == 1

    def test_index_p_subgroups(self):
        assert len(index_p_subgroups(named_table("C_2xC_2"))) == 3
        assert index_p_subgroups(named_table("C_3")) == [(named_table("C_3").identity,)]

    def test_witness_for_sign_module(self, f3):
        table = named_table("C_2xC_2")
        sub = index_p_subgroups(table)[0]
        rho = coset_permutation_module(table, f3, sub)
        witness = abelian_coinv_witness(table, rho, [1, 2])
        assert witness.index in (1, 2)
        assert any(witness.image)

    @pytest.mark.parametrize("name,ell", [("U_3(F_2)", 3), ("C_2xC_2", 3), ("C_3", 2), ("U_2(F_3)", 5)])
    def test_coinvariants_add_over_direct_sums(self, name, ell, rng):
        """Test dim of the coinvariants of a direct sum is the sum of the dims"""
        f = field_make(ell)
        table = named_table(name)
        for _ in range(4):
            first = random_module(table, f, 4, rng)
            second = random_module(table, f, 4, rng)
            d1, d2 = first[0].rows, second[0].rows
            total = coinvariants(direct_sum(first, second), d1 + d2, f).target_dim
            assert total == coinvariants(first, d1, f).target_dim + coinvariants(second, d2, f).target_dim

    def test_random_modules(self, f3, rng):
        table = unipotent_table(2, 2)
        for _ in range(5):
            rho = random_module(table, f3, 4, rng)
            m = np.zeros(rho[0].rows, dtype=np.int64)
            m[0] = 1
            witness = abelian_coinv_witness(table, rho, m)
            assert any(witness.image)

    def test_rejects_zero_and_matching_characteristic(self, f2, f3):
        table = named_table("C_2")
        with pytest.raises(ValueError):
            abelian_coinv_witness(table, regular_action(table, f3), [0, 0])
        with pytest.raises(ValueError):
            abelian_coinv_witness(table, regular_action(table, f2), [1, 0])
