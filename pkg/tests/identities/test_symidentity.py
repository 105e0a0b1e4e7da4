"""Unit tests for the symmetric identity and its module-side lemma"""
import itertools

import pytest
from sympy import Rational

from steinberg_lab.symidentity import (
    LaurentPolynomial,
    ModuleInstance,
    SubmoduleModM,
    check_identity_range,
    elementary_symmetric,
    lemma_check,
    psi_instance,
    random_instance,
    random_specialization,
    specialize,
    verify_identity_symbolic,
    verify_identity_sympy,
)


class TestLaurent:
    def test_inverse_variable(self):
        z = LaurentPolynomial.variable(2, 1)
        z_inv = LaurentPolynomial.variable(2, 1, -1)
        assert z * z_inv == LaurentPolynomial.constant(2, 1)

    def test_cancellation(self):
        z = LaurentPolynomial.variable(3, 2, 2)
        assert (z - z).is_zero()
        assert str(z - z) == "0"

    def test_elementary_symmetric_text(self):
        assert str(elementary_symmetric(3, 2)) == "z1*z2 + z1*z3 + z2*z3"
        assert elementary_symmetric(4, 0) == LaurentPolynomial.constant(4, 1)
        with pytest.raises(ValueError):
            elementary_symmetric(2, 3)

    def test_evaluate(self):
        e2 = elementary_symmetric(3, 2)
        assert e2.evaluate([1, 2, Rational(1, 2)]) == Rational(2) + Rational(1, 2) + Rational(1)
        with pytest.raises(ValueError):
            e2.evaluate([1, 0, 1])

    def test_exponent_length(self):
        with pytest.raises(ValueError):
            LaurentPolynomial(2, {(1,): 1})


class TestIdentity:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_symbolic(self, n):
        check = verify_identity_symbolic(n)
        assert check.holds
        assert check.rhs_terms == n

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_sympy_cross_check(self, n):
        assert verify_identity_sympy(n)

    def test_range_limits(self):
        with pytest.raises(ValueError):
            verify_identity_symbolic(0)
        with pytest.raises(ValueError):
            verify_identity_sympy(9)

    def test_check_identity_range(self):
        assert check_identity_range(4) == {1: True, 2: True, 3: True, 4: True}

    def test_specialize(self):
        lhs, rhs = specialize(3, [2, Rational(-1, 3), 5], [[1, 0], [4, -2], [0, 7]])
        assert lhs == rhs

    def test_random_specializations(self, rng):
        for _ in range(20):
            n, z, m = random_specialization(rng)
            lhs, rhs = specialize(n, z, m)
            assert lhs == rhs

    def test_specialize_rejects_zero(self):
        with pytest.raises(ValueError):
            specialize(2, [1, 0], [[1], [1]])


class TestModuleSide:
    def test_submodule_mod_4(self):
        sub = SubmoduleModM(4, 1)
        assert sub.add([2])
        assert not sub.add([2])
        assert sub.order() == 2
        assert not sub.contains([1])

    @pytest.mark.parametrize("modulus,dim", [(4, 2), (6, 2), (8, 1), (9, 2), (12, 2), (25, 1), (6, 3)])
    def test_submodule_matches_brute_force_closure(self, modulus, dim, rng):
        """Test echelon membership against the additive closure of the same generators"""
        gens = [tuple(int(x) for x in rng.integers(0, modulus, size=dim)) for _ in range(2)]
        sub = SubmoduleModM(modulus, dim)
        for g in gens:
            sub.add(g)

        closure = {tuple([0] * dim)}
        frontier = list(closure)
        while frontier:
            v = frontier.pop()
            for g in gens:
                w = tuple((a + b) % modulus for a, b in zip(v, g))
                if w not in closure:
                    closure.add(w)
                    frontier.append(w)

        assert sub.order() == len(closure)
        for v in itertools.product(range(modulus), repeat=dim):
            assert sub.contains(v) == (v in closure)

    def test_lemma_mod_7(self):
        instance = ModuleInstance(7, [[[2]], [[3]]])
        result = lemma_check(instance, [[1], [1]])
        assert result.holds
        assert result.generators == [[5], [6]]
        assert result.submodule_order == 7

    def test_rejects_non_commuting(self):
        with pytest.raises(ValueError):
            ModuleInstance(5, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            ModuleInstance(4, [[[2]]])

    def test_wrong_vector_count(self):
        with pytest.raises(ValueError):
            lemma_check(ModuleInstance(5, [[[2]]]), [[1], [1]])

    def test_random_instances(self, rng):
        for _ in range(15):
            instance, ms = random_instance(rng)
            assert lemma_check(instance, ms).holds

    def test_group_ring_instance(self):
        instance, ms = psi_instance(3, [1, 2], [1, 2], 5)
        assert instance.dim == 3
        result = lemma_check(instance, ms)
        assert result.holds
        assert sum(result.target) == 3

    def test_group_ring_instance_needs_prime(self):
        with pytest.raises(ValueError):
            psi_instance(3, [1], [1], 4)
