"""Unit tests for finite field arithmetic"""
import numpy as np
import pytest

from shared.utils.errors import CapExceededError, FieldMismatchError
from steinberg_lab.exactfield import (
    AdditiveMap,
    absolute_trace,
    arith,
    field_make,
    field_of_order,
    iter_vectors,
    primitive_element,
    trace_map,
)


class TestFieldMake:
    def test_prime_field(self, f5):
        assert f5.q == 5
        assert f5.is_prime_field
        assert [a.code for a in f5.elements()] == [0, 1, 2, 3, 4]

    def test_canonical_moduli(self):
        assert field_make(2, 2).modulus == (1, 1, 1)
        assert field_make(2, 3).modulus == (1, 1, 0, 1)
        assert field_make(3, 2).modulus == (1, 0, 1)

    def test_same_instance(self):
        assert field_make(2, 2) is field_make(2, 2)

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            field_make(6)

    def test_rejects_bad_degree(self):
        with pytest.raises(ValueError):
            field_make(2, 0)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            field_make(2, 10, cap=512)

    def test_field_of_order(self):
        f = field_of_order(9)
        assert (f.p, f.e) == (3, 2)
        with pytest.raises(ValueError):
            field_of_order(12)


class TestArithmetic:
    def test_f4_multiplication(self, f4):
        x = f4.x
        assert x * x == x + 1
        assert x * (x + 1) == f4.one

    def test_every_nonzero_element_inverts(self, f8):
        for a in f8.nonzero_elements():
            assert a * a.inverse() == f8.one

    def test_division_by_zero(self, f3):
        with pytest.raises(ZeroDivisionError):
            f3.one / f3.zero

    def test_mismatched_fields(self, f2, f3):
        with pytest.raises(FieldMismatchError):
            arith(f2.one, f3.one, "add")

    def test_arith_ops(self, f5):
        a, b = f5(3), f5(4)
        assert arith(a, b, "add").code == 2
        assert arith(a, b, "sub").code == 4
        assert arith(a, b, "mul").code == 2
        assert arith(a, b, "div") * b == a

    def test_integer_coercion_in_extension(self, f4):
        assert (f4.x + 1).code == 3
        assert (f4.x * 2).is_zero()

    def test_power_and_frobenius(self, f8):
        x = f8.x
        assert x**7 == f8.one
        assert x.frobenius() == x * x
        assert (x ** -1) * x == f8.one

    def test_vectorized_matches_scalar(self, f4):
        a = np.array([0, 1, 2, 3])
        b = np.array([3, 3, 2, 1])
        assert f4.add_arr(a, b).tolist() == [f4.add(int(s), int(t)) for s, t in zip(a, b)]
        assert f4.mul_arr(a, b).tolist() == [f4.mul(int(s), int(t)) for s, t in zip(a, b)]
        assert f4.sum_arr(a) == 0

    def test_large_extension_without_tables(self):
        f = field_make(2, 11)
        x = f.x
        assert x ** (f.q - 1) == f.one


class TestTextForm:
    def test_round_trip(self, f4):
        assert f4.to_text(2) == "01"
        assert f4.from_text("11").code == 3

    def test_dotted_for_large_p(self):
        f = field_make(11, 2)
        assert f.to_text(12) == "1.1"
        assert f.from_text("1.1").code == 12

    def test_rejects_bad_text(self, f4):
        with pytest.raises(ValueError):
            f4.from_text("2")


class TestVectorsAndGenerators:
    def test_iter_vectors_order(self, f2):
        assert list(iter_vectors(f2, 2)) == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_primitive_elements(self):
        assert primitive_element(field_make(2)).code == 1
        assert primitive_element(field_make(5)).code == 2
        assert primitive_element(field_make(7)).code == 3
        assert primitive_element(field_make(2, 2)).code == 2


class TestTrace:
    def test_f4_trace(self, f4):
        trace = trace_map(f4)
        assert trace.values == (0, 1)
        assert [trace(a) for a in f4.elements()] == [0, 0, 1, 1]
        assert trace.kernel() == [(1, 0)]

    def test_trace_agrees_with_power_sum(self, f8):
        trace = trace_map(f8)
        for a in f8.elements():
            assert trace(a) == absolute_trace(a)

    def test_prime_field_trace_is_identity(self, f3):
        assert [trace_map(f3)(a) for a in f3.elements()] == [0, 1, 2]

    def test_additive_map_validation(self, f4):
        with pytest.raises(ValueError):
            AdditiveMap(f4, (1,))
        with pytest.raises(ValueError):
            AdditiveMap(f4, (2, 0))

    def test_zero_map_kernel_is_everything(self, f8):
        assert len(AdditiveMap(f8, (0, 0, 0)).kernel()) == 3
