"""Unit tests for matrix groups, positivity and subgroup searches"""
import pytest

from shared.utils.errors import CapExceededError
from steinberg_lab.building import Flag
from steinberg_lab.exactfield import field_of_order
from steinberg_lab.exactlinalg import MatrixOverField, Subspace
from steinberg_lab.matgroup import (
    GLElement,
    OneParamSubgroup,
    UnipotentElement,
    abelian_invariants,
    are_isomorphic,
    center,
    construct_positive_oneparam,
    diagonal_matrix,
    elementary,
    enumerate_group,
    evaluate_word,
    flag_to_standard,
    gl_generators,
    group_order,
    monoid_act,
    nilpotence_data,
    one_param_positive,
    permutation_sign,
    positive_roots,
    root,
    root_factorize,
    root_reconstruct,
    simple_roots,
    standard_subspace,
    subgroup_census,
    subgroup_closure,
    torus_conjugate,
    word_set_discover,
)


class TestEnumeration:
    @pytest.mark.parametrize(
        "which,n,q,order",
        [("GL", 2, 2, 6), ("GL", 2, 3, 48), ("GL", 3, 2, 168), ("B", 2, 3, 12), ("U", 3, 2, 8), ("T", 2, 5, 16)],
    )
    def test_orders(self, which, n, q, order):
        elements = enumerate_group(which, n, field_of_order(q))
        assert len(elements) == order == group_order(which, n, q)
        assert elements == sorted(elements)

    def test_unipotent_starts_with_identity(self, f3):
        elements = enumerate_group("U", 2, f3)
        assert elements[0].is_identity()
        assert all(isinstance(u, UnipotentElement) for u in elements)

    def test_cap(self, f3):
        with pytest.raises(CapExceededError):
            enumerate_group("GL", 3, f3, cap=1000)

    def test_unknown_group(self):
        with pytest.raises(ValueError):
            group_order("SL", 2, 2)


class TestElements:
    def test_singular_matrix_rejected(self, f2):
        with pytest.raises(ValueError):
            GLElement(MatrixOverField(f2, [[1, 1], [1, 1]]))

    def test_elementary_order(self, f3):
        assert elementary(f3, 2, 1, 2, 1).order() == 3
        with pytest.raises(ValueError):
            elementary(f3, 2, 2, 1, 1)

    def test_generators_generate(self, f2):
        gens = gl_generators(f2, 3)
        closure = subgroup_closure(gens)
        assert closure.order == 168

    def test_permutation_sign(self):
        assert permutation_sign([0, 1, 2]) == 1
        assert permutation_sign([1, 0, 2]) == -1
        assert permutation_sign([1, 2, 0]) == 1


class TestPositivity:
    def test_standard_cocharacter(self):
        for n in range(2, 6):
            gamma = construct_positive_oneparam(simple_roots(n))
            assert gamma == one_param_positive(n)
            assert all(chi.pair(gamma) >= 1 for chi in positive_roots(n))

    def test_empty_roots(self):
        with pytest.raises(ValueError):
            construct_positive_oneparam([])

    def test_dependent_roots(self):
        with pytest.raises(ValueError):
            construct_positive_oneparam([root(3, 1, 2), root(3, 1, 2)])

    def test_monoid_act_scales_entries(self, f5):
        gamma = one_param_positive(3)
        u = root_reconstruct(f5, 3, {(1, 2): 1, (1, 3): 2, (2, 3): 3})
        a = f5(2)
        moved = monoid_act(a, u, gamma)
        for i, j in [(0, 1), (0, 2), (1, 2)]:
            expected = f5.mul(int(u.entries[i, j]), f5.power(2, j - i))
            assert int(moved.entries[i, j]) == expected

    def test_monoid_act_at_zero_is_identity(self, f3):
        u = elementary(f3, 2, 1, 2, 2)
        assert monoid_act(0, u, one_param_positive(2)).is_identity()

    def test_monoid_act_matches_conjugation(self, f5):
        gamma = one_param_positive(3)
        u = root_reconstruct(f5, 3, {(1, 2): 4, (2, 3): 1})
        t = f5(3)
        assert monoid_act(t, u, gamma) == torus_conjugate(gamma.at(t), u)

    def test_non_positive_rejected(self, f3):
        with pytest.raises(ValueError):
            monoid_act(1, elementary(f3, 2, 1, 2, 1), OneParamSubgroup((1, 1)))

    def test_oneparam_at_zero(self, f3):
        with pytest.raises(ZeroDivisionError):
            one_param_positive(2).at(f3.zero)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_monoid_act_composes(self, n, q):
        """Test (ab).u == a.(b.u) for every a, b in F_q and every u in U_n(F_q)"""
        f = field_of_order(q)
        gamma = one_param_positive(n)
        for u in enumerate_group("U", n, f):
            moved = {b: monoid_act(b, u, gamma) for b in range(q)}
            for a in range(q):
                for b in range(q):
                    assert monoid_act(f.mul(a, b), u, gamma) == monoid_act(a, moved[b], gamma)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_monoid_act_is_homomorphism(self, n, q, rng):
        """Test a.(uv) == (a.u)(a.v) on all pairs, or a seeded sample of U when it is large"""
        f = field_of_order(q)
        gamma = one_param_positive(n)
        elements = enumerate_group("U", n, f)
        if len(elements) > 32:
            elements = [elements[int(i)] for i in rng.choice(len(elements), size=32, replace=False)]
        for a in range(q):
            images = [monoid_act(a, u, gamma) for u in elements]
            for u, au in zip(elements, images):
                for v, av in zip(elements, images):
                    assert monoid_act(a, u * v, gamma) == au * av

    @pytest.mark.parametrize("n,q", [(2, 5), (3, 3), (4, 2), (4, 3)])
    def test_root_factorize_bijection(self, n, q):
        """Test root coordinates biject U_n(F_q) onto F_q^(n(n-1)/2)"""
        f = field_of_order(q)
        elements = enumerate_group("U", n, f)
        seen = set()
        for u in elements:
            coords = root_factorize(u)
            assert root_reconstruct(f, n, coords) == u
            seen.add(tuple(c.code for c in coords.values()))
        assert len(seen) == len(elements) == q ** (n * (n - 1) // 2)


class TestStructure:
    def test_nilpotence_of_u3(self, f2):
        u = subgroup_closure(enumerate_group("U", 3, f2))
        data = nilpotence_data(u)
        assert data.nilpotency_class == 2
        assert data.exponent == 4
        assert data.series_orders == (8, 2, 1)

    def test_center_and_abelianization(self, f2):
        u = subgroup_closure(enumerate_group("U", 3, f2))
        assert center(u).order == 2
        assert abelian_invariants(u) == (2, 2)

    def test_isomorphism(self, f2):
        x = elementary(f2, 3, 1, 2, 1)
        y = elementary(f2, 3, 2, 3, 1)
        z = elementary(f2, 3, 1, 3, 1)
        klein = subgroup_closure([x, z])
        cyclic4 = subgroup_closure([x * y])
        assert cyclic4.order == 4
        assert not are_isomorphic(klein, cyclic4)
        assert are_isomorphic(klein, subgroup_closure([y, z]))

    def test_evaluate_word(self, f3):
        g = elementary(f3, 2, 1, 2, 1)
        identity = g.identity(f3, 2)
        assert evaluate_word((1, 1, -1), [g], identity) == g
        with pytest.raises(ValueError):
            evaluate_word((2,), [g], identity)


class TestCensus:
    def test_census_u3_f2(self, f2):
        result = subgroup_census(3, f2, 2)
        assert result.class_count == 5
        assert sorted(fp[0] for fp, _ in result.classes) == [1, 2, 4, 4, 8]
        for _, rep in result.classes:
            data = nilpotence_data(rep)
            assert data.nilpotency_class <= 3
            assert data.exponent <= 8
        assert result.unresolved_collisions == 0
        assert result.to_dict()["unresolved_collisions"] == 0

    def test_census_counts_fingerprint_only_merges(self, f2):
        """Test collisions above the isomorphism limit are merged and counted"""
        result = subgroup_census(3, f2, 2, isomorphism_limit=0)
        # five subgroups of order 2 and two Klein four-groups share fingerprints
        assert result.distinct_subgroups == 10
        assert result.class_count == 5
        assert result.unresolved_collisions == 5
        assert result.to_dict()["unresolved_collisions"] == 5

    def test_word_set_for_c2(self, f2):
        result = word_set_discover(2, f2, 1)
        assert result.words == [(), (1,)]

    def test_word_set_verified_on_u3(self, f2):
        result = word_set_discover(3, f2, 2)
        assert result.tuples_checked == 64
        assert () in result.words

    def test_census_cap(self, f2):
        with pytest.raises(CapExceededError):
            subgroup_census(3, f2, 2, cap=10)


class TestFlags:
    def test_flag_to_standard(self, f3):
        lines = [Subspace.span(f3, 3, [v]) for v in ([1, 2, 0], [0, 1, 1])]
        plane = lines[0] + lines[1]
        fl = Flag([lines[0], plane])
        g = flag_to_standard(fl)
        assert g.act(lines[0]) == standard_subspace(f3, 3, 1)
        assert g.act(plane) == standard_subspace(f3, 3, 2)

    def test_incomplete_flag(self, f2):
        fl = Flag([Subspace.span(f2, 3, [[1, 0, 0]])])
        with pytest.raises(ValueError):
            flag_to_standard(fl)

    def test_line_stabilizer_is_borel(self, f2):
        std = standard_subspace(f2, 2, 1)
        stabilizer = [g for g in enumerate_group("GL", 2, f2) if g.act(std) == std]
        borel = set(enumerate_group("B", 2, f2))
        assert set(stabilizer) == borel
        assert diagonal_matrix(f2, [1, 1]).is_identity()
