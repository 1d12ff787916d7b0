import pytest
from hypothesis import given
from hypothesis import strategies as st

from services.errors import InputError
from services.grading import (
    PROVED_IN, PROVED_OUT, AbelianGroup, Bidegree, check_positive_cone, cokernel,
    format_degree, monomials_of_degree, parse_degree, parse_group, semigroup_window_check,
    weight, weight_functional,
)

Z = AbelianGroup(1)
Z2 = AbelianGroup(2)


def test_cokernel_of_two_is_z_mod_two():
    group, project = cokernel([[2]])
    assert group.rank == 0 and group.torsion == (2,)
    assert project([1]) != group.zero()
    assert project([2]) == group.zero()


def test_cokernel_diagonal_merges_torsion():
    group, _ = cokernel([[2, 0], [0, 3]])
    assert str(group) == 'Z/6'


def test_cokernel_without_relations_is_free():
    group, project = cokernel([], 2)
    assert group.rank == 2 and not group.torsion
    assert project([1, 0]) != project([0, 1])


def test_cokernel_identifies_related_units():
    group, project = cokernel([[1, -1, 0]])
    assert group.rank == 2
    assert project([1, 0, 0]) == project([0, 1, 0])


@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
       st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_cokernel_kills_relation_span(r1, r2):
    group, project = cokernel([r1, r2], 3)
    combo = [a + 2 * b for a, b in zip(r1, r2)]
    assert project(combo).is_zero()
    assert group.rank >= 1


def test_torsion_normalization():
    g = AbelianGroup(1, (3,))
    assert g.element([2, 5]) == g.element([2, 2])
    assert format_degree(g.element([2, 5])) == '[2 | 2]'


def test_degree_group_mismatch():
    with pytest.raises(InputError):
        Z.element([1]) + Z2.element([1, 0])


@pytest.mark.parametrize("text, rank, torsion", [
    ('Z', 1, ()), ('Z^2', 2, ()), ('Z + Z/2', 1, (2,)), ('0', 0, ()), ('Z/4 + Z/2', 0, (2, 4)),
])
def test_parse_group(text, rank, torsion):
    g = parse_group(text)
    assert (g.rank, g.torsion) == (rank, torsion)


def test_parse_degree_forms():
    assert parse_degree('3', Z) == Z.element([3])
    assert parse_degree('[1,-2]', Z2) == Z2.element([1, -2])
    with pytest.raises(InputError):
        parse_degree('3', Z2)
    with pytest.raises(InputError):
        parse_degree('[1]', Z2)


def test_weight_functional_is_positive():
    alphas = [Z2.element([1, 0]), Z2.element([0, 1]), Z2.element([1, 1])]
    w = weight_functional(alphas)
    assert all(weight(a, w) > 0 for a in alphas)


def test_weight_functional_rejects_opposite_degrees():
    with pytest.raises(InputError):
        weight_functional([Z.element([1]), Z.element([-1])])


def test_monomials_of_degree_weighted():
    alphas = [Z.element([1]), Z.element([1]), Z.element([2])]
    found = monomials_of_degree(alphas, Z.element([2]))
    assert found == [(0, 0, 1), (2, 0, 0), (1, 1, 0), (0, 2, 0)]


def test_semigroup_membership():
    alphas = [Z.element([1])]
    inside = semigroup_window_check(Bidegree(Z.element([-2]), 1), alphas)
    assert inside['member'] and inside['tag'] == PROVED_IN
    outside = semigroup_window_check(Bidegree(Z.element([1]), 1), alphas)
    assert not outside['member'] and outside['tag'] == PROVED_OUT
    assert semigroup_window_check(Bidegree(Z.element([0]), -1), alphas)['tag'] == PROVED_OUT


def test_positive_cone():
    assert check_positive_cone([Z.element([1]), Z.element([2])])
    assert not check_positive_cone([Z.element([1]), Z.element([-1])])
