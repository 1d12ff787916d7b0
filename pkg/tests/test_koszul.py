from fractions import Fraction

import pytest

from services.errors import InputError
from services.exact_algebra import Polynomial, parse_polynomial
from services.koszul import (
    Potential, QuotientComponent, check_adjointness, check_pairing_dimensions,
    check_regular_sequence, coalgebra_element, cw_basis, delta_B, delta_C, dual_bases, koszul_element,
    koszul_homology, pairing_BC, sw_basis,
)


def degree(pot, value):
    return pot.group.element([value])


def test_standard_grading_from_homogeneous_components(potential):
    pot = potential('x3z1_y3z2')
    assert pot.graded
    assert [b.coords for b in pot.betas] == [(3,), (3,)]
    assert not pot.has_linear


def test_constant_term_rejected():
    with pytest.raises(InputError):
        Potential([parse_polynomial("x1^2 + 1", 'V*', 1)])


def test_inhomogeneous_potential_is_ungraded():
    pot = Potential([parse_polynomial("x1^2 + x1^3", 'V*', 1)])
    assert not pot.graded
    with pytest.raises(InputError):
        pot.require_graded()


def test_local_algebra_components(potential):
    pot = potential('x2z')
    assert sw_basis(pot, degree(pot, 0)) == [(0,)]
    assert sw_basis(pot, degree(pot, 1)) == [(1,)]
    assert sw_basis(pot, degree(pot, 2)) == []
    assert cw_basis(pot, degree(pot, -1)) == [Polynomial.variable('V', 1, 0)]
    assert cw_basis(pot, degree(pot, -2)) == []


def test_quotient_reduction_uses_relations(potential):
    pot = potential('quadric')
    comp = QuotientComponent(pot, degree(pot, 2))
    assert comp.dimension == 2
    assert comp.basis == [(2, 0), (1, 1)]
    assert comp.reduce(parse_polynomial("x2^2", 'V*', 2)) == [Fraction(-1), Fraction(0)]
    with pytest.raises(InputError):
        comp.reduce(parse_polynomial("x1", 'V*', 2))


@pytest.mark.parametrize("name", ['x2z', 'x3z', 'quadric', 'x3z1_y3z2'])
def test_pairing_dimensions(potential, name):
    assert check_pairing_dimensions(potential(name), depth=4)['passed']


def test_dual_bases_are_dual(potential):
    pot = potential('x3z')
    xs, ys = dual_bases(pot, degree(pot, 2))
    assert xs == [(2,)]
    assert ys == [Polynomial('V', 1, {(2,): Fraction(1, 2)})]


@pytest.mark.parametrize("name", ['x3z', 'x3z1_y3z2'])
def test_adjointness(potential, name):
    assert check_adjointness(potential(name), depth=2)['passed']


def test_koszul_differential_squares_to_zero(potential):
    pot = potential('x3z1_y3z2')
    top = koszul_element(pot, {((1, 0), (0, 1)): 1})
    assert delta_B(pot, delta_B(pot, top)).is_zero()


def test_adjointness_on_sample_pair(potential):
    pot = potential('x3z')
    b = koszul_element(pot, {((0,), (0,)): 1})
    c = coalgebra_element(pot, {((3,), ()): 1})
    assert pairing_BC(delta_B(pot, b), c) == pairing_BC(b, delta_C(pot, c)) == 6


def test_regular_sequences(potential):
    for name in ('x2z', 'x3z1_y3z2', 'quadric'):
        assert check_regular_sequence(potential(name))['verdict'] == 'consistent-with-regular'


def test_non_regular_sequence_has_witness(potential):
    pot = potential('xx')
    result = check_regular_sequence(pot)
    assert result['verdict'] == 'non-regular'
    assert result['witness'] is not None
    assert koszul_homology(pot, 1, degree(pot, 1)) == 1
