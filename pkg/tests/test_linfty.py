import pytest

from services.errors import InputError
from services.exact_algebra import UPolynomial
from services.linfty import (
    LElement, ResolutionElement, check_contraction, check_g1_quasi_isomorphism, check_linfty_morphism,
    contraction_F, contraction_H, g_k, l_k, linfty_identity_sides, resolution_differential,
)


def test_brackets_of_cubic(potential):
    pot = potential('x3z')
    assert l_k(pot, (0, 0, 0)) == LElement(2, {0: 6})
    assert l_k(pot, (0, 0)).is_zero()


def test_brackets_of_two_cubics(potential):
    pot = potential('x3z1_y3z2')
    assert l_k(pot, (1, 1, 1)) == LElement(2, {1: 6})
    assert l_k(pot, (0, 1, 1)).is_zero()


def test_bracket_needs_two_arguments(potential):
    with pytest.raises(InputError):
        l_k(potential('x3z'), (0,))


def test_l_element_degrees():
    with pytest.raises(InputError):
        LElement(3, {0: 1})


def test_resolution_element_rejects_constants_in_degree_one(potential):
    pot = potential('x2z')
    with pytest.raises(InputError):
        ResolutionElement(1, UPolynomial(1, 1, {((0,), 0): 1}))
    with pytest.raises(InputError):
        ResolutionElement(2, UPolynomial(1, 1), {0: 1})
    assert ResolutionElement.zero(pot, 2).is_zero()


def test_g_one_and_contraction(potential):
    pot = potential('x2z')
    g = g_k(pot, (0,))
    assert g.vec == {0: 1}
    assert contraction_F(pot, g) == LElement(1, {0: 1})
    assert contraction_H(pot, g).is_zero()
    assert resolution_differential(pot, g).is_zero()


def test_g_rejects_mixed_arguments(potential):
    with pytest.raises(InputError):
        g_k(potential('x2z'), (0,), u_index=0)


@pytest.mark.parametrize("name", ['x2z', 'x3z', 'x4z', 'quadric', 'x3z1_y3z2', 'xyz'])
def test_morphism_identity(potential, name):
    result = check_linfty_morphism(potential(name), arity=4, samples=5)
    assert result['passed'], result['counterexample']


def test_identity_sides_for_cubic(potential):
    lhs, rhs = linfty_identity_sides(potential('x3z'), (0, 0, 0))
    assert lhs == rhs


def test_identity_sides_on_xyz(potential):
    pot = potential('xyz')
    lhs, rhs = linfty_identity_sides(pot, (0, 1, 2))
    assert lhs == rhs == ResolutionElement(2, UPolynomial(3, 1, {((0, 0, 0), 0): 1}))


def test_g_one_uses_corrected_derivative(potential):
    g = g_k(potential('x3z'), (0,))
    assert g.poly == UPolynomial(1, 1, {((2,), 0): 1})


@pytest.mark.parametrize("name", ['x2z', 'x3z', 'xyz', 'x3z1_y3z2'])
def test_g_one_is_quasi_isomorphism(potential, name):
    pot = potential(name)
    result = check_g1_quasi_isomorphism(pot, degree=3)
    assert result['passed'], result['counterexample']
    assert result['cohomology'] == (pot.n, pot.m)


def test_g_one_window_must_be_nonnegative(potential):
    with pytest.raises(InputError):
        check_g1_quasi_isomorphism(potential('x3z'), degree=-1)


@pytest.mark.parametrize("name", ['x3z', 'xyz'])
def test_contraction_side_conditions(potential, name):
    result = check_contraction(potential(name), samples=5)
    assert result['passed'], result['failures']


def test_linear_terms_rejected(potential):
    with pytest.raises(InputError):
        check_linfty_morphism(potential('xx'))
