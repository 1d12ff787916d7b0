from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.errors import InputError
from services.exact_algebra import (
    Polynomial, UPolynomial, corrected_derivative, diff_apply, enumerate_exponents,
    format_polynomial, pairing, pairing_combinatorial, parse_polynomial, to_scalar,
)

exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))
coefficients = st.integers(-5, 5)


def polys(space):
    return st.dictionaries(exponents, coefficients, max_size=5).map(lambda d: Polynomial(space, 2, d))


def test_parse_and_format():
    p = parse_polynomial("3*x1^2*x2 - 1/2*x3^5", 'V*', 3)
    assert p.terms == {(2, 1, 0): Fraction(3), (0, 0, 5): Fraction(-1, 2)}
    assert format_polynomial(p) == "3*x1^2*x2 - 1/2*x3^5"


def test_parse_merges_like_terms():
    p = parse_polynomial("x1*x2 + 2*x2*x1 - 3*x1*x2", 'V*', 2)
    assert p.is_zero()
    assert str(p) == '0'


@pytest.mark.parametrize("text", ["1.5*x1", "x1 + 0.25", "x1^2 + .5*x2"])
def test_float_literals_rejected(text):
    with pytest.raises(InputError):
        parse_polynomial(text, 'V*', 2)


def test_float_scalar_rejected():
    with pytest.raises(InputError):
        to_scalar(0.5)
    assert to_scalar("-3/4") == Fraction(-3, 4)


def test_variable_outside_space():
    with pytest.raises(InputError):
        parse_polynomial("e1*x1", 'V*', 2)
    with pytest.raises(InputError):
        parse_polynomial("x3", 'V*', 2)


def test_space_mismatch():
    a = Polynomial.variable('V*', 2, 0)
    b = Polynomial.variable('V', 2, 0)
    with pytest.raises(InputError):
        a + b
    with pytest.raises(InputError):
        diff_apply(a, a)


def test_enumerate_exponents_counts():
    assert len(enumerate_exponents(3, 2)) == 6
    assert enumerate_exponents(2, 0) == [(0, 0)]
    assert enumerate_exponents(0, 1) == []


def test_derivative_of_power():
    e1 = Polynomial.variable('V', 1, 0)
    x = parse_polynomial("x1^3", 'V*', 1)
    assert diff_apply(e1, x) == parse_polynomial("3*x1^2", 'V*', 1)
    assert pairing(Polynomial.monomial('V', (2,)), parse_polynomial("x1^2", 'V*', 1)) == 2


@given(polys('V'), polys('V*'))
def test_pairing_matches_combinatorial_formula(f, g):
    assert pairing(f, g) == pairing_combinatorial(f, g)


@given(polys('V*'), polys('V*'), st.integers(0, 1))
def test_leibniz_rule(f, g, i):
    d = Polynomial.variable('V', 2, i)
    assert diff_apply(d, f * g) == diff_apply(d, f) * g + f * diff_apply(d, g)


@given(polys('V*'))
@settings(max_examples=50)
def test_corrected_derivative_euler_identity(f):
    total = Polynomial.zero('V*', 2)
    for i in range(2):
        total = total + Polynomial.variable('V*', 2, i) * corrected_derivative(i, f)
    assert total == f.without_constant()


def test_corrected_derivative_kills_constants():
    one = Polynomial.one('V*', 2)
    assert corrected_derivative(0, one).is_zero()
    with pytest.raises(InputError):
        corrected_derivative(5, one)


def test_upolynomial_parts():
    w = UPolynomial.from_components([parse_polynomial("x1^2 + x1^3", 'V*', 1), parse_polynomial("x1", 'V*', 1)])
    assert w.max_degree() == 3
    assert w.quadratic_part() == UPolynomial(1, 2, {((2,), 0): 1, ((1,), 1): 1})
    assert w.overline() == w
    assert w.component(1) == parse_polynomial("x1", 'V*', 1)
    assert str(w) == "x1^2*z1 + x1^3*z1 + x1*z2"


@pytest.mark.parametrize("text", ["1/0*x1", "x1 - 3/0*x2"])
def test_zero_denominator_rejected(text):
    with pytest.raises(InputError):
        parse_polynomial(text, 'V*', 2)
    with pytest.raises(InputError):
        to_scalar("5/0")
