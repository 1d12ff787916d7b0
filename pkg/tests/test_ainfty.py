from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import Config
from services.ainfty import (
    F_sym, H_sym, UNIT, ainfty_service, brace_generator, check_associativity, check_evaluators_agree,
    check_homotopy_identity, check_multilinearity,
    check_products_on_vectors, check_stasheff, ew_generator, format_element, mixed_pool, mu, mu_bidegree,
    mu_trees, parse_ew_element, pbw_product, stasheff_residual,
)
from services.errors import InputError
from services.io_formats import load_potential
from services.resource_optimizer import resource_optimizer

Z_ONE = {((), (('u', 0),)): Fraction(1)}
E1 = ew_generator('g', 0)
E2 = ew_generator('g', 1)
ONE = {UNIT: Fraction(1)}
E1_WORD = ((('g', 0),), ())

TWO_CUBICS = load_potential(Config.POTENTIALS_DIR / 'x3z1_y3z2.pot')


def test_parse_literal(potential):
    pot = potential('x3z1_y3z2')
    element = parse_ew_element("e1*e2*z1^2 - 1/2*z2", pot)
    assert element == {
        ((('g', 0), ('g', 1)), (('u', 0), ('u', 0))): Fraction(1),
        ((), (('u', 1),)): Fraction(-1, 2),
    }
    assert format_element(element) == "-1/2*z2 + e1*e2*z1^2"
    assert parse_ew_element("e2*e1", pot) == {((('g', 0), ('g', 1)), ()): Fraction(-1)}
    assert parse_ew_element("e1*e1", pot) == {}


@pytest.mark.parametrize("text", ["z3", "e3", "x1*e1"])
def test_parse_rejects_foreign_variables(potential, text):
    with pytest.raises(InputError):
        parse_ew_element(text, potential('x3z1_y3z2'))


def test_clifford_square(potential):
    assert pbw_product(potential('x2z'), E1, E1) == Z_ONE
    assert mu(potential('x2z'), [E1, E1]) == Z_ONE


def test_clifford_anticommutation(potential):
    pot = potential('quadric')
    total = {}
    for a, b in ((E1, E2), (E2, E1)):
        for w, c in pbw_product(pot, a, b).items():
            total[w] = total.get(w, Fraction(0)) + c
    assert not any(total.values())


def test_cubic_triple_product(potential):
    pot = potential('x3z')
    assert mu(pot, [E1, E1, E1]) == Z_ONE
    assert mu_bidegree(pot, [E1, E1, E1]).hom == 2
    assert mu_bidegree(pot, [E1, E1, E1]).degree == pot.group.element([-3])


def test_quartic_products(potential):
    pot = potential('x4z')
    assert mu(pot, [E1] * 3) == {}
    assert mu(pot, [E1] * 4) == Z_ONE


def test_quadratic_potential_has_no_higher_products(potential):
    pot = potential('x2z')
    assert mu(pot, [E1] * 3) == {}
    assert mu(pot, [E1] * 4) == {}


def test_strict_unitality(potential):
    pot = potential('x3z')
    assert mu(pot, [E1, ONE, E1]) == {}
    assert mu(pot, [ONE, E1, E1, E1]) == {}


def test_arity_below_two(potential):
    with pytest.raises(InputError):
        mu(potential('x3z'), [E1])


def test_linear_terms_rejected(potential):
    with pytest.raises(InputError):
        mu(potential('xx'), [E1, E1])


@pytest.mark.parametrize("name", ['x2z', 'x3z', 'x4z', 'quadric', 'xyz', 'x3z1_y3z2'])
def test_products_on_vectors_match_brackets(potential, name):
    result = check_products_on_vectors(potential(name), arity=5)
    assert result['passed'], result['failures']


@pytest.mark.parametrize("name, arity", [
    ('x3z', 5), ('x4z', 5), ('x2z_x3z', 4), ('xyz', 5), ('x3z1_y3z2', 5),
])
def test_stasheff_identities(potential, name, arity):
    result = check_stasheff(potential(name), arity=arity, samples=10)
    assert result['passed'], result['counterexample']


def test_stasheff_residual_on_cubic_vectors(potential):
    pot = potential('x3z')
    word = ((('g', 0),), ())
    assert stasheff_residual(pot, [word] * 4) == {}


@pytest.mark.parametrize("name", ['xyz', 'x3z1_y3z2'])
def test_stasheff_on_mixed_arguments(potential, name):
    pot = potential(name)
    result = check_stasheff(pot, arity=4, samples=100, pool=mixed_pool(pot))
    assert result['passed'], result['counterexample']
    assert result['checked'] >= 100


def test_mixed_variable_products():
    e1e2 = parse_ew_element("e1*e2", TWO_CUBICS)
    assert mu(TWO_CUBICS, [E1, E1, e1e2]) == {((('g', 1),), (('u', 0),)): Fraction(1)}
    assert mu_trees(TWO_CUBICS, [E1, E1, e1e2]) == mu(TWO_CUBICS, [E1, E1, e1e2])


def test_products_on_xyz(potential):
    pot = potential('xyz')
    e3 = ew_generator('g', 2)
    assert mu(pot, [E1, E2, e3]) == {((), (('u', 0),)): Fraction(1, 6)}
    assert mu(pot, [E1, E1, parse_ew_element("e2*e3", pot)]) == {}
    assert mu(pot, [E1, parse_ew_element("e1*e2", pot), e3]) == {((('g', 0),), (('u', 0),)): Fraction(-1, 6)}
    e = [((('g', i),), ()) for i in range(3)]
    assert stasheff_residual(pot, [e[0], e[0], e[1], e[2]]) == {}
    assert stasheff_residual(pot, [e[0], ((('g', 0), ('g', 1)), ()), e[2]]) == {}


def test_tree_evaluator_agrees(potential):
    pot = potential('x4z')
    assert mu_trees(pot, [E1] * 4) == mu(pot, [E1] * 4)
    assert check_evaluators_agree(pot, arity=4, samples=5)['passed']


@pytest.mark.parametrize("name, arity", [('x4z', 5), ('xyz', 4)])
def test_evaluators_agree_on_many_calls(potential, name, arity):
    result = check_evaluators_agree(potential(name), arity=arity, samples=200)
    assert result['passed'], result['counterexample']
    assert result['checked'] == 200


def test_associativity_and_multilinearity(potential):
    assert check_associativity(potential('quadric'), samples=10)['passed']
    assert check_multilinearity(potential('x3z'), samples=5)['passed']


def test_series_cache_records_work(potential):
    pot = potential('x4z')
    mu(pot, [E1] * 4)
    assert ainfty_service.stats['series_misses'] > 0


def test_memo_caches_are_capped(potential, monkeypatch):
    monkeypatch.setattr(resource_optimizer, 'memo_limit', 2)
    ainfty_service.clear()
    pots = [potential(name) for name in ('x2z', 'x3z', 'x4z')]
    for pot in pots:
        ainfty_service.structures(pot)
    assert len(ainfty_service._structures) == 2
    assert mu(pots[2], [E1] * 4) == Z_ONE
    assert mu_trees(pots[2], [E1] * 4) == Z_ONE
    sizes = resource_optimizer.cache_sizes()
    assert sizes['ainfty.series'] <= 2 and sizes['ainfty.trees'] <= 2
    assert len(ainfty_service._structures) == 2
    ainfty_service.clear()


@given(st.lists(st.sampled_from(mixed_pool(TWO_CUBICS)), min_size=3, max_size=3))
@settings(max_examples=25, deadline=None)
def test_pbw_product_is_associative(words):
    a, b, c = ({w: Fraction(1)} for w in words)
    left = pbw_product(TWO_CUBICS, pbw_product(TWO_CUBICS, a, b), c)
    right = pbw_product(TWO_CUBICS, a, pbw_product(TWO_CUBICS, b, c))
    assert left == right


BRACKET_X = ((), (('b', ((1,), 0)),))
BRACE_X = ((('s', ((1,), 0)),), ())
BRACE_XX_BRACKET_X = ((('s', ((2,), 0)),), (('b', ((1,), 0)),))


def test_symmetric_contraction_identities():
    words = [BRACKET_X, BRACE_X, BRACE_XX_BRACKET_X, ((('g', 0),), (('u', 0),))]
    result = check_homotopy_identity(words)
    assert result['passed'], result['failures']
    assert H_sym({BRACKET_X: Fraction(1)}) == {BRACE_X: Fraction(-1)}
    assert F_sym({BRACKET_X: Fraction(1), E1_WORD: Fraction(2)}) == {E1_WORD: Fraction(2)}


def test_brace_needs_positive_degree():
    assert brace_generator((1,), 0) == ('s', ((1,), 0))
    with pytest.raises(InputError):
        brace_generator((0,), 0)


def test_component_maps_on_single_words(potential):
    pot = potential('x3z')
    assert ainfty_service.component_maps(pot, {(E1_WORD,): Fraction(1)}) == ({E1_WORD: Fraction(1)}, {})
    assert ainfty_service.component_maps(pot, {(BRACKET_X,): Fraction(1)}) == ({}, {BRACE_X: Fraction(-1)})


def test_pbw_defect(potential):
    envelope = ainfty_service.structures(potential('x3z'))[1]
    brace = {BRACE_X: Fraction(1)}
    assert envelope.delta_u(brace, Z_ONE) == {}
    assert envelope.delta_u({E1_WORD: Fraction(1)}, brace) == {((), (('u', 0),)): Fraction(1, 2)}
