import pytest

from services.errors import InputError
from services.grading import format_degree
from services.toric import (
    FAILS, HOLDS, Fan, check_exact_sequence, check_minimality, compare_exterior_koszul, cy_check,
    format_gamma, grading_from_fan, irrelevant_components, irrelevant_monomials, origin_support,
    thick_subcategory_generators, v_gamma,
)

P2_RAYS = [[1, 0], [0, 1], [-1, -1]]


@pytest.mark.parametrize("name, group, degrees, gammas", [
    ('p2', 'Z', ['1', '1', '1'], [(0, 1, 2)]),
    ('p1xp1', 'Z^2', ['[1,0]', '[1,0]', '[0,1]', '[0,1]'], [(0, 1), (2, 3)]),
    ('p112', 'Z', ['1', '1', '2'], [(0, 1, 2)]),
    ('p4', 'Z', ['1'] * 5, [(0, 1, 2, 3, 4)]),
    ('p1', 'Z', ['1', '1'], [(0, 1)]),
])
def test_grading_from_fan(fan, name, group, degrees, gammas):
    f = fan(name)
    a, alphas = grading_from_fan(f)
    assert str(a) == group
    assert [format_degree(d) for d in alphas] == degrees
    assert check_exact_sequence(f, alphas)
    assert irrelevant_components(f) == gammas
    assert all(check_minimality(f, g) for g in gammas)


def test_exact_sequence_detects_wrong_degrees(fan):
    f = fan('p2')
    _, alphas = grading_from_fan(f)
    assert not check_exact_sequence(f, [alphas[0], alphas[1], alphas[2] + alphas[2]])


def test_minimality_rejects_larger_sets(fan):
    f = fan('p1xp1')
    assert not check_minimality(f, (0, 1, 2))
    assert not check_minimality(f, (0, 2))


def test_irrelevant_monomials(fan):
    assert irrelevant_monomials(fan('p2')) == [(0, 0, 1), (1, 0, 0), (0, 1, 0)]


def test_format_gamma():
    assert format_gamma((0, 1, 2)) == '{1,2,3}'
    assert format_gamma((2, 3)) == '{3,4}'


def test_cones_are_zero_based(fan):
    assert fan('p2').max_cones == [(0, 1), (1, 2), (0, 2)]
    assert fan('p2').nrays == 3


def test_non_primitive_ray_is_named():
    with pytest.raises(InputError, match="ρ2 = \\[0, 2\\] 不是本原向量"):
        Fan(2, [[1, 0], [0, 2], [-1, -2]], [[0, 1], [1, 2], [2, 0]])


@pytest.mark.parametrize("rank, rays, cones", [
    (1, [[1], [0]], [[0], [1]]),                 # 零射线
    (1, [[1], [-1]], [[0], [0, 1]]),             # 互相包含的锥
    (2, P2_RAYS, [[0, 1]]),                      # 射线 3 未被覆盖
    (2, [[1, 0], [-1, 0]], [[0], [1]]),          # 不张成
    (2, [[1, 0], [1]], [[0, 1]]),                # 长度不一
    (2, P2_RAYS, [[0, 5]]),                      # 不存在的射线
])
def test_invalid_fans(rank, rays, cones):
    with pytest.raises(InputError):
        Fan(rank, rays, cones)


def test_gamma_enumeration_is_capped(monkeypatch, fan):
    from config import Config
    monkeypatch.setattr(Config, 'GAMMA_RAY_CAP', 2)
    with pytest.raises(InputError):
        irrelevant_components(fan('p2'))


def _fan_potential(fan, potential, fan_name, pot_name):
    _, alphas = grading_from_fan(fan(fan_name))
    return potential(pot_name, alphas)


def test_calabi_yau_quintic(fan, potential):
    pot = _fan_potential(fan, potential, 'p4', 'quintic')
    result = cy_check(pot.alphas, pot.betas)
    assert result['holds'] and result['witness'] is None
    origin = origin_support(pot, irrelevant_components(fan('p4')), depth=3)
    assert origin['verdict'] == HOLDS


def test_calabi_yau_fails_for_quartic(fan, potential):
    pot = _fan_potential(fan, potential, 'p4', 'quartic')
    result = cy_check(pot.alphas, pot.betas)
    assert not result['holds']
    assert format_degree(result['witness']) == '-1'


def test_bidegree_two_two_on_p1xp1(fan, potential):
    pot = _fan_potential(fan, potential, 'p1xp1', 'bidegree22')
    assert cy_check(pot.alphas, pot.betas)['holds']
    origin = origin_support(pot, irrelevant_components(fan('p1xp1')), depth=3)
    assert origin['verdict'] == FAILS
    assert all(tag == FAILS for _, tag in origin['strata'])


def test_cy_check_needs_degrees():
    with pytest.raises(InputError):
        cy_check([], [])


def test_exterior_module_matches_koszul_complex(potential):
    result = compare_exterior_koszul(potential('x2z'), (0,), depth=3)
    assert result['passed'], result['counterexample']


def test_exterior_module_on_plane_cubic(fan, potential):
    pot = _fan_potential(fan, potential, 'p2', 'cubic_p2')
    result = compare_exterior_koszul(pot, (0, 1, 2), depth=2)
    assert result['passed'], result['counterexample']


def test_generators_in_sheaves_mode(fan, potential):
    pot = _fan_potential(fan, potential, 'p2', 'cubic_p2')
    report = thick_subcategory_generators(fan('p2'), pot, check_origin=True, depth=3)
    assert report['mode'] == 'sheaves'
    [entry] = report['generators']
    assert entry['gamma'] == (0, 1, 2)
    assert entry['quotient_basis'] == ['e1', 'e2', 'e3']
    assert report['origin']['verdict'] == HOLDS


def test_generators_in_singularity_mode(fan, potential):
    pot = _fan_potential(fan, potential, 'p2', 'cubic_p2')
    report = thick_subcategory_generators(fan('p2'), pot, mode='singularities')
    assert report['generators'] == [{'module': 'k', 'shifts': 'A'}]
    assert 'origin' not in report


def test_unknown_generator_mode(fan, potential):
    with pytest.raises(InputError):
        thick_subcategory_generators(fan('p2'), potential('cubic_p2'), mode='both')


@pytest.mark.parametrize("gamma", [(0, 1), (2, 3)])
def test_exterior_module_on_p1xp1(fan, potential, gamma):
    pot = _fan_potential(fan, potential, 'p1xp1', 'bidegree22')
    result = compare_exterior_koszul(pot, gamma, depth=2)
    assert result['passed'], result['counterexample']


def test_generator_counts(fan, potential):
    pot = _fan_potential(fan, potential, 'p1xp1', 'bidegree22')
    report = thick_subcategory_generators(fan('p1xp1'), pot)
    assert [g['gamma'] for g in report['generators']] == [(0, 1), (2, 3)]
    assert [g['quotient_basis'] for g in report['generators']] == [['e1', 'e2'], ['e3', 'e4']]
    quintic = _fan_potential(fan, potential, 'p4', 'quintic')
    [entry] = thick_subcategory_generators(fan('p4'), quintic)['generators']
    assert entry['quotient_basis'] == ['e1', 'e2', 'e3', 'e4', 'e5']


def test_v_gamma_annihilates_l_gamma(potential):
    pot = potential('bidegree22')
    assert [list(v.terms) for v in v_gamma(pot, (0, 1))] == [[(0, 0, 1, 0)], [(0, 0, 0, 1)]]
