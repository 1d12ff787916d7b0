import pytest

from services.errors import InputError
from services.grading import AbelianGroup, format_degree
from services.io_formats import (
    load_fan, parse_fan, parse_module, parse_potential, parse_sections, read_text, split_top_level,
)
from services.toric import grading_from_fan

P2 = """
# 射影平面
rank: 2
rays: [[1,0],[0,1],[-1,-1]]
max_cones: [[1,2],[2,3],[3,1]]
"""


def test_sections_keep_line_numbers():
    sections = parse_sections("a: 1\n\n# 注释\nb: x # 行尾注释\n")
    assert sections == {'a': (1, '1'), 'b': (4, 'x')}


def test_duplicate_key_reports_line():
    with pytest.raises(InputError, match="line 2"):
        parse_sections("rank: 2\nrank: 3\n")


def test_unknown_line_reports_line():
    with pytest.raises(InputError) as info:
        parse_sections("rank: 2\n[[1,0]]\n")
    assert info.value.line == 2


def test_split_top_level():
    assert split_top_level("(a, 0, 0), (b, [1,2], 1)") == ["(a, 0, 0)", "(b, [1,2], 1)"]
    assert split_top_level("") == []
    with pytest.raises(InputError):
        split_top_level("(a, b")


def test_parse_fan_converts_cones():
    f = parse_fan(P2, name='p2')
    assert f.max_cones == [(0, 1), (1, 2), (0, 2)]
    assert f.name == 'p2'


@pytest.mark.parametrize("text, line", [
    ("rank: two\nrays: [[1]]\nmax_cones: [[1]]\n", 1),
    ("rank: 1\nrays: [[1], [1.5]]\nmax_cones: [[1]]\n", 2),
    ("rank: 1\nrays: [[1],[-1]]\nmax_cones: [[0],[2]]\n", 3),
    ("rank: 2\nrays: [[1,0],[0,2],[-1,-2]]\nmax_cones: [[1,2],[2,3],[3,1]]\n", 2),
])
def test_fan_errors_carry_line(text, line):
    with pytest.raises(InputError) as info:
        parse_fan(text)
    assert info.value.line == line


def test_fan_missing_key():
    with pytest.raises(InputError, match="max_cones"):
        parse_fan("rank: 1\nrays: [[1],[-1]]\n")


def test_unsupported_extension(tmp_path):
    path = tmp_path / "p2.txt"
    path.write_text(P2, encoding='utf-8')
    with pytest.raises(InputError):
        read_text(path)
    with pytest.raises(InputError):
        read_text(tmp_path / "missing.fan")


def test_load_fan_uses_stem(tmp_path):
    path = tmp_path / "plane.fan"
    path.write_text(P2, encoding='utf-8')
    assert load_fan(path).name == 'plane'


def test_parse_potential_with_declared_degrees():
    pot = parse_potential("variables: 2\nW1: x1^3 + x2^6\ngroup: Z\ndegrees: 2, 1\nname: weighted\n")
    assert pot.name == 'weighted'
    assert [format_degree(a) for a in pot.alphas] == ['2', '1']
    assert [format_degree(b) for b in pot.betas] == ['6']


def test_potential_equation_numbers_must_be_contiguous():
    with pytest.raises(InputError) as info:
        parse_potential("variables: 1\nW1: x1^2\nW3: x1^3\n")
    assert info.value.line == 3


def test_potential_polynomial_errors_carry_line():
    with pytest.raises(InputError) as info:
        parse_potential("variables: 1\nW1: 0.5*x1^2\n")
    assert info.value.line == 2


def test_potential_degrees_need_group():
    with pytest.raises(InputError, match="group"):
        parse_potential("variables: 1\nW1: x1^2\ndegrees: 1\n")


def test_fan_degrees_cross_checked():
    _, alphas = grading_from_fan(parse_fan(P2))
    text = "variables: 3\nW1: x1^3 + x2^3 + x3^3\ngroup: Z\ndegrees: 1, 1, 2\n"
    with pytest.raises(InputError) as info:
        parse_potential(text, alphas=alphas)
    assert info.value.line == 4
    agreeing = text.replace("1, 1, 2", "1, 1, 1")
    assert parse_potential(agreeing, alphas=alphas).graded


def test_fan_degrees_compared_with_torsion():
    group = AbelianGroup(1, [2])
    text = "variables: 2\nW1: x1^2 + x2^2\ngroup: Z + Z/2\ndegrees: [1 | 1], [1 | 0]\n"
    with pytest.raises(InputError) as info:
        parse_potential(text, alphas=[group.element([1, 0]), group.element([1, 0])])
    assert info.value.line == 4
    assert parse_potential(text, alphas=[group.element([1, 1]), group.element([1, 0])]).graded


def test_parse_module(potential):
    pot = potential('x2z')
    m = parse_module("generators: [(g1, 0, 0), (g2, 1, 0)]\nrelations: [[x1, 0]]\nname: pair\n", pot)
    assert m.name == 'pair'
    assert [g[0] for g in m.generators] == ['g1', 'g2']
    assert len(m.relation_data) == 1


@pytest.mark.parametrize("text, line", [
    ("generators: [(g1, 0)]\n", 1),
    ("generators: [(g1, 0, x)]\n", 1),
    ("generators: [(g1, 0, 0)]\nrelations: [[x1, x1]]\n", 2),
    ("generators: [(g1, 0, 0), (g2, 0, 0)]\nrelations: [[x1, x1^2]]\n", 2),
])
def test_module_errors_carry_line(potential, text, line):
    with pytest.raises(InputError) as info:
        parse_module(text, potential('x2z'))
    assert info.value.line == line
