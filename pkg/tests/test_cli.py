import json

import pytest

from config import Config
from main import main


def fan_file(name):
    return str(Config.FANS_DIR / f"{name}.fan")


def pot_file(name):
    return str(Config.POTENTIALS_DIR / f"{name}.pot")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out.strip().splitlines()


@pytest.mark.parametrize("name, line", [
    ('p2', "A = Z; deg = [1,1,1]; Gamma = [{1,2,3}]"),
    ('p1xp1', "A = Z^2; deg = [[1,0],[1,0],[0,1],[0,1]]; Gamma = [{1,2}, {3,4}]"),
    ('p112', "A = Z; deg = [1,1,2]; Gamma = [{1,2,3}]"),
])
def test_grade_fan(capsys, name, line):
    assert run(capsys, 'grade-fan', fan_file(name)) == (0, [line])


def test_mu_prints_bidegree(capsys):
    assert run(capsys, 'mu', pot_file('x2z'), '2', 'e1', 'e1') == (0, ["z1  [bidegree (-2, 2)]"])


def test_mu_with_unit_argument_vanishes(capsys):
    code, lines = run(capsys, 'mu', pot_file('x3z'), '3', 'e1', '1', 'e1')
    assert code == 0
    assert lines[0].startswith("0")


@pytest.mark.parametrize("argv", [
    ['mu', 'x3z', '1', 'e1'],
    ['mu', 'x3z', '3', 'e1', 'e1'],
])
def test_mu_argument_errors(capsys, argv):
    argv[1] = pot_file(argv[1])
    code, lines = run(capsys, *argv)
    assert code == 2 and lines == []


def test_verify_passes(capsys):
    code, lines = run(capsys, 'verify', pot_file('x3z'), 'stasheff', '--arity', '4')
    assert code == 0
    assert all(line.startswith("PASS") for line in lines)


def test_verify_regularity_failure(capsys):
    assert run(capsys, 'verify', pot_file('xx'), 'regularity') == (1, ["FAIL regularity: non-regular at (1, 1)"])


def test_verify_twisted_cochain(capsys):
    code, lines = run(capsys, 'verify', pot_file('x3z'), 'twisted-cochain', '--depth', '3')
    assert code == 0 and lines[0].startswith("PASS twisted-cochain")



def test_verify_adjunction(capsys):
    code, lines = run(capsys, 'verify', pot_file('x2z'), 'adjunction', '--depth', '2')
    assert code == 0
    assert "PASS unit k" in lines and "PASS unit S_W" in lines and "PASS counit k" in lines
    assert any(line.startswith("PASS adjoint-recovery") for line in lines)
    assert "(0, 0)  1 | 1" in lines


def test_verify_linfty_includes_quasi_isomorphism(capsys):
    code, lines = run(capsys, 'verify', pot_file('xyz'), 'linfty', '--arity', '3', '--depth', '3')
    assert code == 0
    assert any(line.startswith("PASS G1-quasi-isomorphism") for line in lines)


def test_ext_table(capsys):
    code, lines = run(capsys, 'ext', pot_file('x2z'), 'k', 'S_W', '--depth', '3', '--hom', '0', '3')
    assert code == 0
    assert lines[0] == "# k: H(F(N)) | Ext | diff"
    assert "(-1, 1)  1 | 1 | 0" in lines
    assert lines.count("PASS") == 2
    assert "# S_W: H(F(N)) | Ext | diff" in lines


def test_ext_report_saved(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr(Config, 'OUTPUT_DIR', tmp_path)
    monkeypatch.setattr(Config, 'REPORTS_DIR', tmp_path / 'reports')
    code, lines = run(capsys, 'ext', pot_file('x2z'), 'k', '--depth', '2', '--hom', '0', '2', '--save')
    assert code == 0
    saved = (tmp_path / 'reports' / 'ext_x2z.txt').read_text(encoding='utf-8')
    assert saved.splitlines() == lines


def test_cy_report(capsys):
    assert run(capsys, 'cy', fan_file('p4'), pot_file('quintic'), '--depth', '3') == (0, [
        "CY: true",
        "Gamma {1,2,3,4,5}: holds-in-window",
        "origin-support: holds-in-window",
    ])
    code, lines = run(capsys, 'cy', fan_file('p4'), pot_file('quartic'), '--depth', '3')
    assert code == 0
    assert lines[0] == "CY: false (sum beta - sum alpha = -1)"


def test_generators(capsys):
    code, lines = run(capsys, 'generators', fan_file('p2'), pot_file('cubic_p2'), 'sheaves')
    assert code == 0
    assert lines == ["Gamma {1,2,3}: Lambda(V/V_Gamma) = Lambda(e1,e2,e3) -> (Lambda(L_Gamma) (x) S_W, d_Kos)"]
    code, lines = run(capsys, 'generators', fan_file('p2'), pot_file('cubic_p2'), 'singularities')
    assert lines == ["k(a), a in A"]


def test_missing_file(capsys):
    assert main(['grade-fan', fan_file('nowhere')]) == 2
    assert "❌" in capsys.readouterr().err


def test_zero_denominator_is_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.pot"
    bad.write_text("variables: 1\nW1: 1/0*x1^2\n", encoding="utf-8")
    assert main(['mu', str(bad), '2', 'e1', 'e1']) == 2
    assert main(['mu', pot_file('x3z'), '2', '1/0*e1', 'e1']) == 2
    assert "❌" in capsys.readouterr().err


def test_bad_suite_is_usage_error(capsys):
    assert main(['verify', pot_file('x3z'), 'everything']) == 2


def test_status(capsys):
    code = main(['status'])
    assert code == 0
    assert 'caches' in json.loads(capsys.readouterr().out)
