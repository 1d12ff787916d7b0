"""
E_W 计算器命令行入口

    python main.py grade-fan data/fans/p2.fan
    python main.py mu data/potentials/x3z.pot 3 e1 e1 e1
    python main.py verify data/potentials/x4z.pot stasheff --arity 4
    python main.py ext data/potentials/x2z.pot k --depth 4
    python main.py cy data/fans/p4.fan data/potentials/quintic.pot
    python main.py generators data/fans/p2.fan data/potentials/cubic_p2.pot sheaves
    python main.py status

结果写 stdout，进度写 stderr（--verbose 时）。退出码：0 成功，1 校验失败，2 输入错误。
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from config import Config
from services import ainfty, bgg, koszul, linfty, toric
from services.console import error, status
from services.errors import EWError, InputError, VerificationFailure, WindowError
from services.grading import Bidegree, format_degree
from services.io_formats import load_fan, load_module, load_potential
from services.resource_optimizer import resource_optimizer

VERIFY_SUITES = ('stasheff', 'linfty', 'twisted-cochain', 'adjunction', 'regularity', 'koszul')


def format_bidegree(bideg: Bidegree) -> str:
    return f"({format_degree(bideg.degree)}, {bideg.hom})"


def _verdict(name: str, result: Dict) -> bool:
    if result['passed']:
        checked = result.get('checked')
        print(f"PASS {name}" + (f" ({checked} checked)" if checked is not None else ''))
        return True
    print(f"FAIL {name}: {result.get('counterexample') or result.get('failures')}")
    return False


# ---- 子命令 ----

def cmd_grade_fan(args) -> int:
    fan = load_fan(args.fan)
    group, degrees = toric.grading_from_fan(fan)
    if not toric.check_exact_sequence(fan, degrees):
        raise VerificationFailure("除子序列 M → ℤ^{Σ(1)} → A 不正合")
    gammas = toric.irrelevant_components(fan)
    deg_text = ','.join(format_degree(d) for d in degrees)
    gamma_text = ', '.join(toric.format_gamma(g) for g in gammas)
    print(f"A = {group}; deg = [{deg_text}]; Gamma = [{gamma_text}]")
    return Config.EXIT_CODES['ok']


def cmd_mu(args) -> int:
    pot = load_potential(args.potential)
    if args.arity < 2:
        raise InputError(f"元数必须至少为 2: {args.arity}")
    if len(args.elements) != args.arity:
        raise InputError(f"给出了 {len(args.elements)} 个参数，元数为 {args.arity}")
    elements = [ainfty.parse_ew_element(text, pot) for text in args.elements]
    value = ainfty.mu(pot, elements)
    line = ainfty.format_element(value)
    if pot.graded:
        bideg = ainfty.mu_bidegree(pot, elements)
        if bideg is not None:
            line += f"  [bidegree {format_bidegree(bideg)}]"
    print(line)
    return Config.EXIT_CODES['ok']


def cmd_verify(args) -> int:
    pot = load_potential(args.potential)
    suite = args.suite
    passed = True
    if suite == 'stasheff':
        passed &= _verdict('stasheff', ainfty.check_stasheff(pot, arity=args.arity))
        passed &= _verdict('strict-unitality / l_n', ainfty.check_products_on_vectors(pot, arity=min(args.arity, 5)))
        passed &= _verdict('multilinearity', ainfty.check_multilinearity(pot))
        passed &= _verdict('tree-evaluator', ainfty.check_evaluators_agree(pot, arity=args.arity))
    elif suite == 'linfty':
        passed &= _verdict('linfty', linfty.check_linfty_morphism(pot, arity=args.arity))
        passed &= _verdict('contraction', linfty.check_contraction(pot))
        passed &= _verdict('G1-quasi-isomorphism', linfty.check_g1_quasi_isomorphism(pot, degree=args.depth))
    elif suite == 'twisted-cochain':
        passed &= _verdict('twisted-cochain', bgg.verify_twisted_cochain(pot, depth=args.depth))
    elif suite == 'adjunction':
        depth = min(args.depth, 3)
        for module in (bgg.trivial_module(pot), bgg.free_module(pot)):
            result = bgg.adjunction_check(module, depth)
            print('\n'.join(bgg.format_cohomology_table(result['table'])))
            passed &= _verdict(f"unit {module.name}", result)
        passed &= _verdict('counit k', bgg.adjunction_check(bgg.TrivialModule(pot), depth))
        passed &= _verdict('adjoint-recovery', bgg.adjoint_recovery(pot, depth))
    elif suite == 'regularity':
        result = koszul.check_regular_sequence(pot)
        if result['witness'] is None:
            print(f"PASS regularity: {result['verdict']}")
        else:
            passed = False
            print(f"FAIL regularity: {result['verdict']} at {format_bidegree(result['witness'])}")
    elif suite == 'koszul':
        passed &= _verdict('adjointness', koszul.check_adjointness(pot, depth=min(args.depth, 3)))
        passed &= _verdict('pairing-dimensions', koszul.check_pairing_dimensions(pot, depth=args.depth))
    return Config.EXIT_CODES['ok'] if passed else Config.EXIT_CODES['verification_failure']


def _module_for(pot, source: str):
    if source == 'k':
        return bgg.trivial_module(pot)
    if source in ('S_W', 'free'):
        return bgg.free_module(pot)
    return load_module(source, pot)


def _ext_report(pot, source: str, depth: int, hom_range) -> Tuple[bool, List[str]]:
    module = _module_for(pot, source)
    result = bgg.compare_ext(module, depth, hom_range)
    lines = [f"# {module.name}: H(F(N)) | Ext | diff"]
    rows = [(bideg, got, expected, got - expected) for bideg, got, expected in result['table']]
    lines.extend(bgg.format_cohomology_table(rows))
    lines.append('PASS' if result['passed'] else f"FAIL: {result['counterexample']}")
    return result['passed'], lines


def cmd_ext(args) -> int:
    pot = load_potential(args.potential)
    pot.require_graded()
    hom_range = tuple(args.hom) if args.hom else None
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(lambda source: _ext_report(pot, source, args.depth, hom_range), args.modules))
    passed = True
    output = []
    for ok, lines in reports:
        passed = passed and ok
        output.extend(lines)
    print('\n'.join(output))
    if args.save:
        Config.create_directories()
        path = Config.REPORTS_DIR / f"ext_{Path(args.potential).stem}.txt"
        path.write_text('\n'.join(output) + '\n', encoding='utf-8')
        status(f"💾 报告已保存: {path}")
    return Config.EXIT_CODES['ok'] if passed else Config.EXIT_CODES['verification_failure']


def cmd_cy(args) -> int:
    fan = load_fan(args.fan)
    _, degrees = toric.grading_from_fan(fan)
    pot = load_potential(args.potential, alphas=degrees)
    result = toric.cy_check(pot.alphas, pot.betas)
    if result['holds']:
        print("CY: true")
    else:
        print(f"CY: false (sum beta - sum alpha = {format_degree(result['witness'])})")
    origin = toric.origin_support(pot, toric.irrelevant_components(fan), args.depth)
    for gamma, tag in origin['strata']:
        print(f"Gamma {toric.format_gamma(gamma)}: {tag}")
    print(f"origin-support: {origin['verdict']}")
    return Config.EXIT_CODES['ok']


def cmd_generators(args) -> int:
    fan = load_fan(args.fan)
    _, degrees = toric.grading_from_fan(fan)
    pot = load_potential(args.potential, alphas=degrees)
    report = toric.thick_subcategory_generators(fan, pot, args.mode, check_origin=args.check_origin,
                                                depth=args.depth)
    for entry in report['generators']:
        if args.mode == 'sheaves':
            quotient = ','.join(entry['quotient_basis'])
            print(f"Gamma {toric.format_gamma(entry['gamma'])}: Lambda(V/V_Gamma) = Lambda({quotient}) "
                  f"-> (Lambda(L_Gamma) (x) S_W, d_Kos)")
        else:
            print(f"{entry['module']}(a), a in {entry['shifts']}")
    if 'origin' in report:
        print(f"origin-support: {report['origin']['verdict']}")
    return Config.EXIT_CODES['ok']


def cmd_status(args) -> int:
    print(json.dumps(resource_optimizer.get_system_status(), ensure_ascii=False, indent=2, sort_keys=True))
    return Config.EXIT_CODES['ok']


# ---- 参数 ----

def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog='ew', description="E_W、BGG 函子与环面分次数据的精确计算")
    parser.add_argument('--verbose', action='store_true', default=Config.VERBOSE, help="在 stderr 输出进度")
    parser.add_argument('--jobs', type=int, default=Config.JOBS, help="并行任务数")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('grade-fan', help="由扇计算 A、变量次数与 Γ 集合")
    p.add_argument('fan')
    p.set_defaults(handler=cmd_grade_fan)

    p = sub.add_parser('mu', help="计算 μ_n(a_1, …, a_n)")
    p.add_argument('potential')
    p.add_argument('arity', type=int)
    p.add_argument('elements', nargs='*')
    p.set_defaults(handler=cmd_mu)

    p = sub.add_parser('verify', help="运行校验套件")
    p.add_argument('potential')
    p.add_argument('suite', choices=VERIFY_SUITES)
    p.add_argument('--arity', type=int, default=Config.DEFAULT_ARITY)
    p.add_argument('--depth', type=int, default=Config.DEFAULT_DEPTH)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('ext', help="H(𝓕(N)) 与自由分解 Ext 对照")
    p.add_argument('potential')
    p.add_argument('modules', nargs='+', help="模文件，或 k / S_W")
    p.add_argument('--depth', type=int, default=Config.DEFAULT_DEPTH)
    p.add_argument('--hom', type=int, nargs=2, metavar=('LO', 'HI'))
    p.add_argument('--save', action='store_true', help="表格另存到 outputs/reports/")
    p.set_defaults(handler=cmd_ext)

    p = sub.add_parser('cy', help="Calabi-Yau 检查与原点支撑报告")
    p.add_argument('fan')
    p.add_argument('potential')
    p.add_argument('--depth', type=int, default=Config.DEFAULT_DEPTH)
    p.set_defaults(handler=cmd_cy)

    p = sub.add_parser('generators', help="厚子范畴生成元")
    p.add_argument('fan')
    p.add_argument('potential')
    p.add_argument('mode', choices=('sheaves', 'singularities'))
    p.add_argument('--check-origin', action='store_true')
    p.add_argument('--depth', type=int, default=Config.DEFAULT_DEPTH)
    p.set_defaults(handler=cmd_generators)

    p = sub.add_parser('status', help="资源状态与缓存规模")
    p.set_defaults(handler=cmd_status)
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return Config.EXIT_CODES['ok'] if e.code == 0 else Config.EXIT_CODES['input_error']
    Config.VERBOSE = args.verbose
    Config.JOBS = args.jobs
    status(f"🚀 {args.command}")
    try:
        return args.handler(args)
    except (InputError, WindowError) as e:
        error(str(e))
        return Config.EXIT_CODES['input_error']
    except VerificationFailure as e:
        error(str(e))
        return Config.EXIT_CODES['verification_failure']
    except EWError as e:
        error(str(e))
        return Config.EXIT_CODES['input_error']


if __name__ == "__main__":
    sys.exit(main())
