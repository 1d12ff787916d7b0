"""
输入文件：扇 (.fan)、势函数 (.pot)、模表示 (.mod)

三种格式都是逐行的 `键: 值`，`#` 开头为注释，错误信息带行号。

  .fan   rank: 2
         rays: [[1,0],[0,1],[-1,-1]]
         max_cones: [[1,2],[2,3],[3,1]]        射线编号从 1 开始

  .pot   variables: 2
         W1: x1^3 + x2^3
         group: Z                               可选，给出时需配 degrees
         degrees: 1, 1                          可选，整数或 [a,b | t]
         name: cubic                            可选

  .mod   generators: [(g1, 0, 0), (g2, 1, 0)]    (名字, A-次数, 同调次数)
         relations: [[x1, -x2], [x2^2, 0]]
         name: two-generator                    可选
"""

import json
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config
from services.bgg import GradedModule
from services.errors import InputError
from services.exact_algebra import Polynomial, parse_polynomial
from services.grading import Degree, parse_degree, parse_group
from services.koszul import Potential
from services.toric import Fan

_KEY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")


def read_text(path) -> str:
    path = Path(path)
    if not path.exists():
        raise InputError(f"文件不存在: {path}")
    suffix = path.suffix
    known = {ext for exts in Config.SUPPORTED_INPUT_FORMATS.values() for ext in exts}
    if suffix not in known:
        raise InputError(f"不支持的文件类型 {suffix}，应为 {sorted(known)}")
    return path.read_text(encoding='utf-8')


def parse_sections(text: str) -> Dict[str, Tuple[int, str]]:
    """键 → (行号, 值)；重复的键与无法识别的行报错"""
    sections: Dict[str, Tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        m = _KEY_RE.match(line)
        if not m:
            raise InputError(f"无法识别的行: {raw.strip()!r}", line=lineno)
        key, value = m.group(1), m.group(2).strip()
        if key in sections:
            raise InputError(f"重复的键 {key!r}", line=lineno)
        sections[key] = (lineno, value)
    return sections


def split_top_level(text: str, sep: str = ',') -> List[str]:
    """按最外层分隔符切分，括号内的分隔符保留"""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in '([':
            depth += 1
        elif ch in ')]':
            depth -= 1
            if depth < 0:
                raise InputError(f"括号不匹配: {text!r}")
        if ch == sep and depth == 0:
            parts.append(''.join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth:
        raise InputError(f"括号不匹配: {text!r}")
    tail = ''.join(current).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def _strip_brackets(text: str, pair: str, what: str) -> str:
    text = text.strip()
    if not (text.startswith(pair[0]) and text.endswith(pair[1])):
        raise InputError(f"{what} 应写成 {pair[0]}…{pair[1]}: {text!r}")
    return text[1:-1]


def _require(sections: Dict[str, Tuple[int, str]], key: str, kind: str) -> Tuple[int, str]:
    if key not in sections:
        raise InputError(f"{kind} 文件缺少 {key!r}")
    return sections[key]


def _with_line(lineno: int, func, *args):
    try:
        return func(*args)
    except InputError as e:
        if e.line is not None:
            raise
        raise InputError(str(e), line=lineno) from None


# ---- 扇 ----

def parse_fan(text: str, name: str = '') -> Fan:
    sections = parse_sections(text)
    lineno, value = _require(sections, 'rank', '扇')
    if not re.fullmatch(r"\d+", value):
        raise InputError(f"rank 应为正整数: {value!r}", line=lineno)
    rank = int(value)
    rays_line, rays_text = _require(sections, 'rays', '扇')
    rays = _with_line(rays_line, _int_lists, rays_text, 'rays')
    cones_line, cones_text = _require(sections, 'max_cones', '扇')
    cones = _with_line(cones_line, _int_lists, cones_text, 'max_cones')
    for c, cone in enumerate(cones, start=1):
        if any(i < 1 for i in cone):
            raise InputError(f"极大锥 σ{c} 的射线编号从 1 开始", line=cones_line)
    return _with_line(rays_line, Fan, rank, rays, [[i - 1 for i in cone] for cone in cones], name)


def _int_lists(text: str, what: str) -> List[List[int]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"{what} 不是整数列表的列表: {text!r}") from None
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise InputError(f"{what} 不是整数列表的列表: {text!r}")
    for r in data:
        if any(isinstance(x, bool) or not isinstance(x, int) for x in r):
            raise InputError(f"{what} 只能含整数: {r}")
    return data


def load_fan(path) -> Fan:
    return parse_fan(read_text(path), name=Path(path).stem)


# ---- 势函数 ----

def parse_potential(text: str, name: str = '', alphas: Optional[Sequence[Degree]] = None) -> Potential:
    """alphas 给出时（例如来自扇）覆盖文件中的次数，并与文件中的次数交叉核对"""
    sections = parse_sections(text)
    lineno, value = _require(sections, 'variables', '势函数')
    if not re.fullmatch(r"\d+", value) or int(value) < 1:
        raise InputError(f"variables 应为正整数: {value!r}", line=lineno)
    n = int(value)
    components = []
    j = 1
    while f"W{j}" in sections:
        wline, wtext = sections[f"W{j}"]
        components.append(_with_line(wline, parse_polynomial, wtext, 'V*', n))
        j += 1
    extra = [k for k in sections if re.fullmatch(r"W\d+", k) and int(k[1:]) >= j]
    if extra:
        raise InputError(f"方程编号不连续: {sorted(extra)}", line=sections[extra[0]][0])
    if not components:
        raise InputError("势函数文件至少需要 W1")
    declared = None
    if 'degrees' in sections:
        dline, dtext = sections['degrees']
        gline, gtext = _require(sections, 'group', '势函数')
        group = _with_line(gline, parse_group, gtext)
        declared = [_with_line(dline, parse_degree, part, group) for part in split_top_level(dtext)]
    name = sections['name'][1] if 'name' in sections else name
    if alphas is not None:
        alphas = list(alphas)
        if declared is not None and declared != alphas:
            raise InputError("文件中的变量次数与扇给出的次数不一致", line=sections['degrees'][0])
        return Potential(components, alphas=alphas, name=name)
    return Potential(components, alphas=declared, name=name)


def load_potential(path, alphas: Optional[Sequence[Degree]] = None) -> Potential:
    return parse_potential(read_text(path), name=Path(path).stem, alphas=alphas)


# ---- 模 ----

def parse_module(text: str, pot: Potential, name: str = '') -> GradedModule:
    pot.require_graded()
    sections = parse_sections(text)
    gline, gtext = _require(sections, 'generators', '模')
    generators = []
    for item in _with_line(gline, split_top_level, _with_line(gline, _strip_brackets, gtext, '[]', 'generators')):
        fields = _with_line(gline, split_top_level, _with_line(gline, _strip_brackets, item, '()', '生成元'))
        if len(fields) != 3:
            raise InputError(f"生成元应为 (名字, 次数, 同调次数): {item!r}", line=gline)
        gname, degree_text, hdeg_text = fields
        if not re.fullmatch(r"[+-]?\d+", hdeg_text):
            raise InputError(f"同调次数应为整数: {hdeg_text!r}", line=gline)
        degree = _with_line(gline, parse_degree, degree_text, pot.group)
        generators.append((gname, degree, int(hdeg_text)))
    relations = []
    if 'relations' in sections:
        rline, rtext = sections['relations']
        for row_text in _with_line(rline, split_top_level, _with_line(rline, _strip_brackets, rtext, '[]', 'relations')):
            entries = _with_line(rline, split_top_level, _with_line(rline, _strip_brackets, row_text, '[]', '关系'))
            relations.append([_with_line(rline, _parse_entry, e, pot.n) for e in entries])
    name = sections['name'][1] if 'name' in sections else name
    try:
        return GradedModule(pot, generators, relations, name=name)
    except InputError as e:
        raise InputError(str(e), line=sections['relations'][0] if 'relations' in sections else gline) from None


def _parse_entry(text: str, n: int) -> Polynomial:
    if text.strip() == '0':
        return Polynomial.zero('V*', n)
    return parse_polynomial(text, 'V*', n)


def load_module(path, pot: Potential) -> GradedModule:
    return parse_module(read_text(path), pot, name=Path(path).stem)
