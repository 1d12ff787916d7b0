"""
精确有理数多项式：Sym(V*)、Sym(V) 上的稀疏多项式，微分算子作用，配对与修正偏导数
"""

import re
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, List, Tuple, Union

from services.errors import InputError

Exponent = Tuple[int, ...]
ScalarLike = Union[int, Fraction, str]

# 变量前缀 -> 所在空间
SPACE_PREFIX = {
    'x': 'V*',   # Sym(V*) 的坐标
    'e': 'V',    # 对偶基
    'z': 'U',
    'y': 'U*',
}
DUAL_SPACE = {'V*': 'V', 'V': 'V*', 'U': 'U*', 'U*': 'U'}
PREFIX_OF = {space: prefix for prefix, space in SPACE_PREFIX.items()}


def fraction_literal(text: str) -> Fraction:
    """`3`、`-1/2` 形式的字面量；分母为零时报错"""
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise InputError(f"分母为零: {text!r}") from None


def to_scalar(value: ScalarLike) -> Fraction:
    """转换为精确有理数；浮点数直接报错"""
    if isinstance(value, bool):
        raise InputError(f"不是有理数: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise InputError(f"拒绝浮点字面量 {value!r}，请使用整数或分数")
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise InputError(f"无法解析的系数 {value!r}")
        return fraction_literal(text)
    # sympy 的 QQ/ZZ 元素
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return Fraction(int(value.numerator), int(value.denominator))
    raise InputError(f"不是有理数: {value!r}")


def monomial_key(exp: Exponent):
    """次数-字典序：先按总次数，再按指数向量（x1 优先）"""
    return (sum(exp), tuple(-a for a in exp))


def enumerate_exponents(nvars: int, degree: int) -> List[Exponent]:
    """总次数为 degree 的全部指数向量"""
    if nvars == 0:
        return [()] if degree == 0 else []
    result = []
    for first in range(degree, -1, -1):
        for rest in enumerate_exponents(nvars - 1, degree - first):
            result.append((first,) + rest)
    return result


class Polynomial:
    """单个空间上的稀疏多项式，不存零系数"""

    __slots__ = ('space', 'nvars', 'terms')

    def __init__(self, space: str, nvars: int, terms: Dict[Exponent, ScalarLike] = None):
        if space not in DUAL_SPACE:
            raise InputError(f"未知空间 {space}")
        self.space = space
        self.nvars = nvars
        self.terms: Dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != nvars or any(a < 0 for a in exp):
                raise InputError(f"指数向量 {exp} 与变量个数 {nvars} 不符")
            c = to_scalar(coeff)
            if c:
                self.terms[exp] = self.terms.get(exp, Fraction(0)) + c
                if not self.terms[exp]:
                    del self.terms[exp]

    # ---- 构造 ----
    @classmethod
    def zero(cls, space: str, nvars: int) -> 'Polynomial':
        return cls(space, nvars)

    @classmethod
    def one(cls, space: str, nvars: int) -> 'Polynomial':
        return cls(space, nvars, {(0,) * nvars: 1})

    @classmethod
    def variable(cls, space: str, nvars: int, index: int) -> 'Polynomial':
        exp = [0] * nvars
        exp[index] = 1
        return cls(space, nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, space: str, exp: Exponent, coeff: ScalarLike = 1) -> 'Polynomial':
        return cls(space, len(exp), {tuple(exp): coeff})

    # ---- 基本运算 ----
    def _check_same(self, other: 'Polynomial'):
        if not isinstance(other, Polynomial):
            raise InputError(f"不是多项式: {other!r}")
        if other.space != self.space or other.nvars != self.nvars:
            raise InputError(f"变量集不匹配: {self.space}[{self.nvars}] 与 {other.space}[{other.nvars}]")

    def __add__(self, other: 'Polynomial') -> 'Polynomial':
        self._check_same(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms.get(exp, Fraction(0)) + c
        return Polynomial(self.space, self.nvars, terms)

    def __neg__(self) -> 'Polynomial':
        return Polynomial(self.space, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: 'Polynomial') -> 'Polynomial':
        return self + (-other)

    def scale(self, factor: ScalarLike) -> 'Polynomial':
        f = to_scalar(factor)
        return Polynomial(self.space, self.nvars, {e: c * f for e, c in self.terms.items()})

    def __mul__(self, other) -> 'Polynomial':
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check_same(other)
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                terms[exp] = terms.get(exp, Fraction(0)) + c1 * c2
        return Polynomial(self.space, self.nvars, terms)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.space, self.nvars, self.terms) == (other.space, other.nvars, other.terms)

    def __hash__(self):
        return hash((self.space, self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # ---- 次数 ----
    def total_degrees(self) -> List[int]:
        return sorted({sum(e) for e in self.terms})

    def homogeneous_part(self, degree: int) -> 'Polynomial':
        return Polynomial(self.space, self.nvars,
                          {e: c for e, c in self.terms.items() if sum(e) == degree})

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def without_constant(self) -> 'Polynomial':
        """去掉常数项（上划线投影）"""
        return Polynomial(self.space, self.nvars,
                          {e: c for e, c in self.terms.items() if sum(e) > 0})

    def truncate_above(self, degree: int) -> 'Polynomial':
        return Polynomial(self.space, self.nvars,
                          {e: c for e, c in self.terms.items() if sum(e) <= degree})

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: monomial_key(item[0]))

    def __repr__(self):
        return f"Polynomial({self.space}, {format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


class UPolynomial:
    """Sym(V*)⊗U 中的元素，对 U 线性：键为 (指数向量, j)"""

    __slots__ = ('nvars', 'nu', 'terms')

    def __init__(self, nvars: int, nu: int, terms: Dict[Tuple[Exponent, int], ScalarLike] = None):
        self.nvars = nvars
        self.nu = nu
        self.terms: Dict[Tuple[Exponent, int], Fraction] = {}
        for (exp, j), coeff in (terms or {}).items():
            if not 0 <= j < nu:
                raise InputError(f"U 下标 {j} 越界")
            c = to_scalar(coeff)
            key = (tuple(exp), j)
            total = self.terms.get(key, Fraction(0)) + c
            if total:
                self.terms[key] = total
            else:
                self.terms.pop(key, None)

    @classmethod
    def from_components(cls, components: List[Polynomial]) -> 'UPolynomial':
        if not components:
            raise InputError("势函数至少需要一个方程")
        nvars = components[0].nvars
        terms = {}
        for j, poly in enumerate(components):
            if poly.space != 'V*' or poly.nvars != nvars:
                raise InputError("W_j 必须是同一组 x 变量上的多项式")
            for exp, c in poly.terms.items():
                terms[(exp, j)] = c
        return cls(nvars, len(components), terms)

    def component(self, j: int) -> Polynomial:
        return Polynomial('V*', self.nvars, {e: c for (e, jj), c in self.terms.items() if jj == j})

    def __add__(self, other: 'UPolynomial') -> 'UPolynomial':
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return UPolynomial(self.nvars, self.nu, terms)

    def __neg__(self) -> 'UPolynomial':
        return UPolynomial(self.nvars, self.nu, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: 'UPolynomial') -> 'UPolynomial':
        return self + (-other)

    def scale(self, factor: ScalarLike) -> 'UPolynomial':
        f = to_scalar(factor)
        return UPolynomial(self.nvars, self.nu, {k: c * f for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, UPolynomial):
            return NotImplemented
        return self.terms == other.terms and self.nu == other.nu and self.nvars == other.nvars

    def __hash__(self):
        return hash((self.nvars, self.nu, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def overline(self) -> 'UPolynomial':
        """投影掉 k⊗U（Sym 次数 0 的项）"""
        return UPolynomial(self.nvars, self.nu,
                           {(e, j): c for (e, j), c in self.terms.items() if sum(e) > 0})

    def constant_part(self) -> Dict[int, Fraction]:
        """k⊗U 分量，按 j 给出系数"""
        return {j: c for (e, j), c in self.terms.items() if sum(e) == 0}

    def quadratic_part(self) -> 'UPolynomial':
        """W^{(2)}：去掉次数 ≥3 的项"""
        return UPolynomial(self.nvars, self.nu,
                           {(e, j): c for (e, j), c in self.terms.items() if sum(e) <= 2})

    def max_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __repr__(self):
        return f"UPolynomial({format_upolynomial(self)!r})"

    def __str__(self):
        return format_upolynomial(self)


# ---- 微分算子 ----

def _monomial_derivative(op: Exponent, target: Exponent) -> Tuple[Fraction, Exponent]:
    """∂_{v^a}(x^b) = Π b!/(b-a)! · x^{b-a}"""
    coeff = 1
    rest = []
    for a, b in zip(op, target):
        if a > b:
            return Fraction(0), ()
        coeff *= factorial(b) // factorial(b - a)
        rest.append(b - a)
    return Fraction(coeff), tuple(rest)


def diff_apply(f: Polynomial, g: Union[Polynomial, UPolynomial]):
    """∂_f(g)：f 与 g 在互为对偶的变量集上"""
    if isinstance(g, UPolynomial):
        if f.space != 'V' or f.nvars != g.nvars:
            raise InputError("变量集不匹配: Sym(V*)⊗U 只能被 Sym(V) 作用")
        terms: Dict[Tuple[Exponent, int], Fraction] = {}
        for fe, fc in f.terms.items():
            for (ge, j), gc in g.terms.items():
                c, rest = _monomial_derivative(fe, ge)
                if c:
                    key = (rest, j)
                    terms[key] = terms.get(key, Fraction(0)) + c * fc * gc
        return UPolynomial(g.nvars, g.nu, terms)
    if DUAL_SPACE[f.space] != g.space or f.nvars != g.nvars:
        raise InputError(f"变量集不匹配: {f.space}[{f.nvars}] 不能作用于 {g.space}[{g.nvars}]")
    terms = {}
    for fe, fc in f.terms.items():
        for ge, gc in g.terms.items():
            c, rest = _monomial_derivative(fe, ge)
            if c:
                terms[rest] = terms.get(rest, Fraction(0)) + c * fc * gc
    return Polynomial(g.space, g.nvars, terms)


def pairing(f: Polynomial, g: Polynomial) -> Fraction:
    """⟨f, g⟩ = ∂_f(g)(0)"""
    return diff_apply(f, g).constant_term()


def pairing_combinatorial(f: Polynomial, g: Polynomial) -> Fraction:
    """独立路径：⟨e^I, x^J⟩ = I!·δ_{I,J}"""
    if DUAL_SPACE[f.space] != g.space or f.nvars != g.nvars:
        raise InputError("变量集不匹配")
    total = Fraction(0)
    for exp, c in f.terms.items():
        if exp in g.terms:
            weight = 1
            for a in exp:
                weight *= factorial(a)
            total += c * g.terms[exp] * weight
    return total


def corrected_derivative(index: int, g: Union[Polynomial, UPolynomial]):
    """∂̂_v：在 Sym^k 上为 (1/k)∂_v，常数映为 0"""
    if isinstance(g, UPolynomial):
        terms: Dict[Tuple[Exponent, int], Fraction] = {}
        for (exp, j), c in g.terms.items():
            k = sum(exp)
            if k == 0 or exp[index] == 0:
                continue
            rest = list(exp)
            rest[index] -= 1
            key = (tuple(rest), j)
            terms[key] = terms.get(key, Fraction(0)) + c * exp[index] / k
        return UPolynomial(g.nvars, g.nu, terms)
    if g.space not in ('V*', 'V'):
        raise InputError(f"修正偏导数只作用于 Sym(V*) 或 Sym(V)，而不是 {g.space}")
    if not 0 <= index < g.nvars:
        raise InputError(f"变量下标 {index} 越界")
    terms = {}
    for exp, c in g.terms.items():
        k = sum(exp)
        if k == 0 or exp[index] == 0:
            continue
        rest = list(exp)
        rest[index] -= 1
        rest = tuple(rest)
        terms[rest] = terms.get(rest, Fraction(0)) + c * exp[index] / k
    return Polynomial(g.space, g.nvars, terms)


# ---- 字面量 ----

_TERM_RE = re.compile(r"\s*([+-]?)\s*([^+-]+)")
_FACTOR_RE = re.compile(r"^([a-z])(\d+)(?:\^(\d+))?$")


def tokenize_terms(text: str) -> List[Tuple[Fraction, List[Tuple[str, int, int]]]]:
    """把 `3*x1^2*x2 - 1/2*x3^5` 拆成 (系数, [(前缀, 下标, 次数)])"""
    source = text.strip()
    if not source:
        raise InputError("空多项式字面量")
    if re.search(r"\d\.|\.\d", source):
        raise InputError(f"拒绝浮点字面量: {text!r}")
    result = []
    pos = 0
    for match in _TERM_RE.finditer(source):
        if match.start() != pos and source[pos:match.start()].strip():
            raise InputError(f"无法解析: {text!r}")
        pos = match.end()
        sign, body = match.group(1), match.group(2).strip()
        if not body:
            raise InputError(f"无法解析: {text!r}")
        coeff = Fraction(-1 if sign == '-' else 1)
        factors = []
        for piece in body.split('*'):
            piece = piece.strip()
            if not piece:
                raise InputError(f"多余的 '*': {text!r}")
            if re.fullmatch(r"\d+(/\d+)?", piece):
                coeff *= fraction_literal(piece)
                continue
            m = _FACTOR_RE.match(piece)
            if not m:
                raise InputError(f"无法识别的因子 {piece!r}")
            prefix, index, power = m.group(1), int(m.group(2)), int(m.group(3) or 1)
            if prefix not in SPACE_PREFIX or index < 1:
                raise InputError(f"无法识别的变量 {piece!r}")
            factors.append((prefix, index - 1, power))
        result.append((coeff, factors))
    if pos != len(source):
        raise InputError(f"无法解析: {text!r}")
    return result


def parse_polynomial(text: str, space: str, nvars: int) -> Polynomial:
    """解析单一空间上的多项式字面量"""
    prefix = PREFIX_OF[space]
    terms: Dict[Exponent, Fraction] = {}
    for coeff, factors in tokenize_terms(text):
        exp = [0] * nvars
        for p, index, power in factors:
            if p != prefix:
                raise InputError(f"变量 {p}{index + 1} 不在空间 {space} 中")
            if index >= nvars:
                raise InputError(f"变量 {p}{index + 1} 超出维数 {nvars}")
            exp[index] += power
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(space, nvars, terms)


def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(prefix: str, exp: Exponent) -> str:
    parts = []
    for i, a in enumerate(exp):
        if a == 1:
            parts.append(f"{prefix}{i + 1}")
        elif a > 1:
            parts.append(f"{prefix}{i + 1}^{a}")
    return '*'.join(parts)


def format_terms(items: Iterable[Tuple[str, Fraction]]) -> str:
    """(单项式字符串, 系数) 序列 -> `3*x1^2 - 1/2*x2`"""
    out = []
    for mono, c in items:
        mag = abs(c)
        if not mono:
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    return ''.join(out) if out else '0'


def format_polynomial(poly: Polynomial) -> str:
    prefix = PREFIX_OF[poly.space]
    return format_terms((format_monomial(prefix, e), c) for e, c in poly.sorted_terms())


def format_upolynomial(poly: UPolynomial) -> str:
    items = sorted(poly.terms.items(), key=lambda kv: (kv[0][1], monomial_key(kv[0][0])))
    rendered = []
    for (exp, j), c in items:
        mono = format_monomial('x', exp)
        mono = f"{mono}*z{j + 1}" if mono else f"z{j + 1}"
        rendered.append((mono, c))
    return format_terms(rendered)
