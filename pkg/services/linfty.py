"""
L∞-代数 L = {V → U} 的括号 l_k、分解 𝓛 的微分与括号、映射 G_k 以及 L∞-态射恒等式检查
"""

import random
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config
from services import linalg
from services.errors import InputError
from services.exact_algebra import (
    Polynomial, UPolynomial, corrected_derivative, diff_apply, format_terms,
)
from services.koszul import Potential


class LElement:
    """L 的齐次元素：hom = 1 时为 V 中向量，hom = 2 时为 U 中向量"""

    __slots__ = ('hom', 'coeffs')

    def __init__(self, hom: int, coeffs: Dict[int, Fraction] = None):
        if hom not in (1, 2):
            raise InputError(f"L 只有 1、2 两个次数，而不是 {hom}")
        self.hom = hom
        self.coeffs = {i: Fraction(c) for i, c in (coeffs or {}).items() if c}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LElement):
            return NotImplemented
        return (self.is_zero() and other.is_zero()) or (self.hom, self.coeffs) == (other.hom, other.coeffs)

    def __str__(self):
        prefix = 'e' if self.hom == 1 else 'z'
        return format_terms((f"{prefix}{i + 1}", c) for i, c in sorted(self.coeffs.items()))


class ResolutionElement:
    """𝓛 的元素：次数 1 为 f ⊕ v（f ∈ Sym^{≥1}(V*)⊗U），次数 2 为 [g]"""

    __slots__ = ('hom', 'poly', 'vec')

    def __init__(self, hom: int, poly: UPolynomial, vec: Dict[int, Fraction] = None):
        self.hom = hom
        self.poly = poly
        self.vec = {i: Fraction(c) for i, c in (vec or {}).items() if c}
        if hom == 1 and poly.constant_part():
            raise InputError("𝓛¹ 的多项式部分不能有常数 U-项")
        if hom != 1 and self.vec:
            raise InputError("只有 𝓛¹ 含有 V 分量")

    @classmethod
    def zero(cls, pot: Potential, hom: int) -> 'ResolutionElement':
        return cls(hom, UPolynomial(pot.n, pot.m))

    def __add__(self, other: 'ResolutionElement') -> 'ResolutionElement':
        if self.hom != other.hom:
            raise InputError(f"次数不同的元素不能相加: {self.hom} 与 {other.hom}")
        vec = dict(self.vec)
        for i, c in other.vec.items():
            vec[i] = vec.get(i, Fraction(0)) + c
        return ResolutionElement(self.hom, self.poly + other.poly, vec)

    def scale(self, factor) -> 'ResolutionElement':
        return ResolutionElement(self.hom, self.poly.scale(factor), {i: c * factor for i, c in self.vec.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return self.poly.is_zero() and not self.vec

    def __eq__(self, other):
        if not isinstance(other, ResolutionElement):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.hom == other.hom and self.poly == other.poly and self.vec == other.vec

    def __str__(self):
        if self.hom == 2:
            return f"[{self.poly}]"
        vec = format_terms((f"e{i + 1}", c) for i, c in sorted(self.vec.items()))
        return f"({self.poly} ⊕ {vec})"


def _basis_monomial(pot: Potential, indices: Sequence[int]) -> Polynomial:
    exp = [0] * pot.n
    for i in indices:
        if not 0 <= i < pot.n:
            raise InputError(f"e{i + 1} 不是 V 的基向量")
        exp[i] += 1
    return Polynomial.monomial('V', tuple(exp))


def l_k(pot: Potential, indices: Sequence[int]) -> LElement:
    """l_k(e_{i1},…,e_{ik}) = ∂_{e_{i1}⋯e_{ik}}(W)(0)"""
    if len(indices) < 2:
        raise InputError("l_k 需要 k ≥ 2")
    derived = diff_apply(_basis_monomial(pot, indices), pot.W)
    return LElement(2, derived.constant_part())


def resolution_differential(pot: Potential, x: ResolutionElement) -> ResolutionElement:
    """δ_𝓛(f ⊕ v) = ∂̂_v(W) − [f]；次数 2 上为零"""
    if x.hom != 1:
        return ResolutionElement.zero(pot, x.hom + 1)
    out = x.poly.scale(-1)
    for i, c in x.vec.items():
        out = out + corrected_derivative(i, pot.W).scale(c)
    return ResolutionElement(2, out)


def resolution_bracket(pot: Potential, a: ResolutionElement, b: ResolutionElement) -> ResolutionElement:
    """{f₁ ⊕ v₁, f₂ ⊕ v₂} = [∂̂_{v₁}(f₂) + ∂̂_{v₂}(f₁)]"""
    if a.hom != 1 or b.hom != 1:
        raise InputError("括号只定义在 𝓛¹ × 𝓛¹ 上")
    out = UPolynomial(pot.n, pot.m)
    for i, c in a.vec.items():
        out = out + corrected_derivative(i, b.poly).scale(c)
    for i, c in b.vec.items():
        out = out + corrected_derivative(i, a.poly).scale(c)
    return ResolutionElement(2, out)


def iterated_corrected(pot: Potential, indices: Sequence[int]) -> UPolynomial:
    """∂̂_{v1}⋯∂̂_{vk}(W)"""
    out = pot.W
    for i in reversed(list(indices)):
        out = corrected_derivative(i, out)
    return out


def g_k(pot: Potential, indices: Sequence[int] = (), u_index: Optional[int] = None) -> ResolutionElement:
    """G_k(v₁..v_k) = k!·overline{∂̂⋯∂̂(W)}，G₁(v) 另加向量 v，G₁(u) = [u]"""
    if u_index is not None:
        if indices:
            raise InputError("G_k 不接受 V 与 U 混合的参数")
        if not 0 <= u_index < pot.m:
            raise InputError(f"z{u_index + 1} 不是 U 的基向量")
        return ResolutionElement(2, UPolynomial(pot.n, pot.m, {((0,) * pot.n, u_index): 1}))
    k = len(indices)
    if k == 0:
        raise InputError("G_k 需要 k ≥ 1")
    factorial_k = 1
    for t in range(2, k + 1):
        factorial_k *= t
    poly = iterated_corrected(pot, indices).overline().scale(factorial_k)
    vec = {indices[0]: 1} if k == 1 else {}
    return ResolutionElement(1, poly, vec)


def g_one_of(pot: Potential, element: LElement) -> ResolutionElement:
    """G₁ 线性延拓到 L 的元素"""
    out = ResolutionElement.zero(pot, element.hom)
    for i, c in element.coeffs.items():
        image = g_k(pot, (i,)) if element.hom == 1 else g_k(pot, u_index=i)
        out = out + image.scale(c)
    return out


# ---- 收缩 (F, G₁, H) ----

def contraction_F(pot: Potential, x: ResolutionElement) -> LElement:
    """F(f ⊕ v) = v，F([g]) = g 的 k⊗U 分量"""
    if x.hom == 1:
        return LElement(1, x.vec)
    return LElement(2, x.poly.constant_part())


def contraction_H(pot: Potential, x: ResolutionElement) -> ResolutionElement:
    """H([g]) = −overline{g} ⊕ 0，𝓛¹ 上为零"""
    if x.hom == 2:
        return ResolutionElement(1, x.poly.overline().scale(-1))
    return ResolutionElement.zero(pot, x.hom - 1)


def linfty_identity_sides(pot: Potential, indices: Sequence[int]) -> Tuple[ResolutionElement, ResolutionElement]:
    """G₁(l_k) − δ_𝓛(G_k) 与 Σ{G_{k−1}(…v̂_i…), G₁(v_i)}（k = 2 时为 {G₁(v₁), G₁(v₂)}）"""
    k = len(indices)
    lhs = g_one_of(pot, l_k(pot, indices)) - resolution_differential(pot, g_k(pot, indices))
    if k == 2:
        rhs = resolution_bracket(pot, g_k(pot, indices[:1]), g_k(pot, indices[1:]))
        return lhs, rhs
    rhs = ResolutionElement.zero(pot, 2)
    for i in range(k):
        rest = tuple(indices[:i]) + tuple(indices[i + 1:])
        rhs = rhs + resolution_bracket(pot, g_k(pot, rest), g_k(pot, (indices[i],)))
    return lhs, rhs


def check_linfty_morphism(pot: Potential, arity: int = None, samples: int = None,
                          seed: int = None) -> Dict:
    """在全部单项式参数组与随机参数组上检查恒等式"""
    pot.require_no_linear()
    arity = Config.DEFAULT_ARITY if arity is None else arity
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    tuples: List[Tuple[int, ...]] = []
    for k in range(2, arity + 1):
        tuples.extend(combinations_with_replacement(range(pot.n), k))
    for _ in range(samples):
        k = rng.randint(2, max(2, arity))
        tuples.append(tuple(rng.randrange(pot.n) for _ in range(k)))
    for indices in tuples:
        lhs, rhs = linfty_identity_sides(pot, indices)
        if lhs != rhs:
            return {'passed': False, 'checked': len(tuples),
                    'counterexample': (indices, str(lhs), str(rhs))}
    return {'passed': True, 'checked': len(tuples), 'counterexample': None}


def random_resolution_element(pot: Potential, hom: int, rng: random.Random, degree: int = 3) -> ResolutionElement:
    terms = {}
    for _ in range(3):
        d = rng.randint(1 if hom == 1 else 0, degree)
        exp = [0] * pot.n
        for _ in range(d):
            exp[rng.randrange(pot.n)] += 1
        terms[(tuple(exp), rng.randrange(pot.m))] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    poly = UPolynomial(pot.n, pot.m, terms)
    vec = {rng.randrange(pot.n): rng.randint(-3, 3)} if hom == 1 else {}
    return ResolutionElement(hom, poly, vec)


def check_contraction(pot: Potential, samples: int = None, seed: int = None) -> Dict:
    """H∘G₁ = 0，H∘H = 0，F∘H = 0，F∘G₁ = 1，以及 1 − G₁F = δH + Hδ"""
    pot.require_no_linear()
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    failures = []
    for i in range(pot.n):
        g = g_k(pot, (i,))
        if not contraction_H(pot, g).is_zero():
            failures.append(('HG', f"e{i + 1}"))
        if contraction_F(pot, g) != LElement(1, {i: 1}):
            failures.append(('FG', f"e{i + 1}"))
    for j in range(pot.m):
        g = g_k(pot, u_index=j)
        if not contraction_H(pot, g).is_zero():
            failures.append(('HG', f"z{j + 1}"))
        if contraction_F(pot, g) != LElement(2, {j: 1}):
            failures.append(('FG', f"z{j + 1}"))
    for _ in range(samples):
        for hom in (1, 2):
            x = random_resolution_element(pot, hom, rng)
            hx = contraction_H(pot, x)
            if not contraction_H(pot, hx).is_zero():
                failures.append(('HH', str(x)))
            if not contraction_F(pot, hx).is_zero():
                failures.append(('FH', str(x)))
            gfx = g_one_of(pot, contraction_F(pot, x))
            lhs = x - gfx
            rhs = contraction_H(pot, resolution_differential(pot, x))
            if hom == 2:
                rhs = resolution_differential(pot, hx) + rhs
            if lhs != rhs:
                failures.append(('homotopy', str(x)))
            dd = resolution_differential(pot, resolution_differential(pot, x))
            if not dd.is_zero():
                failures.append(('dd', str(x)))
    return {'passed': not failures, 'failures': failures}


def _truncated(pot: Potential, x: ResolutionElement, degree: int) -> ResolutionElement:
    poly = UPolynomial.from_components([x.poly.component(j).truncate_above(degree) for j in range(pot.m)])
    return ResolutionElement(x.hom, poly, x.vec)


def check_g1_quasi_isomorphism(pot: Potential, degree: int = None) -> Dict:
    """𝓛 模去多项式次数 > degree 的子复形后，G₁ 为链映射并在 H¹、H² 上给出同构"""
    pot.require_no_linear()
    degree = Config.DEFAULT_DEPTH if degree is None else degree
    if degree < 0:
        raise InputError(f"截断次数不能为负: {degree}")
    monomials = [tuple(c.count(i) for i in range(pot.n))
                 for d in range(degree + 1) for c in combinations_with_replacement(range(pot.n), d)]
    ones = [('v', i) for i in range(pot.n)] + [(e, j) for e in monomials if sum(e) for j in range(pot.m)]
    twos = [(e, j) for e in monomials for j in range(pot.m)]

    def coords(x: ResolutionElement, keys) -> List[Fraction]:
        return [x.vec.get(k[1], Fraction(0)) if k[0] == 'v' else x.poly.terms.get(k, Fraction(0)) for k in keys]

    def basis_element(key) -> ResolutionElement:
        if key[0] == 'v':
            return ResolutionElement(1, UPolynomial(pot.n, pot.m), {key[1]: 1})
        return ResolutionElement(1, UPolynomial(pot.n, pot.m, {key: 1}))

    deltas = [coords(_truncated(pot, resolution_differential(pot, basis_element(k)), degree), twos) for k in ones]
    rank_delta = linalg.rank(deltas, len(twos))
    h1, h2 = len(ones) - rank_delta, len(twos) - rank_delta
    images_v = [_truncated(pot, g_k(pot, (i,)), degree) for i in range(pot.n)]
    images_u = [g_k(pot, u_index=j) for j in range(pot.m)]
    chain_map = all(_truncated(pot, resolution_differential(pot, g), degree).is_zero() for g in images_v)
    rank_v = linalg.rank([coords(g, ones) for g in images_v], len(ones))
    rank_u = linalg.rank(deltas + [coords(g, twos) for g in images_u], len(twos)) - rank_delta
    passed = chain_map and (h1, h2) == (rank_v, rank_u) == (pot.n, pot.m)
    counterexample = None if passed else {'chain_map': chain_map, 'cohomology': (h1, h2), 'ranks': (rank_v, rank_u)}
    return {'passed': passed, 'checked': len(ones) + len(twos), 'cohomology': (h1, h2),
            'ranks': (rank_v, rank_u), 'counterexample': counterexample}
