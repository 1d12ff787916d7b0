"""
势函数 W = ΣW_j z_j、Koszul 复形 B = Sym(V*)⊗Λ(U*)、对偶余代数 C = Sym(V)⊗Λ(U)、
子余代数 C_W、商环 S_W 的分次分量与正则序列检查
"""

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config
from services.errors import InputError
from services.exact_algebra import (
    Exponent, Polynomial, UPolynomial, diff_apply, enumerate_exponents, pairing,
    format_monomial, format_terms, monomial_key,
)
from services.grading import (
    AbelianGroup, Bidegree, Degree, exponents_of_weight, monomials_of_degree,
    weight, weight_functional,
)
from services import linalg


class Potential:
    """W_1..W_m 及其 A-分次数据"""

    def __init__(self, components: Sequence[Polynomial], alphas: Sequence[Degree] = None,
                 betas: Sequence[Degree] = None, name: str = ''):
        if not components:
            raise InputError("势函数至少需要一个方程")
        self.name = name
        self.components = list(components)
        self.n = components[0].nvars
        self.m = len(components)
        for j, wj in enumerate(self.components):
            if wj.space != 'V*' or wj.nvars != self.n:
                raise InputError(f"W_{j + 1} 不在 Sym(V*) 中")
            if wj.constant_term():
                raise InputError(f"W_{j + 1} 有常数项")
        self.W = UPolynomial.from_components(self.components)
        self.has_linear = any(1 in wj.total_degrees() for wj in self.components)
        self.group: Optional[AbelianGroup] = None
        self.alphas: Optional[List[Degree]] = None
        self.betas: Optional[List[Degree]] = None
        self.w: Tuple[int, ...] = ()
        self._set_grading(alphas, betas)

    def _set_grading(self, alphas, betas):
        if alphas is None:
            # 标准分次：所有 x_i 次数 1，要求 W_j 齐次
            degs = [wj.total_degrees() for wj in self.components]
            if any(len(d) != 1 for d in degs):
                return
            group = AbelianGroup(1)
            alphas = [group.element([1])] * self.n
            betas = [group.element([d[0]]) for d in degs]
        alphas = list(alphas)
        if len(alphas) != self.n:
            raise InputError(f"给出了 {len(alphas)} 个变量次数，需要 {self.n} 个")
        group = alphas[0].group
        derived = []
        for j, wj in enumerate(self.components):
            found = {self._monomial_degree(exp, alphas) for exp in wj.terms}
            if len(found) != 1:
                raise InputError(f"W_{j + 1} 不是 A-齐次的")
            derived.append(found.pop())
        if betas is not None:
            betas = list(betas)
            for j, (given, actual) in enumerate(zip(betas, derived)):
                if given != actual:
                    raise InputError(f"W_{j + 1} 的次数应为 {actual}，给出的是 {given}")
        self.group = group
        self.alphas = alphas
        self.betas = derived
        self.w = weight_functional(alphas)

    @staticmethod
    def _monomial_degree(exp: Exponent, alphas: Sequence[Degree]) -> Degree:
        total = alphas[0].group.zero()
        for a, alpha in zip(exp, alphas):
            if a:
                total = total + alpha * a
        return total

    @property
    def graded(self) -> bool:
        return self.group is not None

    def require_graded(self):
        if not self.graded:
            raise InputError("该操作需要 A-分次的势函数")

    def require_no_linear(self):
        if self.has_linear:
            raise InputError("W_j 含线性项，E_W 的微分非零，不在适用范围内")

    def x_degree(self, exp: Exponent) -> Degree:
        """Sym(V*) 单项式 x^exp 的 A-次数"""
        self.require_graded()
        return self._monomial_degree(exp, self.alphas)

    def subset_degree(self, subset: Sequence[int]) -> Degree:
        total = self.group.zero()
        for j in subset:
            total = total + self.betas[j]
        return total

    def weight_of(self, degree: Degree) -> int:
        return weight(degree, self.w)

    def quadratic_part(self) -> UPolynomial:
        return self.W.quadratic_part()

    def higher_part(self) -> UPolynomial:
        """W − W^{(2)}"""
        return self.W - self.W.quadratic_part()

    def is_quadratic(self) -> bool:
        return self.higher_part().is_zero()

    def max_degree(self) -> int:
        return self.W.max_degree()

    def describe(self) -> str:
        return ' ; '.join(str(wj) for wj in self.components)

    def __repr__(self):
        return f"Potential({self.describe()!r})"


# ---- B 与 C 的元素 ----

class ExteriorTensor:
    """Sym ⊗ Λ 的稀疏元素：键 (指数向量, 递增外积下标)"""

    __slots__ = ('space', 'n', 'm', 'terms')

    def __init__(self, space: str, n: int, m: int, terms: Dict[Tuple[Exponent, Tuple[int, ...]], Fraction] = None):
        self.space = space
        self.n = n
        self.m = m
        self.terms: Dict[Tuple[Exponent, Tuple[int, ...]], Fraction] = {}
        for key, c in (terms or {}).items():
            if c:
                total = self.terms.get(key, Fraction(0)) + c
                if total:
                    self.terms[key] = total
                else:
                    self.terms.pop(key, None)

    def __add__(self, other: 'ExteriorTensor') -> 'ExteriorTensor':
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return ExteriorTensor(self.space, self.n, self.m, terms)

    def scale(self, factor) -> 'ExteriorTensor':
        return ExteriorTensor(self.space, self.n, self.m, {k: c * factor for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, ExteriorTensor):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __str__(self):
        sym = 'x' if self.space == 'V*' else 'e'
        ext = 'y' if self.space == 'V*' else 'z'
        items = []
        for (exp, subset), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], monomial_key(kv[0][0]))):
            mono = format_monomial(sym, exp)
            wedge = '^'.join(f"{ext}{j + 1}" for j in subset)
            items.append(('*'.join(p for p in (mono, wedge) if p), c))
        return format_terms(items)


def koszul_element(pot: Potential, terms) -> ExteriorTensor:
    return ExteriorTensor('V*', pot.n, pot.m, terms)


def coalgebra_element(pot: Potential, terms) -> ExteriorTensor:
    return ExteriorTensor('V', pot.n, pot.m, terms)


def delta_B(pot: Potential, x: ExteriorTensor) -> ExteriorTensor:
    """z_j 左缩并，W_j 乘法"""
    out: Dict = {}
    for (exp, subset), c in x.terms.items():
        for p, j in enumerate(subset):
            sign = -1 if p % 2 else 1
            rest = subset[:p] + subset[p + 1:]
            for wexp, wc in pot.components[j].terms.items():
                key = (tuple(a + b for a, b in zip(exp, wexp)), rest)
                out[key] = out.get(key, Fraction(0)) + sign * c * wc
    return koszul_element(pot, out)


def delta_C(pot: Potential, x: ExteriorTensor) -> ExteriorTensor:
    """W_j 作为微分算子，z_j 左乘"""
    out: Dict = {}
    for (exp, subset), c in x.terms.items():
        source = Polynomial('V', pot.n, {exp: c})
        for j, wj in enumerate(pot.components):
            if j in subset:
                continue
            # z_j ∧ z_S：越过比 j 小的下标
            position = sum(1 for i in subset if i < j)
            sign = -1 if position % 2 else 1
            rest = tuple(sorted(subset + (j,)))
            image = diff_apply(wj, source)
            for e2, c2 in image.terms.items():
                key = (e2, rest)
                out[key] = out.get(key, Fraction(0)) + sign * c2
    return coalgebra_element(pot, out)


def pairing_BC(b: ExteriorTensor, c: ExteriorTensor) -> Fraction:
    """⟨f⊗y_S, g⊗z_T⟩ = ⟨f, g⟩·δ_{S,T}"""
    total = Fraction(0)
    for (be, bs), bc in b.terms.items():
        for (ce, cs), cc in c.terms.items():
            if bs == cs and be == ce:
                total += bc * cc * pairing(Polynomial.monomial('V', ce), Polynomial.monomial('V*', be))
    return total


def check_adjointness(pot: Potential, depth: int = 3) -> Dict:
    """⟨δ_B b, c⟩ = ⟨b, δ_C c⟩ 在单项式基上逐对检查"""
    top = depth + pot.max_degree()
    checked = 0
    for p in range(1, pot.m + 1):
        for subset in combinations(range(pot.m), p):
            for d in range(depth + 1):
                for exp in enumerate_exponents(pot.n, d):
                    b = koszul_element(pot, {(exp, subset): 1})
                    lhs_b = delta_B(pot, b)
                    for rest in combinations(range(pot.m), p - 1):
                        for d2 in range(top + 1):
                            for exp2 in enumerate_exponents(pot.n, d2):
                                c = coalgebra_element(pot, {(exp2, rest): 1})
                                lhs = pairing_BC(lhs_b, c)
                                rhs = pairing_BC(b, delta_C(pot, c))
                                checked += 1
                                if lhs != rhs:
                                    return {'passed': False, 'checked': checked,
                                            'counterexample': (str(b), str(c), lhs, rhs)}
    return {'passed': True, 'checked': checked, 'counterexample': None}


# ---- 分次分量 ----

def sym_monomials(pot: Potential, degree: Degree) -> List[Exponent]:
    """Sym(V*)_α 的单项式基；Sym(V)_{−α} 与之一一对应"""
    pot.require_graded()
    if pot.weight_of(degree) < 0:
        return []
    return monomials_of_degree(pot.alphas, degree, pot.w)


def cw_basis(pot: Potential, degree: Degree) -> List[Polynomial]:
    """C_W 在 A-次数 degree（≤ 0）处的基：Sym(V) 中 δ_C 的核"""
    pot.require_graded()
    monomials = sym_monomials(pot, -degree)
    if not monomials:
        return []
    images = []
    targets = set()
    for exp in monomials:
        image = delta_C(pot, coalgebra_element(pot, {(exp, ()): 1}))
        images.append(image.terms)
        targets.update(image.terms)
    target_basis = sorted(targets, key=lambda k: (k[1], monomial_key(k[0])))
    if not target_basis:
        kernel = [[Fraction(int(i == j)) for j in range(len(monomials))] for i in range(len(monomials))]
    else:
        rows = linalg.matrix_from_images(images, target_basis)
        kernel = linalg.nullspace(rows, len(monomials))
    return [Polynomial('V', pot.n, {exp: c for exp, c in zip(monomials, vec) if c}) for vec in kernel]


class QuotientComponent(linalg.QuotientSpace):
    """(S_W)_α = Sym(V*)_α / J_α，J_α = Σ_j W_j·Sym(V*)_{α−β_j}"""

    def __init__(self, pot: Potential, degree: Degree):
        self.pot = pot
        self.degree = degree
        relations = []
        for j, wj in enumerate(pot.components):
            for exp in sym_monomials(pot, degree - pot.betas[j]):
                relations.append((Polynomial.monomial('V*', exp) * wj).terms)
        super().__init__(sym_monomials(pot, degree), relations)

    @property
    def monomials(self) -> List[Exponent]:
        return self.keys

    def reduce(self, poly: Polynomial) -> List[Fraction]:
        try:
            return super().reduce(poly.terms)
        except KeyError as e:
            raise InputError(f"单项式 {format_monomial('x', e.args[0])} 不在次数 {self.degree} 中") from None


def sw_basis(pot: Potential, degree: Degree) -> List[Exponent]:
    """(S_W)_α 的单项式基"""
    return QuotientComponent(pot, degree).basis


def dual_bases(pot: Potential, degree: Degree) -> Tuple[List[Exponent], List[Polynomial]]:
    """x_{α,i} ∈ (S_W)_α 与 y_{α,i} ∈ (C_W)_{−α}，满足 ⟨x_i, y_j⟩ = δ_ij"""
    xs = sw_basis(pot, degree)
    cs = cw_basis(pot, -degree)
    if len(xs) != len(cs):
        raise InputError(f"次数 {degree}: dim S_W = {len(xs)} 与 dim C_W = {len(cs)} 不一致（序列可能不正则）")
    if not xs:
        return [], []
    gram = [[pairing(c, Polynomial.monomial('V*', x)) for c in cs] for x in xs]
    inv = linalg.inverse(gram)
    ys = []
    for i in range(len(xs)):
        y = Polynomial.zero('V', pot.n)
        for k, c in enumerate(cs):
            if inv[k][i]:
                y = y + c.scale(inv[k][i])
        ys.append(y)
    return xs, ys


def check_pairing_dimensions(pot: Potential, depth: int = None) -> Dict:
    """dim (S_W)_α = dim (C_W)_{−α}，α 取遍权 ≤ depth 的次数"""
    depth = Config.DEFAULT_DEPTH if depth is None else depth
    rows = []
    for degree in degrees_up_to(pot, depth):
        s_dim = len(sw_basis(pot, degree))
        c_dim = len(cw_basis(pot, -degree))
        rows.append((degree, s_dim, c_dim))
    return {'passed': all(a == b for _, a, b in rows), 'table': rows}


def degrees_up_to(pot: Potential, depth: int) -> List[Degree]:
    """A₊ 中权 ≤ depth 的全部次数（按权、坐标排序）"""
    pot.require_graded()
    w_values = [pot.weight_of(a) for a in pot.alphas]
    found = set()
    for total in range(depth + 1):
        for exp in exponents_of_weight(w_values, total):
            found.add(pot.x_degree(exp))
    return sorted(found, key=lambda d: (pot.weight_of(d), d.coords))


# ---- Koszul 同调与正则性 ----

def koszul_component(pot: Potential, exterior: int, degree: Degree) -> List[Tuple[Exponent, Tuple[int, ...]]]:
    """B_{p,α} 的基：x^I ⊗ y_S，|S| = p，deg x^I + Σ_{j∈S} β_j = α"""
    basis = []
    if exterior < 0 or exterior > pot.m:
        return basis
    for subset in combinations(range(pot.m), exterior):
        for exp in sym_monomials(pot, degree - pot.subset_degree(subset)):
            basis.append((exp, subset))
    return basis


def _delta_B_matrix(pot: Potential, exterior: int, degree: Degree) -> List[List[Fraction]]:
    source = koszul_component(pot, exterior, degree)
    target = koszul_component(pot, exterior - 1, degree)
    if not source or not target:
        return []
    images = [delta_B(pot, koszul_element(pot, {key: 1})).terms for key in source]
    return linalg.matrix_from_images(images, target)


def koszul_homology(pot: Potential, exterior: int, degree: Degree) -> int:
    dim = len(koszul_component(pot, exterior, degree))
    if not dim:
        return 0
    out_rank = linalg.rank(_delta_B_matrix(pot, exterior, degree))
    in_rank = linalg.rank(_delta_B_matrix(pot, exterior + 1, degree))
    return dim - out_rank - in_rank


def default_koszul_window(pot: Potential, depth: int = None) -> List[Bidegree]:
    depth = Config.REGULARITY_DEPTH if depth is None else depth
    window = []
    top = depth + max(pot.weight_of(b) for b in pot.betas) * pot.m
    for degree in degrees_up_to(pot, top):
        for p in range(1, pot.m + 1):
            window.append(Bidegree(degree, p))
    return window


def check_regular_sequence(pot: Potential, window: Sequence[Bidegree] = None) -> Dict:
    """窗口内正外次数 Koszul 同调是否全为零"""
    pot.require_graded()
    window = default_koszul_window(pot) if window is None else list(window)
    table = []
    witness = None
    for bideg in window:
        if bideg.hom < 1:
            continue
        h = koszul_homology(pot, bideg.hom, bideg.degree)
        table.append((bideg, h))
        if h and witness is None:
            witness = bideg
    verdict = 'non-regular' if witness is not None else 'consistent-with-regular'
    return {'verdict': verdict, 'witness': witness, 'table': table}
