"""
A∞-代数 E_W：PBW 乘积、收缩 (F_sym, G_sym, H_sym)、bar 层同伦 H′、两次微扰以及高阶乘积 μ_n

记号：
  U(𝓛₂) 的生成元按分解基记为
    ('g', i)       G₁(e_i)，奇
    ('u', j)       z_j，偶
    ('s', (a, j))  {x^a z_j}，|a| ≥ 1，奇
    ('b', (a, j))  [x^a z_j]，|a| ≥ 1，偶
  词 Word = (奇生成元的递增元组, 偶生成元的递增多重集)，元素为 Word → Fraction 的字典。
  E_W = U(L₂) 的元素只含 'g' 与 'u'。
"""

import random
from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config
from services.errors import InputError, VerificationFailure
from services.exact_algebra import corrected_derivative, format_terms
from services.grading import Bidegree
from services.koszul import Potential
from services.linfty import l_k
from services.resource_optimizer import resource_optimizer

Gen = Tuple[str, object]
Word = Tuple[Tuple[Gen, ...], Tuple[Gen, ...]]
Element = Dict[Word, Fraction]
BarWord = Tuple[Word, ...]
BarElement = Dict[BarWord, Fraction]

TYPE_RANK = {'g': 0, 'u': 1, 's': 2, 'b': 3}
ODD_TYPES = ('g', 's')
UNIT: Word = ((), ())


def gen_key(gen: Gen):
    return TYPE_RANK[gen[0]], gen[1]


def is_odd(gen: Gen) -> bool:
    return gen[0] in ODD_TYPES


def word_degree(word: Word) -> int:
    """同调次数：奇生成元 1，偶生成元 2"""
    return len(word[0]) + 2 * len(word[1])


def bar_degree(word: Word) -> int:
    """平移次数 ‖w‖ = |w| − 1"""
    return word_degree(word) - 1


def v_count(word: Word) -> int:
    return sum(1 for g in word[0] if g[0] == 'g')


def is_L_word(word: Word) -> bool:
    """只含 L 部分（g 与 u）"""
    return all(g[0] in ('g', 'u') for g in word[0] + word[1])


# ---- 元素运算 ----

def add_into(target: Dict, key, coeff: Fraction):
    if not coeff:
        return
    total = target.get(key, Fraction(0)) + coeff
    if total:
        target[key] = total
    else:
        target.pop(key, None)


def add_elements(*elements: Dict) -> Dict:
    out: Dict = {}
    for element in elements:
        for key, c in element.items():
            add_into(out, key, c)
    return out


def scale_element(element: Dict, factor) -> Dict:
    factor = Fraction(factor)
    if not factor:
        return {}
    return {k: c * factor for k, c in element.items()}


def sort_odd(seq: Sequence[Gen]) -> Tuple[int, Tuple[Gen, ...]]:
    """奇生成元排序的符号；有重复时返回 (0, ())"""
    items = list(seq)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    # 插入排序计逆序数
    for i in range(1, len(items)):
        j = i
        while j > 0 and gen_key(items[j - 1]) > gen_key(items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def sort_even(seq: Sequence[Gen]) -> Tuple[Gen, ...]:
    return tuple(sorted(seq, key=gen_key))


def sym_mul_words(w1: Word, w2: Word) -> Tuple[int, Optional[Word]]:
    """Sym(𝓛₂) 中分次交换乘积 w1·w2"""
    sign, odd = sort_odd(w1[0] + w2[0])
    if not sign:
        return 0, None
    return sign, (odd, sort_even(w1[1] + w2[1]))


def sym_mul(a: Element, b: Element) -> Element:
    out: Element = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            sign, word = sym_mul_words(w1, w2)
            if sign:
                add_into(out, word, sign * c1 * c2)
    return out


def word_from_gens(gens: Sequence[Gen]) -> Tuple[int, Optional[Word]]:
    """按给定顺序相乘的生成元（分次交换）"""
    odd = [g for g in gens if is_odd(g)]
    even = [g for g in gens if not is_odd(g)]
    # 偶生成元与奇生成元交换无符号
    sign, odd_sorted = sort_odd(odd)
    if not sign:
        return 0, None
    return sign, (odd_sorted, sort_even(even))


# ---- 2 步幂零李代数的包络：PBW 乘积 ----

class CliffordStructure:
    """U(K) ≅ Sym(K)，K 的奇部分带对称形式 B = ½{,}，取值于中心偶生成元"""

    def __init__(self, name: str):
        self.name = name
        self._product_cache: Dict[Tuple[Tuple[Gen, ...], Tuple[Gen, ...]], Element] = {}
        self._form_cache: Dict[Tuple[Gen, Gen], Dict[Gen, Fraction]] = {}
        resource_optimizer.register_cache(f"{name}.product", self._product_cache)

    def bracket(self, a: Gen, b: Gen) -> Dict[Gen, Fraction]:
        raise NotImplementedError

    def form(self, a: Gen, b: Gen) -> Dict[Gen, Fraction]:
        """B(a, b) = ½{a, b}"""
        key = (a, b) if gen_key(a) <= gen_key(b) else (b, a)
        cached = self._form_cache.get(key)
        if cached is None:
            cached = {g: c / 2 for g, c in self.bracket(*key).items() if c}
            self._form_cache[key] = cached
        return cached

    def _left_mult(self, v: Gen, element: Element) -> Element:
        """v·q(ω) = q(v∧ω) + q(ι_v ω)"""
        out: Element = {}
        for (odd, even), c in element.items():
            if v not in odd:
                position = sum(1 for t in odd if gen_key(t) < gen_key(v))
                sign = -1 if position % 2 else 1
                wedge = odd[:position] + (v,) + odd[position:]
                add_into(out, (wedge, even), sign * c)
            for q, t in enumerate(odd):
                form = self.form(v, t)
                if not form:
                    continue
                sign = -1 if q % 2 else 1
                rest = odd[:q] + odd[q + 1:]
                for g, fc in form.items():
                    add_into(out, (rest, sort_even(even + (g,))), sign * c * fc)
        return out

    def _product_odd(self, a: Tuple[Gen, ...], b: Tuple[Gen, ...]) -> Element:
        key = (a, b)
        cached = self._product_cache.get(key)
        if cached is not None:
            return cached
        if not a:
            result = {(b, ()): Fraction(1)}
        else:
            v, omega = a[0], a[1:]
            # q(v∧ω) = v·q(ω) − q(ι_v ω)
            result = self._left_mult(v, self._product_odd(omega, b))
            for q, t in enumerate(omega):
                form = self.form(v, t)
                if not form:
                    continue
                sign = -1 if q % 2 else 1
                rest = omega[:q] + omega[q + 1:]
                inner = self._product_odd(rest, b)
                for g, fc in form.items():
                    for (odd, even), c in inner.items():
                        add_into(result, (odd, sort_even(even + (g,))), -sign * fc * c)
        self._product_cache[key] = result
        return result

    def product_words(self, w1: Word, w2: Word) -> Element:
        """ρ(w1) ∗ ρ(w2)"""
        even = w1[1] + w2[1]
        out: Element = {}
        for (odd, extra), c in self._product_odd(w1[0], w2[0]).items():
            add_into(out, (odd, sort_even(even + extra)), c)
        return out

    def product(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for w1, c1 in a.items():
            for w2, c2 in b.items():
                for word, c in self.product_words(w1, w2).items():
                    add_into(out, word, c1 * c2 * c)
        return out

    def delta_u_words(self, w1: Word, w2: Word) -> Element:
        """δ_U(ρ(a) ⊗ ρ(b)) = ρ(a) ∗ ρ(b) − ρ(a·b)"""
        out = self.product_words(w1, w2)
        sign, word = sym_mul_words(w1, w2)
        if sign:
            add_into(out, word, Fraction(-sign))
        return out

    def delta_u(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for w1, c1 in a.items():
            for w2, c2 in b.items():
                for word, c in self.delta_u_words(w1, w2).items():
                    add_into(out, word, c1 * c2 * c)
        return out


class EWStructure(CliffordStructure):
    """E_W = U(L₂)：{e_i, e_j} = l₂(e_i, e_j) ∈ U"""

    def __init__(self, pot: Potential):
        super().__init__(f"E_W[{pot.describe()}]")
        self.pot = pot

    def bracket(self, a: Gen, b: Gen) -> Dict[Gen, Fraction]:
        if a[0] != 'g' or b[0] != 'g':
            return {}
        value = l_k(self.pot, (a[1], b[1]))
        return {('u', j): c for j, c in value.coeffs.items()}


class ResolutionEnvelope(CliffordStructure):
    """U(𝓛₂)：𝓛₂ 为 W^{(2)} 的分解，按分解基 G₁(L₂) ⊕ ({S} → [S]) 书写"""

    def __init__(self, pot: Potential):
        super().__init__(f"U(L2)[{pot.describe()}]")
        self.pot = pot
        self._higher = pot.higher_part()
        self._tilde_cache: Dict[int, Element] = {}

    def bracket(self, a: Gen, b: Gen) -> Dict[Gen, Fraction]:
        if a[0] == 'g' and b[0] == 'g':
            value = l_k(self.pot, (a[1], b[1]))
            return {('u', j): c for j, c in value.coeffs.items()}
        if a[0] == 's' and b[0] == 'g':
            a, b = b, a
        if a[0] == 'g' and b[0] == 's':
            exp, j = b[1]
            i = a[1]
            if not exp[i]:
                return {}
            coeff = Fraction(exp[i], sum(exp))
            rest = list(exp)
            rest[i] -= 1
            return {bracket_generator(tuple(rest), j): coeff}
        return {}

    def tilde_generator(self, i: int) -> Element:
        """δ̃(g_i) = [∂̂_{e_i}(W − W^{(2)})]"""
        cached = self._tilde_cache.get(i)
        if cached is None:
            poly = corrected_derivative(i, self._higher)
            cached = {}
            for (exp, j), c in poly.terms.items():
                add_into(cached, ((), (bracket_generator(exp, j),)), c)
            self._tilde_cache[i] = cached
        return cached


def bracket_generator(exp: Tuple[int, ...], j: int) -> Gen:
    """[x^a z_j]：常数时即 z_j"""
    if sum(exp) == 0:
        return ('u', j)
    return ('b', (tuple(exp), j))


def brace_generator(exp: Tuple[int, ...], j: int) -> Gen:
    if sum(exp) == 0:
        raise InputError("{·} 只接受 Sym^{≥1}(V*)⊗U 中的元素")
    return ('s', (tuple(exp), j))


# ---- 收缩 (F_sym, G_sym, H_sym) 与内部微分 ----

def F_sym_word(word: Word) -> Element:
    """含 {S} 或 [S] 因子的词映为 0，其余原样"""
    return {word: Fraction(1)} if is_L_word(word) else {}


def G_sym_word(word: Word) -> Element:
    return {word: Fraction(1)}


def F_sym(element: Element) -> Element:
    return {w: c for w, c in element.items() if is_L_word(w)}


def G_sym(element: Element) -> Element:
    return dict(element)


def H_sym_word(word: Word) -> Element:
    """H(L·{f₁..f_m}[g₁..g_k]) = −1/(k+m)·Σ_t {g_t}·L·{f₁..f_m}[..ĝ_t..]，新因子放在最左"""
    odd, even = word
    m = sum(1 for g in odd if g[0] == 's')
    k = sum(1 for g in even if g[0] == 'b')
    if not k:
        return {}
    factor = Fraction(-1, k + m)
    out: Element = {}
    for t, g in enumerate(even):
        if g[0] != 'b':
            continue
        sign, new_odd = sort_odd((('s', g[1]),) + odd)
        if not sign:
            continue
        rest = even[:t] + even[t + 1:]
        add_into(out, (new_odd, rest), sign * factor)
    return out


def H_sym(element: Element) -> Element:
    out: Element = {}
    for w, c in element.items():
        for w2, c2 in H_sym_word(w).items():
            add_into(out, w2, c * c2)
    return out


def internal_delta_word(word: Word) -> Element:
    """左导子 δ(ab) = (δa)·b + (−1)^{|a|}a·δb，δ{f} = −[f]"""
    odd, even = word
    out: Element = {}
    for p, g in enumerate(odd):
        if g[0] != 's':
            continue
        sign = -1 if p % 2 else 1
        rest = odd[:p] + odd[p + 1:]
        add_into(out, (rest, sort_even(even + (('b', g[1]),))), Fraction(-sign))
    return out


def internal_delta(element: Element) -> Element:
    out: Element = {}
    for w, c in element.items():
        for w2, c2 in internal_delta_word(w).items():
            add_into(out, w2, c * c2)
    return out


def check_homotopy_identity(words: Sequence[Word]) -> Dict:
    """δH + Hδ = 1 − G_sym F_sym，以及 H G = 0、H² = 0、F H = 0"""
    failures = []
    for word in words:
        base = {word: Fraction(1)}
        lhs = add_elements(internal_delta(H_sym(base)), H_sym(internal_delta(base)))
        rhs = add_elements(base, scale_element(G_sym(F_sym(base)), -1))
        if lhs != rhs:
            failures.append(('homotopy', word))
        if H_sym(G_sym(F_sym(base))):
            failures.append(('HG', word))
        if H_sym(H_sym(base)):
            failures.append(('HH', word))
        if F_sym(H_sym(base)):
            failures.append(('FH', word))
    return {'passed': not failures, 'failures': failures}


# ---- bar 层算子 ----

def _bar_add(out: BarElement, key: BarWord, coeff: Fraction):
    if any(w == UNIT for w in key):
        raise VerificationFailure("约化 bar 构造中出现了标量因子", key)
    add_into(out, key, coeff)


def bar_homotopy_prime(bar: BarElement) -> BarElement:
    """H′ = Σ_s (−1)^{Σ_{j<s}‖a_j‖} 1^{⊗s} ⊗ H_sym ⊗ (G_sym F_sym)^{⊗rest}"""
    out: BarElement = {}
    for word_tuple, c in bar.items():
        prefix_sign = 1
        for s, a in enumerate(word_tuple):
            tail = word_tuple[s + 1:]
            if all(is_L_word(w) for w in tail):
                for h, hc in H_sym_word(a).items():
                    _bar_add(out, word_tuple[:s] + (h,) + tail, prefix_sign * c * hc)
            if bar_degree(a) % 2:
                prefix_sign = -prefix_sign
    return out


def delta_B_bar(structure: CliffordStructure, bar: BarElement) -> BarElement:
    """δ_B(a₁|…|a_t) = Σ_i (−1)^{Σ_{j≤i}‖a_j‖}(…|δ_U(a_i, a_{i+1})|…)"""
    out: BarElement = {}
    for word_tuple, c in bar.items():
        parity = 0
        for i in range(len(word_tuple) - 1):
            parity += bar_degree(word_tuple[i])
            sign = -1 if parity % 2 else 1
            merged = structure.delta_u_words(word_tuple[i], word_tuple[i + 1])
            for w, wc in merged.items():
                _bar_add(out, word_tuple[:i] + (w,) + word_tuple[i + 2:], sign * c * wc)
    return out


def tilde_delta_word(envelope: ResolutionEnvelope, word: Word) -> Element:
    """δ̃_U：左导子延拓，δ̃(g_i) = [∂̂_{e_i}(W − W^{(2)})]"""
    odd, even = word
    out: Element = {}
    for p, g in enumerate(odd):
        if g[0] != 'g':
            continue
        sign = -1 if p % 2 else 1
        rest = odd[:p] + odd[p + 1:]
        for (_, extra), c in envelope.tilde_generator(g[1]).items():
            add_into(out, (rest, sort_even(even + extra)), sign * c)
    return out


def tilde_delta_bar(envelope: ResolutionEnvelope, bar: BarElement) -> BarElement:
    """δ̃_B(a₁|…|a_t) = Σ_i (−1)^{Σ_{j<i}‖a_j‖}(…|δ̃ a_i|…)"""
    out: BarElement = {}
    for word_tuple, c in bar.items():
        prefix_sign = 1
        for i, a in enumerate(word_tuple):
            for w, wc in tilde_delta_word(envelope, a).items():
                _bar_add(out, word_tuple[:i] + (w,) + word_tuple[i + 1:], prefix_sign * c * wc)
            if bar_degree(a) % 2:
                prefix_sign = -prefix_sign
    return out


def tilde_delta(envelope: ResolutionEnvelope, element: Element) -> Element:
    out: Element = {}
    for w, c in element.items():
        for w2, c2 in tilde_delta_word(envelope, w).items():
            add_into(out, w2, c * c2)
    return out


def series_potential(word_tuple: BarWord) -> Tuple[int, int]:
    """(V 因子总数, 张量长度)：沿级数展开严格下降"""
    return sum(v_count(w) for w in word_tuple), len(word_tuple)


# ---- E_W 元素的输入输出 ----

def ew_word_bidegree(pot: Potential, word: Word) -> Bidegree:
    pot.require_graded()
    degree = pot.group.zero()
    for g in word[0]:
        degree = degree - pot.alphas[g[1]]
    for g in word[1]:
        degree = degree - pot.betas[g[1]]
    return Bidegree(degree, word_degree(word))


def ew_bidegrees(pot: Potential, element: Element) -> List[Bidegree]:
    found = []
    for word in sorted(element, key=_word_sort_key):
        bideg = ew_word_bidegree(pot, word)
        if bideg not in found:
            found.append(bideg)
    return found


def _word_sort_key(word: Word):
    return (word_degree(word), tuple(gen_key(g) for g in word[0]), tuple(gen_key(g) for g in word[1]))


def format_gen(gen: Gen) -> str:
    kind, payload = gen
    if kind == 'g':
        return f"e{payload + 1}"
    if kind == 'u':
        return f"z{payload + 1}"
    exp, j = payload
    mono = '*'.join(f"x{i + 1}" + (f"^{a}" if a > 1 else '') for i, a in enumerate(exp) if a)
    inner = f"{mono}*z{j + 1}"
    return f"{{{inner}}}" if kind == 's' else f"[{inner}]"


def format_word(word: Word) -> str:
    parts = [format_gen(g) for g in word[0]]
    even = list(word[1])
    i = 0
    while i < len(even):
        j = i
        while j < len(even) and even[j] == even[i]:
            j += 1
        power = j - i
        parts.append(format_gen(even[i]) + (f"^{power}" if power > 1 else ''))
        i = j
    return '*'.join(parts)


def format_element(element: Element) -> str:
    return format_terms((format_word(w), c) for w, c in sorted(element.items(), key=lambda kv: _word_sort_key(kv[0])))


def format_bar(bar: BarElement) -> str:
    items = []
    for word_tuple, c in sorted(bar.items(), key=lambda kv: [_word_sort_key(w) for w in kv[0]]):
        items.append(('(' + ' | '.join(format_word(w) or '1' for w in word_tuple) + ')', c))
    return format_terms(items)


def parse_ew_element(text: str, pot: Potential) -> Element:
    """Λ(V)⊗Sym(U) 字面量：`e1*e2*z1^2 - 1/2*z2`，e 之间按外积"""
    from services.exact_algebra import tokenize_terms
    out: Element = {}
    for coeff, factors in tokenize_terms(text):
        gens: List[Gen] = []
        for prefix, index, power in factors:
            if prefix == 'e':
                if index >= pot.n:
                    raise InputError(f"e{index + 1} 超出 dim V = {pot.n}")
                gens.extend([('g', index)] * power)
            elif prefix == 'z':
                if index >= pot.m:
                    raise InputError(f"z{index + 1} 超出 dim U = {pot.m}")
                gens.extend([('u', index)] * power)
            else:
                raise InputError(f"E_W 字面量只允许 e 与 z 变量: {prefix}{index + 1}")
        sign, word = word_from_gens(gens)
        if sign:
            add_into(out, word, sign * coeff)
    return out


def ew_generator(kind: str, index: int) -> Element:
    return {(((kind, index),), ()) if kind == 'g' else ((), ((kind, index),)): Fraction(1)}


def drop_scalar(element: Element) -> Element:
    return {w: c for w, c in element.items() if w != UNIT}


# ---- 高阶乘积 ----

class AInftyService:
    """E_W 上 μ_n 的求值服务，按势函数缓存包络代数与级数备忘"""

    def __init__(self):
        self._structures: Dict[int, Tuple[Potential, EWStructure, ResolutionEnvelope]] = {}
        self._series_cache: Dict[Tuple[int, BarWord, int], Element] = {}
        self._tree_cache: Dict[Tuple[int, Tuple], Dict[int, Element]] = {}
        self.stats = {'series_hits': 0, 'series_misses': 0}
        resource_optimizer.register_cache('ainfty.series', self._series_cache)
        resource_optimizer.register_cache('ainfty.trees', self._tree_cache)

    def structures(self, pot: Potential) -> Tuple[EWStructure, ResolutionEnvelope]:
        key = id(pot)
        entry = self._structures.get(key)
        if entry is None or entry[0] is not pot:
            pot.require_no_linear()
            entry = (pot, EWStructure(pot), ResolutionEnvelope(pot))
            self._forget(key)
            while self._structures and len(self._structures) >= resource_optimizer.memo_limit:
                self._forget(next(iter(self._structures)))
            self._structures[key] = entry
        return entry[1], entry[2]

    def _forget(self, key: int):
        """丢弃一个势函数的结构以及以其 id 为键的备忘"""
        self._structures.pop(key, None)
        for cache in (self._series_cache, self._tree_cache):
            for stale in [k for k in list(cache) if k[0] == key]:
                cache.pop(stale, None)

    def _remember(self, cache: dict, key, value):
        """先进先出，条目数不超过 memo_limit"""
        while cache and len(cache) >= resource_optimizer.memo_limit:
            cache.pop(next(iter(cache)), None)
        cache[key] = value

    def clear(self):
        self._series_cache.clear()
        self._tree_cache.clear()
        self._structures.clear()
        self.stats = {'series_hits': 0, 'series_misses': 0}

    # -- μ₂ --
    def pbw_product(self, pot: Potential, a: Element, b: Element) -> Element:
        ew, _ = self.structures(pot)
        return ew.product(a, b)

    # -- 公式求值 --
    def mu(self, pot: Potential, args: Sequence[Element]) -> Element:
        """μ_n(a₁, …, a_n)；n = 2 为 PBW 乘积"""
        n = len(args)
        if n < 2:
            raise InputError("μ_n 需要 n ≥ 2")
        if n == 2:
            return self.pbw_product(pot, args[0], args[1])
        _, envelope = self.structures(pot)
        reduced = [drop_scalar(a) for a in args]
        if any(not a for a in reduced):
            return {}
        start: BarElement = {}
        for combo in cartesian(*[list(a.items()) for a in reduced]):
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            add_into(start, tuple(w for w, _ in combo), coeff)
        frontier = bar_homotopy_prime(tilde_delta_bar(envelope, start))
        result: Element = {}
        for word_tuple, c in frontier.items():
            for w, wc in self._series(pot, envelope, word_tuple, n - 2).items():
                add_into(result, w, -c * wc)
        resource_optimizer.check()
        return result

    def _series(self, pot: Potential, envelope: ResolutionEnvelope,
                word_tuple: BarWord, remaining: int) -> Element:
        """Σ_续 (−1)^{j} F_sym δ_U …：remaining 为尚需的 δ_B 次数"""
        key = (id(pot), word_tuple, remaining)
        cached = self._series_cache.get(key)
        if cached is not None:
            self.stats['series_hits'] += 1
            return cached
        self.stats['series_misses'] += 1
        result: Element = {}
        here = series_potential(word_tuple)
        if remaining == 0 and len(word_tuple) == 2:
            w1, w2 = word_tuple
            sign = -1 if bar_degree(w1) % 2 else 1
            for w, c in F_sym(envelope.delta_u_words(w1, w2)).items():
                add_into(result, w, sign * c)
        steps = []
        if remaining > 0:
            steps.append((delta_B_bar(envelope, {word_tuple: Fraction(1)}), remaining - 1))
        steps.append((tilde_delta_bar(envelope, {word_tuple: Fraction(1)}), remaining))
        for image, left in steps:
            for nxt, c in bar_homotopy_prime(image).items():
                if series_potential(nxt) >= here:
                    raise VerificationFailure("级数展开的终止势函数没有下降", (word_tuple, nxt))
                for w, wc in self._series(pot, envelope, nxt, left).items():
                    add_into(result, w, -c * wc)
        self._remember(self._series_cache, key, result)
        return result

    # -- 平面树求值 --
    def mu_trees(self, pot: Potential, args: Sequence[Element]) -> Element:
        """平面树求和：二叉顶点 δ_U，一元顶点 δ̃_U，内边 H，叶 G，根 F"""
        n = len(args)
        if n < 2:
            raise InputError("μ_n 需要 n ≥ 2")
        if n == 2:
            return self.pbw_product(pot, args[0], args[1])
        _, envelope = self.structures(pot)
        reduced = tuple(tuple(sorted(drop_scalar(a).items(), key=lambda kv: _word_sort_key(kv[0])))
                        for a in args)
        if any(not a for a in reduced):
            return {}
        result: Element = {}
        for k in range(n - 1):
            left = self._edge(pot, envelope, reduced, 0, k)
            right = self._edge(pot, envelope, reduced, k + 1, n - 1)
            for fl, el in left.items():
                for fr, er in right.items():
                    if not (fl or fr):
                        continue
                    for w, c in F_sym(envelope.delta_u(el, er)).items():
                        add_into(result, w, c)
        return result

    def _edge(self, pot: Potential, envelope: ResolutionEnvelope, args: Tuple,
              i: int, j: int) -> Dict[int, Element]:
        """叶 i..j 上子树输出边的值，按是否含 δ̃ 顶点分为 {0, 1}"""
        key = (id(pot), args[i:j + 1])
        cached = self._tree_cache.get(key)
        if cached is not None:
            return cached
        if i == j:
            seed = {0: G_sym(dict(args[i]))}
        else:
            node: Dict[int, Element] = {}
            for k in range(i, j):
                left = self._edge(pot, envelope, args, i, k)
                right = self._edge(pot, envelope, args, k + 1, j)
                for fl, el in left.items():
                    for fr, er in right.items():
                        flag = 1 if (fl or fr) else 0
                        node[flag] = add_elements(node.get(flag, {}), envelope.delta_u(el, er))
            seed = {f: scale_element(H_sym(e), -1) for f, e in node.items()}
        total = {f: dict(e) for f, e in seed.items() if e}
        current = add_elements(*seed.values()) if seed else {}
        while current:
            current = scale_element(H_sym(tilde_delta(envelope, current)), -1)
            if current:
                total[1] = add_elements(total.get(1, {}), current)
        total = {f: e for f, e in total.items() if e}
        self._remember(self._tree_cache, key, total)
        return total

    # -- 分量映射 F_{B,k} 与 H_{B,k} --
    def component_maps(self, pot: Potential, bar: BarElement) -> Tuple[Element, Element]:
        """F_{B,k} = (−1)^{k−1}F_sym(δ_B H′)^{k−1}，H_{B,k} 同理，作用于长度 k 的词"""
        _, envelope = self.structures(pot)
        f_out: Element = {}
        h_out: Element = {}
        by_length: Dict[int, BarElement] = {}
        for word_tuple, c in bar.items():
            by_length.setdefault(len(word_tuple), {})[word_tuple] = c
        for k, part in by_length.items():
            current = part
            for _ in range(k - 1):
                current = delta_B_bar(envelope, bar_homotopy_prime(current))
            sign = -1 if (k - 1) % 2 else 1
            for word_tuple, c in current.items():
                (w,) = word_tuple
                if is_L_word(w):
                    add_into(f_out, w, sign * c)
                for w2, c2 in H_sym_word(w).items():
                    add_into(h_out, w2, sign * c * c2)
        return f_out, h_out


ainfty_service = AInftyService()


def pbw_product(pot: Potential, a: Element, b: Element) -> Element:
    return ainfty_service.pbw_product(pot, a, b)


def mu(pot: Potential, args: Sequence[Element]) -> Element:
    return ainfty_service.mu(pot, args)


def mu_trees(pot: Potential, args: Sequence[Element]) -> Element:
    return ainfty_service.mu_trees(pot, args)


def mu_bidegree(pot: Potential, args: Sequence[Element]) -> Optional[Bidegree]:
    """Σ deg(a_i)，同调次数再加 2 − n"""
    total = None
    for a in args:
        degs = ew_bidegrees(pot, drop_scalar(a) or a)
        if len(degs) != 1:
            return None
        total = degs[0] if total is None else total + degs[0]
    return Bidegree(total.degree, total.hom + 2 - len(args))


# ---- Stasheff 恒等式与其他检查 ----

def bar_component(pot: Potential, args: Sequence[Element]) -> Element:
    """bar 约定下的分量：b₁ = 0，b₂(a, b) = (−1)^{‖a‖}a∗b，b_n = μ_n（n ≥ 3）"""
    n = len(args)
    if n == 1:
        return {}
    if n == 2:
        ew, _ = ainfty_service.structures(pot)
        out: Element = {}
        for w, c in args[0].items():
            sign = -1 if bar_degree(w) % 2 else 1
            for w2, c2 in ew.product({w: c}, args[1]).items():
                add_into(out, w2, sign * c2)
        return out
    return mu(pot, args)


def stasheff_residual(pot: Potential, words: Sequence[Word]) -> Element:
    """Σ (−1)^{Σ_{j≤r}‖a_j‖} b_{r+1+t}(a₁..a_r, b_s(a_{r+1}..a_{r+s}), …)"""
    args = [{w: Fraction(1)} for w in words]
    total = len(args)
    residual: Element = {}
    for s in range(2, total + 1):
        for r in range(0, total - s + 1):
            if s == total:
                continue
            inner = bar_component(pot, args[r:r + s])
            if not inner:
                continue
            sign = -1 if sum(bar_degree(w) for w in words[:r]) % 2 else 1
            outer = args[:r] + [inner] + args[r + s:]
            for w, c in bar_component(pot, outer).items():
                add_into(residual, w, sign * c)
    return residual


def v_words(pot: Potential) -> List[Word]:
    return [((('g', i),), ()) for i in range(pot.n)]


def mixed_pool(pot: Potential) -> List[Word]:
    """随机参数池：V、U、V·V、V·U 型基词"""
    pool = v_words(pot) + [((), (('u', j),)) for j in range(pot.m)]
    for i in range(pot.n):
        for k in range(i + 1, pot.n):
            pool.append(((('g', i), ('g', k)), ()))
        for j in range(pot.m):
            pool.append(((('g', i),), (('u', j),)))
    return pool


def check_stasheff(pot: Potential, arity: int = None, samples: int = None, seed: int = None,
                   pool: Sequence[Word] = None) -> Dict:
    """总元数 3..arity 的全部 V-元组与随机混合元组上残差必须恰为零"""
    arity = Config.DEFAULT_ARITY if arity is None else arity
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    pool = list(pool) if pool is not None else mixed_pool(pot)
    tuples: List[Tuple[Word, ...]] = []
    for total in range(3, arity + 1):
        tuples.extend(cartesian(v_words(pot), repeat=total))
    for _ in range(samples if arity >= 3 else 0):
        total = rng.randint(3, arity)
        tuples.append(tuple(rng.choice(pool) for _ in range(total)))
    for words in tuples:
        residual = stasheff_residual(pot, words)
        if residual:
            return {'passed': False, 'checked': len(tuples),
                    'counterexample': (' , '.join(format_word(w) for w in words), format_element(residual))}
    return {'passed': True, 'checked': len(tuples), 'counterexample': None}


def check_products_on_vectors(pot: Potential, arity: int = None) -> Dict:
    """μ_n(v₁..v_n) = l_n/n!，严格单位性，二次势函数时 μ_{≥3} = 0"""
    arity = Config.DEFAULT_ARITY if arity is None else arity
    failures = []
    unit = {UNIT: Fraction(1)}
    for n in range(3, arity + 1):
        factorial_n = 1
        for t in range(2, n + 1):
            factorial_n *= t
        for indices in cartesian(range(pot.n), repeat=n):
            args = [ew_generator('g', i) for i in indices]
            value = mu(pot, args)
            expected = {((), (('u', j),)): c / factorial_n for j, c in l_k(pot, indices).coeffs.items()}
            if value != expected:
                failures.append(('l_n', indices, format_element(value)))
            if pot.is_quadratic() and value:
                failures.append(('quadratic', indices, format_element(value)))
        for slot in range(n):
            args = [ew_generator('g', 0)] * n
            args = args[:slot] + [unit] + args[slot + 1:]
            if mu(pot, args):
                failures.append(('unit', slot, n))
    return {'passed': not failures, 'failures': failures}


def check_associativity(pot: Potential, samples: int = None, seed: int = None) -> Dict:
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    pool = mixed_pool(pot) + [UNIT]
    ew, _ = ainfty_service.structures(pot)
    for _ in range(samples):
        a, b, c = ({rng.choice(pool): Fraction(rng.randint(1, 4))} for _ in range(3))
        lhs = ew.product(ew.product(a, b), c)
        rhs = ew.product(a, ew.product(b, c))
        if lhs != rhs:
            return {'passed': False, 'counterexample': tuple(format_element(x) for x in (a, b, c))}
    return {'passed': True, 'counterexample': None}


def check_multilinearity(pot: Potential, arity: int = 3, samples: int = None, seed: int = None) -> Dict:
    """μ_n(…, r·a_k, …) = r·μ_n(…)，r ∈ Sym(U)"""
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    for _ in range(samples):
        n = rng.randint(3, max(3, arity))
        args = [ew_generator('g', rng.randrange(pot.n)) for _ in range(n)]
        r = ew_generator('u', rng.randrange(pot.m))
        slot = rng.randrange(n)
        scaled = args[:slot] + [sym_mul(r, args[slot])] + args[slot + 1:]
        lhs = mu(pot, scaled)
        rhs = sym_mul(r, mu(pot, args))
        if lhs != rhs:
            return {'passed': False, 'counterexample': (slot, [format_element(a) for a in args])}
    return {'passed': True, 'counterexample': None}


def check_evaluators_agree(pot: Potential, arity: int = None, samples: int = None,
                           seed: int = None) -> Dict:
    """公式求值与平面树求值在 V-元组上逐一比较"""
    arity = Config.DEFAULT_ARITY if arity is None else arity
    samples = Config.RANDOM_SAMPLES if samples is None else samples
    rng = random.Random(Config.RANDOM_SEED if seed is None else seed)
    for _ in range(samples):
        n = rng.randint(3, max(3, arity))
        args = [ew_generator('g', rng.randrange(pot.n)) for _ in range(n)]
        a, b = mu(pot, args), mu_trees(pot, args)
        if a != b:
            return {'passed': False, 'checked': samples, 'counterexample': (format_element(a), format_element(b))}
    return {'passed': True, 'checked': samples, 'counterexample': None}
