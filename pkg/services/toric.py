"""
扇的读入与校验、由除子正合列得到的分次群 A 与变量次数、极小无关子集 Γ、
Calabi-Yau 次数检查以及厚子范畴生成元报告
"""

from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np

from config import Config
from services import linalg
from services.bgg import (
    ExteriorQuotientModule, WindowedComplex, counit_window, cyclic_module, functor_G,
)
from services.console import status
from services.errors import InputError
from services.exact_algebra import Polynomial
from services.grading import AbelianGroup, Bidegree, Degree, cokernel
from services.koszul import Potential, QuotientComponent, degrees_up_to

HOLDS = 'holds-in-window'
FAILS = 'fails'
UNKNOWN = 'unknown'


class Fan:
    """完备扇：格秩、本原射线、极大锥（射线下标集合，从 0 开始）"""

    def __init__(self, rank: int, rays: Sequence[Sequence[int]], max_cones: Sequence[Sequence[int]],
                 name: str = ''):
        self.name = name
        self.rank = int(rank)
        if self.rank < 1:
            raise InputError(f"格秩必须为正: {rank}")
        for r, ray in enumerate(rays, start=1):
            if len(ray) != self.rank:
                raise InputError(f"射线 ρ{r} = {list(ray)} 的长度不是 {self.rank}")
        if not rays:
            raise InputError("扇至少需要一条射线")
        self.rays = np.array([list(r) for r in rays], dtype=np.int64)
        self.max_cones = [tuple(sorted(set(int(i) for i in cone))) for cone in max_cones]
        self._validate()

    def _validate(self):
        for r, ray in enumerate(self.rays, start=1):
            if not ray.any():
                raise InputError(f"射线 ρ{r} 为零向量")
            if int(np.gcd.reduce(np.abs(ray))) != 1:
                raise InputError(f"射线 ρ{r} = {self.ray(r - 1)} 不是本原向量")
        if not self.max_cones:
            raise InputError("扇至少需要一个极大锥")
        for c, cone in enumerate(self.max_cones, start=1):
            if not cone:
                raise InputError(f"极大锥 σ{c} 为空")
            if any(not 0 <= i < self.nrays for i in cone):
                raise InputError(f"极大锥 σ{c} 引用了不存在的射线")
        for a, b in combinations(range(len(self.max_cones)), 2):
            sa, sb = set(self.max_cones[a]), set(self.max_cones[b])
            if sa <= sb or sb <= sa:
                raise InputError(f"极大锥 σ{a + 1} 与 σ{b + 1} 互相包含")
        covered = set(i for cone in self.max_cones for i in cone)
        missing = [i + 1 for i in range(self.nrays) if i not in covered]
        if missing:
            raise InputError(f"射线 {missing} 不在任何极大锥中")
        if linalg.rank(self.rays.tolist(), self.rank) != self.rank:
            raise InputError("射线不张成 N_ℝ，扇不是完备的")

    @property
    def nrays(self) -> int:
        return int(self.rays.shape[0])

    def ray(self, i: int) -> List[int]:
        return [int(x) for x in self.rays[i]]

    def in_some_cone(self, subset: Sequence[int]) -> bool:
        s = set(subset)
        return any(s <= set(cone) for cone in self.max_cones)

    def __repr__(self):
        return f"Fan({self.name or self.nrays})"


def grading_from_fan(fan: Fan) -> Tuple[AbelianGroup, List[Degree]]:
    """A = coker(M → ℤ^{Σ(1)}, m ↦ (⟨m, n_ρ⟩)_ρ)，α_ρ 为第 ρ 个单位向量的像"""
    rows = fan.rays.T.tolist()
    group, _ = cokernel(rows, fan.nrays)
    group = _orient(group)
    degrees = group.unit_images()
    status(f"📊 A = {group}，{fan.nrays} 个变量次数")
    return group, degrees


def _orient(group: AbelianGroup) -> AbelianGroup:
    """自由坐标取使射线次数之和非负的方向"""
    projection = []
    for i, row in enumerate(group.projection):
        if i < group.rank and sum(row) < 0:
            row = [-x for x in row]
        projection.append(row)
    return AbelianGroup(group.rank, group.torsion, projection, group.ambient_rank)


def check_exact_sequence(fan: Fan, degrees: Sequence[Degree]) -> bool:
    """对每个格基向量 m：Σ_ρ ⟨m, n_ρ⟩·α_ρ = 0"""
    zero = degrees[0].group.zero()
    for m in range(fan.rank):
        total = zero
        for rho in range(fan.nrays):
            total = total + degrees[rho] * int(fan.rays[rho, m])
        if total != zero:
            return False
    return True


def irrelevant_monomials(fan: Fan) -> List[Tuple[int, ...]]:
    """无关理想 B 的生成元 x^σ̂ = Π_{ρ∉σ} x_ρ 的指数"""
    return [tuple(int(i not in cone) for i in range(fan.nrays)) for cone in fan.max_cones]


def irrelevant_components(fan: Fan) -> List[Tuple[int, ...]]:
    """按大小广度优先，取不含于任何极大锥的极小子集 Γ"""
    if fan.nrays > Config.GAMMA_RAY_CAP:
        raise InputError(f"射线数 {fan.nrays} 超过上限 {Config.GAMMA_RAY_CAP}")
    found: List[Tuple[int, ...]] = []
    memo: Dict[Tuple[int, ...], bool] = {}
    for size in range(1, fan.nrays + 1):
        for subset in combinations(range(fan.nrays), size):
            if any(set(g) <= set(subset) for g in found):
                continue
            inside = memo.get(subset)
            if inside is None:
                inside = memo[subset] = fan.in_some_cone(subset)
            if not inside:
                found.append(subset)
    return found


def check_minimality(fan: Fan, gamma: Sequence[int]) -> bool:
    """去掉任一元素后的子集都落在某个极大锥中"""
    return len(gamma) >= 2 and not fan.in_some_cone(gamma) and all(
        fan.in_some_cone([g for g in gamma if g != drop]) for drop in gamma)


def format_gamma(gamma: Sequence[int]) -> str:
    return '{' + ','.join(str(i + 1) for i in gamma) + '}'


# ---- L_Γ、V_Γ 与 Koszul 复形 ----

def l_gamma(pot: Potential, gamma: Sequence[int]) -> List[Polynomial]:
    """L_Γ = span{x_ρ : ρ ∈ Γ} ⊂ V*"""
    return [Polynomial.variable('V*', pot.n, i) for i in gamma]


def v_gamma(pot: Potential, gamma: Sequence[int]) -> List[Polynomial]:
    """V_Γ = L_Γ 的零化子 = span{e_ρ : ρ ∉ Γ}"""
    return [Polynomial.variable('V', pot.n, i) for i in range(pot.n) if i not in gamma]


def koszul_complex_gamma(pot: Potential, gamma: Sequence[int]) -> WindowedComplex:
    """(Λ(L_Γ)⊗S_W, d_Kos)：x_S ⊗ f 位于 (Σ_{ρ∈S}α_ρ + deg f, −|S|)"""
    gamma = tuple(sorted(gamma))
    quotients: Dict[Degree, QuotientComponent] = {}

    def sw(degree: Degree) -> QuotientComponent:
        if degree not in quotients:
            quotients[degree] = QuotientComponent(pot, degree)
        return quotients[degree]

    def subset_degree(subset) -> Degree:
        total = pot.group.zero()
        for i in subset:
            total = total + pot.alphas[i]
        return total

    def basis(degree: Degree, i: int):
        keys = []
        if i > 0 or -i > len(gamma):
            return keys
        for subset in combinations(gamma, -i):
            rest = degree - subset_degree(subset)
            keys.extend((subset, e) for e in sw(rest).basis)
        return keys

    def differential(key):
        subset, e = key
        out: Dict = {}
        for q, rho in enumerate(subset):
            sign = -1 if q % 2 else 1
            moved = tuple(a + (i == rho) for i, a in enumerate(e))
            comp = sw(pot.x_degree(moved))
            rest = subset[:q] + subset[q + 1:]
            for e2, c in zip(comp.basis, comp.reduce(Polynomial.monomial('V*', moved))):
                if c:
                    out[(rest, e2)] = out.get((rest, e2), 0) + sign * c
        return {k: c for k, c in out.items() if c}

    return WindowedComplex(f"Kos({format_gamma(gamma)})", basis, differential)


def compare_exterior_koszul(pot: Potential, gamma: Sequence[int], depth: int = None,
                            hom_range: Tuple[int, int] = None) -> Dict:
    """𝓖(Λ(V/V_Γ)) 在 (γ, i) 与 Koszul 复形在 (−γ, −i) 的维数、微分秩逐块比较"""
    depth = 3 if depth is None else depth
    hom_range = (0, len(gamma)) if hom_range is None else hom_range
    g_complex = functor_G(ExteriorQuotientModule(pot, gamma))
    k_complex = koszul_complex_gamma(pot, gamma)
    rows = []
    for bideg in counit_window(pot, depth, hom_range):
        dual = Bidegree(-bideg.degree, -bideg.hom)
        below = Bidegree(dual.degree, dual.hom - 1)
        rows.append((bideg, g_complex.dimension(bideg), k_complex.dimension(dual),
                     g_complex.rank(bideg), k_complex.rank(below)))
    mismatch = next((r for r in rows if r[1] != r[2] or r[3] != r[4]), None)
    return {'passed': mismatch is None, 'table': rows, 'counterexample': mismatch}


# ---- Calabi-Yau 与原点支撑 ----

def cy_check(alphas: Sequence[Degree], betas: Sequence[Degree]) -> Dict:
    """Σβ_j = Σα_i 在 A 中精确比较，不等时给出差 Σβ − Σα"""
    if not alphas or not betas:
        raise InputError("CY 检查需要非空的变量次数与方程次数")
    group = alphas[0].group
    if any(not d.group.same_as(group) for d in list(alphas) + list(betas)):
        raise InputError("次数不在同一个群中")
    total = group.zero()
    for b in betas:
        total = total + b
    for a in alphas:
        total = total - a
    return {'holds': total.is_zero(), 'witness': None if total.is_zero() else total}


def origin_support(pot: Potential, gammas: Sequence[Sequence[int]], depth: int = None) -> Dict:
    """Z(J) ∩ V(B) 是否只在原点：逐个坐标层 V(Γ) 看 S_W/(x_Γ) 的窗口维数"""
    pot.require_graded()
    depth = Config.DEFAULT_DEPTH if depth is None else depth
    band = max(pot.weight_of(a) for a in pot.alphas)
    strata = []
    for gamma in gammas:
        free = [i for i in range(pot.n) if i not in gamma]
        restricted = []
        for wj in pot.components:
            kept = {e: c for e, c in wj.terms.items() if not any(e[i] for i in gamma)}
            if kept:
                restricted.append(kept)
        if len(free) > len(restricted):
            strata.append((tuple(gamma), FAILS))
            continue
        module = cyclic_module(pot, l_gamma(pot, gamma), name="S_W/(x_Γ)")
        top = [d for d in degrees_up_to(pot, depth) if pot.weight_of(d) > depth - band]
        if top and all(module.dimension(d, 0) == 0 for d in top):
            strata.append((tuple(gamma), HOLDS))
        else:
            strata.append((tuple(gamma), UNKNOWN))
    tags = [t for _, t in strata]
    verdict = FAILS if FAILS in tags else (UNKNOWN if UNKNOWN in tags else HOLDS)
    return {'verdict': verdict, 'strata': strata}


def thick_subcategory_generators(fan: Fan, pot: Potential, mode: str = 'sheaves',
                                 check_origin: bool = False, depth: int = None) -> Dict:
    """sheaves：每个 Γ 给出 Λ(V/V_Γ) 与其 𝓖-像 (Λ(L_Γ)⊗S_W, d_Kos)；singularities：k 的全部 A-平移"""
    if mode not in ('sheaves', 'singularities'):
        raise InputError(f"未知模式 {mode!r}，应为 sheaves 或 singularities")
    gammas = irrelevant_components(fan)
    report: Dict = {'mode': mode, 'generators': []}
    if mode == 'sheaves':
        for gamma in gammas:
            kept = {exp.index(1) for v in v_gamma(pot, gamma) for exp in v.terms}
            quotient = [i for i in range(pot.n) if i not in kept]
            report['generators'].append({
                'gamma': gamma,
                'module': ExteriorQuotientModule(pot, quotient, name=f"Λ(V/V_{format_gamma(gamma)})"),
                'quotient_basis': [f"e{i + 1}" for i in quotient],
                'koszul': koszul_complex_gamma(pot, gamma),
            })
    else:
        report['generators'].append({'module': 'k', 'shifts': 'A'})
    if check_origin:
        report['origin'] = origin_support(pot, gammas, depth)
    return report
