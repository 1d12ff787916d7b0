"""
有限生成阿贝尔群（Smith 标准形求余核）、A-次数、双次数与半群 𝒜 的窗口成员判定
"""

import re
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from config import Config
from services.errors import InputError
from services.linalg import to_int_rows, zz_matrix

# 半群判定标签
PROVED_IN = 'proved-in'
PROVED_OUT = 'proved-out'
UNKNOWN = 'unknown-within-bound'


class AbelianGroup:
    """ℤ^r ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_t，附带从环境 ℤ^k 出发的投影"""

    def __init__(self, rank: int, torsion: Sequence[int] = (),
                 projection: Sequence[Sequence[int]] = None, ambient_rank: int = None):
        torsion = tuple(int(d) for d in torsion)
        if any(d <= 1 for d in torsion):
            raise InputError(f"挠不变量必须大于 1: {torsion}")
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise InputError(f"挠不变量不满足整除链: {torsion}")
        self.rank = rank
        self.torsion = torsion
        self.ambient_rank = ambient_rank if ambient_rank is not None else rank + len(torsion)
        if projection is None:
            projection = [[int(i == j) for j in range(self.ambient_rank)]
                          for i in range(rank + len(torsion))]
        self.projection = [list(map(int, row)) for row in projection]

    @property
    def ncoords(self) -> int:
        return self.rank + len(self.torsion)

    def normalize(self, coords: Sequence[int]) -> Tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.ncoords:
            raise InputError(f"次数 {coords} 的坐标个数与群 {self} 不符")
        free = coords[:self.rank]
        tors = tuple(c % d for c, d in zip(coords[self.rank:], self.torsion))
        return free + tors

    def element(self, coords: Sequence[int]) -> 'Degree':
        return Degree(self, coords)

    def zero(self) -> 'Degree':
        return Degree(self, (0,) * self.ncoords)

    def project(self, vector: Sequence[int]) -> 'Degree':
        """ℤ^k 中向量的类"""
        if len(vector) != self.ambient_rank:
            raise InputError(f"向量 {list(vector)} 不在 ℤ^{self.ambient_rank} 中")
        coords = [sum(p * v for p, v in zip(row, vector)) for row in self.projection]
        return Degree(self, coords)

    def unit_images(self) -> List['Degree']:
        return [self.project([int(i == j) for j in range(self.ambient_rank)])
                for i in range(self.ambient_rank)]

    def order_of_torsion(self) -> int:
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def same_as(self, other: 'AbelianGroup') -> bool:
        return self.rank == other.rank and self.torsion == other.torsion

    def __eq__(self, other):
        if not isinstance(other, AbelianGroup):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash((self.rank, self.torsion))

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append('Z')
        elif self.rank > 1:
            parts.append(f'Z^{self.rank}')
        parts.extend(f'Z/{d}' for d in self.torsion)
        return ' + '.join(parts) if parts else '0'

    def __repr__(self):
        return f"AbelianGroup({self})"


class Degree:
    """A 中的元素，保存标准形坐标"""

    __slots__ = ('group', 'coords')

    def __init__(self, group: AbelianGroup, coords: Sequence[int]):
        self.group = group
        self.coords = group.normalize(coords)

    def _check(self, other: 'Degree'):
        if not isinstance(other, Degree) or not self.group.same_as(other.group):
            raise InputError(f"次数不在同一个群中: {self} 与 {other}")

    def __add__(self, other: 'Degree') -> 'Degree':
        self._check(other)
        return Degree(self.group, [a + b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> 'Degree':
        return Degree(self.group, [-a for a in self.coords])

    def __sub__(self, other: 'Degree') -> 'Degree':
        return self + (-other)

    def __mul__(self, k: int) -> 'Degree':
        return Degree(self.group, [a * int(k) for a in self.coords])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def free(self) -> Tuple[int, ...]:
        return self.coords[:self.group.rank]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Degree):
            return NotImplemented
        return self.group.same_as(other.group) and self.coords == other.coords

    def __hash__(self):
        return hash((self.group.rank, self.group.torsion, self.coords))

    def __lt__(self, other: 'Degree') -> bool:
        return self.coords < other.coords

    def __str__(self):
        return format_degree(self)

    def __repr__(self):
        return f"Degree({self})"


class Bidegree:
    """(A-次数, 同调次数)"""

    __slots__ = ('degree', 'hom')

    def __init__(self, degree: Degree, hom: int):
        self.degree = degree
        self.hom = int(hom)

    def __add__(self, other: 'Bidegree') -> 'Bidegree':
        return Bidegree(self.degree + other.degree, self.hom + other.hom)

    def __neg__(self) -> 'Bidegree':
        return Bidegree(-self.degree, -self.hom)

    def __sub__(self, other: 'Bidegree') -> 'Bidegree':
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bidegree):
            return NotImplemented
        return self.degree == other.degree and self.hom == other.hom

    def __hash__(self):
        return hash((self.degree, self.hom))

    def __str__(self):
        return f"({self.degree}, {self.hom})"

    def __repr__(self):
        return f"Bidegree{self}"


def cokernel(rows: Sequence[Sequence[int]], ambient_rank: int = None) -> Tuple[AbelianGroup, callable]:
    """ℤ^k / span(rows)，返回群与投影函数"""
    rows = [list(map(int, r)) for r in rows]
    if ambient_rank is None:
        if not rows:
            raise InputError("空关系矩阵需要给出环境秩")
        ambient_rank = len(rows[0])
    if any(len(r) != ambient_rank for r in rows):
        raise InputError("关系向量长度不一致")
    k = ambient_rank
    if k == 0:
        group = AbelianGroup(0, (), [], 0)
        return group, group.project
    if not rows:
        group = AbelianGroup(k, (), None, k)
        return group, group.project
    # 列向量生成子群：M 为 k×c，D = S·M·T
    columns = [[rows[c][i] for c in range(len(rows))] for i in range(k)]
    diag, s, _ = smith_normal_decomp(zz_matrix(columns))
    d_rows = to_int_rows(diag)
    s_rows = to_int_rows(s)
    invariants = [abs(d_rows[i][i]) if i < len(d_rows[0]) else 0 for i in range(k)]
    torsion_rows, torsion = [], []
    free_rows = []
    for i, d in enumerate(invariants):
        if d == 1:
            continue
        if d == 0:
            free_rows.append(s_rows[i])
        else:
            torsion_rows.append(s_rows[i])
            torsion.append(d)
    free_rows = _canonical_free_rows(free_rows, k)
    order = sorted(range(len(torsion)), key=lambda i: torsion[i])
    torsion = [torsion[i] for i in order]
    torsion_rows = [torsion_rows[i] for i in order]
    group = AbelianGroup(len(free_rows), torsion, free_rows + torsion_rows, k)
    return group, group.project


def _canonical_free_rows(free_rows: List[List[int]], k: int) -> List[List[int]]:
    """自由部分投影的行 Hermite 标准形，使结果与 SNF 变换的选取无关"""
    if not free_rows:
        return []
    transposed = [[free_rows[r][i] for r in range(len(free_rows))] for i in range(k)]
    hnf = to_int_rows(hermite_normal_form(zz_matrix(transposed)))
    ncols = len(hnf[0]) if hnf else 0
    return [[hnf[i][j] for i in range(k)] for j in range(ncols)]


# ---- 字面量 ----

_DEGREE_RE = re.compile(r"^\[\s*([^|\]]*?)\s*(?:\|\s*([^\]]*?)\s*)?\]$")


def parse_degree(text: str, group: AbelianGroup) -> Degree:
    """`[a1,...,ar | t1,...,tk]`；秩 1 无挠时也接受裸整数"""
    text = text.strip()
    if re.fullmatch(r"[+-]?\d+", text):
        if group.ncoords != 1:
            raise InputError(f"整数次数 {text} 只适用于 ℤ 或循环群")
        return group.element([int(text)])
    m = _DEGREE_RE.match(text)
    if not m:
        raise InputError(f"无法解析的次数 {text!r}")
    free = [int(x) for x in m.group(1).split(',') if x.strip()]
    tors = [int(x) for x in (m.group(2) or '').split(',') if x.strip()]
    if len(free) != group.rank or len(tors) != len(group.torsion):
        raise InputError(f"次数 {text} 与群 {group} 不符")
    return group.element(free + tors)


def format_degree(degree: Degree) -> str:
    group = degree.group
    if not group.torsion and group.rank == 1:
        return str(degree.coords[0])
    free = ','.join(str(a) for a in degree.free)
    if not group.torsion:
        return f"[{free}]"
    tors = ','.join(str(t) for t in degree.coords[group.rank:])
    return f"[{free} | {tors}]"


def parse_group(text: str) -> AbelianGroup:
    """`Z`, `Z^2`, `Z + Z/2`, `0`"""
    text = text.strip()
    if text == '0':
        return AbelianGroup(0)
    rank, torsion = 0, []
    for part in text.split('+'):
        part = part.strip()
        m = re.fullmatch(r"Z(?:\^(\d+))?", part)
        if m:
            rank += int(m.group(1) or 1)
            continue
        m = re.fullmatch(r"Z/(\d+)", part)
        if not m:
            raise InputError(f"无法解析的群 {text!r}")
        torsion.append(int(m.group(1)))
    return AbelianGroup(rank, sorted(torsion))


# ---- 正权函数与 𝒜 ----

def weight_functional(alphas: Sequence[Degree], max_iter: int = 10000) -> Tuple[int, ...]:
    """找整数函数 w 使每个 α_i 的自由部分上 w(α_i) > 0（感知机迭代）"""
    if not alphas:
        return ()
    group = alphas[0].group
    vectors = [a.free for a in alphas]
    if any(not any(v) for v in vectors):
        raise InputError("存在自由部分为零的变量次数，A₊ ∩ (−A₊) 非空")
    w = [sum(col) for col in zip(*vectors)] if group.rank else []
    for _ in range(max_iter):
        bad = [v for v in vectors if sum(a * b for a, b in zip(w, v)) <= 0]
        if not bad:
            return tuple(w)
        w = [a + b for a, b in zip(w, bad[0])]
    raise InputError("找不到正权函数：变量次数不在一个开半空间中")


def weight(degree: Degree, w: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(degree.free, w))


def exponents_of_weight(w_values: Sequence[int], total: int) -> List[Tuple[int, ...]]:
    """Σ I_i·w_i = total 的全部非负指数向量（w_i > 0）"""
    if total < 0:
        return []
    if not w_values:
        return [()] if total == 0 else []
    head, rest = w_values[0], w_values[1:]
    out = []
    for a in range(total // head, -1, -1):
        for tail in exponents_of_weight(rest, total - a * head):
            out.append((a,) + tail)
    return out


def monomials_of_degree(alphas: Sequence[Degree], degree: Degree,
                        w: Sequence[int] = None) -> List[Tuple[int, ...]]:
    """A-次数恰为 degree 的单项式指数（按次数-字典序）"""
    if not alphas:
        return [()] if degree.is_zero() else []
    w = weight_functional(alphas) if w is None else w
    w_values = [weight(a, w) for a in alphas]
    candidates = exponents_of_weight(w_values, weight(degree, w))
    group = degree.group
    result = []
    for exp in candidates:
        total = group.zero()
        for a, alpha in zip(exp, alphas):
            if a:
                total = total + alpha * a
        if total == degree:
            result.append(exp)
    return sorted(result, key=lambda e: (sum(e), tuple(-a for a in e)))


def reachable_sums(alphas: Sequence[Degree], bound: int) -> List[set]:
    """reachable[t] = 恰好 t 个生成元之和的集合"""
    group = alphas[0].group
    layers = [{group.zero()}]
    for _ in range(bound):
        layers.append({d + a for d in layers[-1] for a in alphas})
    return layers


def semigroup_window_check(bidegree: Bidegree, alphas: Sequence[Degree],
                           shift: Optional[Bidegree] = None, bound: int = None) -> Dict:
    """判断 bidegree ∈ γ + 𝒜；𝒜 由 (−A₊,1)、(−A₊,0) 与 0 生成"""
    bound = Config.SEMIGROUP_BOUND if bound is None else bound
    target = bidegree if shift is None else bidegree - shift
    b, h = target.degree, target.hom
    if b.is_zero() and h == 0:
        return {'member': True, 'tag': PROVED_IN, 'witness': ()}
    if h < 0:
        return {'member': False, 'tag': PROVED_OUT, 'witness': None}
    if not alphas:
        return {'member': False, 'tag': PROVED_OUT, 'witness': None}
    need = max(h, 1)
    goal = -b
    # 有理松弛：找 y 使 y·α_i ≥ 0 而 y·goal < 0
    group = b.group
    functionals = []
    for i in range(group.rank):
        unit = [int(i == j) for j in range(group.rank)]
        functionals.extend([unit, [-x for x in unit]])
    try:
        w = weight_functional(alphas)
        functionals.append(list(w))
    except InputError:
        w = None
    for y in functionals:
        if all(sum(p * q for p, q in zip(y, a.free)) >= 0 for a in alphas) \
                and sum(p * q for p, q in zip(y, goal.free)) < 0:
            return {'member': False, 'tag': PROVED_OUT, 'witness': None}
    # 权函数给出生成元个数的上界
    max_count = None
    if w is not None:
        min_w = min(weight(a, w) for a in alphas)
        max_count = weight(goal, w) // min_w
        if max_count < need:
            return {'member': False, 'tag': PROVED_OUT, 'witness': None}
    limit = bound if max_count is None else min(bound, max_count)
    layers = reachable_sums(alphas, limit)
    for t in range(need, limit + 1):
        if goal in layers[t]:
            return {'member': True, 'tag': PROVED_IN, 'witness': _witness(alphas, goal, t)}
    if max_count is not None and max_count <= bound:
        return {'member': False, 'tag': PROVED_OUT, 'witness': None}
    return {'member': False, 'tag': UNKNOWN, 'witness': None}


def _witness(alphas: Sequence[Degree], goal: Degree, count: int) -> Tuple[int, ...]:
    """回溯出一个系数向量 c，Σc_iα_i = goal 且 Σc = count"""
    n = len(alphas)

    def search(i: int, remaining: int, current: Degree):
        if i == n - 1:
            return (remaining,) if current + alphas[i] * remaining == goal else None
        for c in range(remaining, -1, -1):
            found = search(i + 1, remaining - c, current + alphas[i] * c)
            if found is not None:
                return (c,) + found
        return None

    return search(0, count, goal.group.zero())


def check_positive_cone(alphas: Sequence[Degree], bound: int = None) -> bool:
    """A₊ ∩ (−A₊) = ∅ 的窗口检查：非空非负组合不为零"""
    bound = Config.SEMIGROUP_BOUND if bound is None else bound
    if not alphas:
        return True
    layers = reachable_sums(alphas, bound)
    zero = alphas[0].group.zero()
    return all(zero not in layer for layer in layers[1:])
