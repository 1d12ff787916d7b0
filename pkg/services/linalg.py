"""
有理数/整数上的精确线性代数（sympy DomainMatrix）
"""

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from services.exact_algebra import to_scalar


def _qq(value) -> object:
    c = to_scalar(value)
    return QQ(c.numerator, c.denominator)


def qq_matrix(rows: Sequence[Sequence], ncols: int = None) -> DomainMatrix:
    """由 Fraction/int 二维列表构造 QQ 矩阵（允许 0 行）"""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[_qq(x) for x in r] for r in rows], (len(rows), ncols), QQ)


def zz_matrix(rows: Sequence[Sequence[int]], ncols: int = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], (len(rows), ncols), ZZ)


def to_fraction_rows(matrix: DomainMatrix) -> List[List[Fraction]]:
    return [[to_scalar(x) for x in row] for row in matrix.to_list()]


def to_int_rows(matrix: DomainMatrix) -> List[List[int]]:
    return [[int(x) for x in row] for row in matrix.to_list()]


def rank(rows: Sequence[Sequence], ncols: int = None) -> int:
    if not rows:
        return 0
    m = qq_matrix(rows, ncols)
    if m.shape[1] == 0:
        return 0
    return m.rank()


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """{x : A x = 0} 的一组基（行向量列表）"""
    if ncols == 0:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    kernel = qq_matrix(rows, ncols).nullspace()
    return [[to_scalar(x) for x in row] for row in kernel.to_list()]


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> Optional[List[Fraction]]:
    """求 A x = b 的一个特解，无解返回 None"""
    nrows = len(rows)
    if nrows == 0:
        return [Fraction(0)] * ncols
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = qq_matrix(augmented, ncols + 1).rref()
    if ncols in pivots:
        return None
    values = reduced.to_list()
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = to_scalar(values[i][ncols])
    return x


def inverse(rows: Sequence[Sequence]) -> List[List[Fraction]]:
    m = qq_matrix(rows)
    return [[to_scalar(x) for x in row] for row in m.inv().to_list()]


def matrix_from_images(images: Sequence[Dict[Hashable, Fraction]],
                       target_basis: Sequence[Hashable]) -> List[List[Fraction]]:
    """列 j = 第 j 个源基元的像（稀疏字典），按 target_basis 排行"""
    index = {b: i for i, b in enumerate(target_basis)}
    rows = [[Fraction(0)] * len(images) for _ in target_basis]
    for j, image in enumerate(images):
        for key, c in image.items():
            if not c:
                continue
            if key not in index:
                raise KeyError(key)
            rows[index[key]][j] += c
    return rows


def compose(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List[Fraction]]:
    """矩阵乘积 a·b"""
    ncols = len(b[0]) if b else 0
    if not a or not b or ncols == 0:
        return [[Fraction(0)] * ncols for _ in a]
    return to_fraction_rows(qq_matrix(a) * qq_matrix(b))


def is_zero_matrix(rows: Sequence[Sequence]) -> bool:
    return all(not x for row in rows for x in row)


class QuotientSpace:
    """span(keys) / span(relations) 的标准形：靠后的键优先作主元，余下的键组成商空间的基"""

    def __init__(self, keys: Sequence[Hashable], relations: Sequence[Dict[Hashable, Fraction]] = ()):
        self.keys = list(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        rows = [self.vector(r) for r in relations]
        order = list(range(len(self.keys)))[::-1]
        self.relations: List[List[Fraction]] = []
        self.pivots: List[int] = []
        if rows and self.keys:
            permuted = [[row[i] for i in order] for row in rows]
            reduced, pivots = qq_matrix(permuted, len(order)).rref()
            values = to_fraction_rows(reduced)
            for r, p in enumerate(pivots):
                relation = [Fraction(0)] * len(order)
                for col, i in enumerate(order):
                    relation[i] = values[r][col]
                self.relations.append(relation)
                self.pivots.append(order[p])
        pivot_set = set(self.pivots)
        self.basis = [k for i, k in enumerate(self.keys) if i not in pivot_set]
        self._basis_index = [self.index[k] for k in self.basis]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vector(self, element: Dict[Hashable, Fraction]) -> List[Fraction]:
        vec = [Fraction(0)] * len(self.keys)
        for key, c in element.items():
            vec[self.index[key]] += c
        return vec

    def reduce(self, element: Dict[Hashable, Fraction]) -> List[Fraction]:
        """标准形在 self.basis 上的坐标；未知键抛 KeyError"""
        vec = self.vector(element)
        for relation, p in zip(self.relations, self.pivots):
            c = vec[p]
            if c:
                vec = [a - c * b for a, b in zip(vec, relation)]
        return [vec[i] for i in self._basis_index]
