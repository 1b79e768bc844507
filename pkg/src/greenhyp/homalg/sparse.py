"""Exact sparse linear algebra over the rationals.

Matrices are stored column-major as ``{col: {row: Fraction}}`` with zero
entries omitted.  All arithmetic is exact; there are no tolerances anywhere
in this module.  Rank and nullspace run a sparse fraction-free (Bareiss)
elimination over the integers with delayed division, after clearing row
denominators (row scaling changes neither rank nor nullspace).  Pivots are
picked by a lazy min-occupancy heap to limit fill.

Every elimination self-checks rank + nullity == number of columns.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class SparseMatrix:
    """A sparse matrix over Q with explicit shape."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int,
                 cols: dict[int, dict[int, Fraction]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: dict[int, dict[int, Fraction]] = cols if cols is not None else {}

    # -- construction -----------------------------------------------------

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "SparseMatrix":
        return SparseMatrix(nrows, ncols)

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        return SparseMatrix(n, n, {j: {j: ONE} for j in range(n)})

    @staticmethod
    def from_entries(nrows: int, ncols: int,
                     entries: Iterable[tuple[int, int, Fraction | int]]) -> "SparseMatrix":
        m = SparseMatrix(nrows, ncols)
        for i, j, v in entries:
            m.add_at(i, j, v)
        return m

    def copy(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols,
                            {j: dict(c) for j, c in self.cols.items()})

    # -- entry access ------------------------------------------------------

    def add_at(self, i: int, j: int, v: Fraction | int) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry ({i},{j}) outside {self.nrows}x{self.ncols}")
        if v == 0:
            return
        col = self.cols.setdefault(j, {})
        w = col.get(i, ZERO) + v
        if w == 0:
            del col[i]
            if not col:
                del self.cols[j]
        else:
            col[i] = Fraction(w)

    def at(self, i: int, j: int) -> Fraction:
        return self.cols.get(j, {}).get(i, ZERO)

    def entries(self) -> Iterator[tuple[int, int, Fraction]]:
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def is_zero(self) -> bool:
        return all(not c for c in self.cols.values())

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_shape(other)
        out = self.copy()
        for j, col in other.cols.items():
            for i, v in col.items():
                out.add_at(i, j, v)
        return out

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scaled(-1)

    def scaled(self, a: Fraction | int) -> "SparseMatrix":
        if a == 0:
            return SparseMatrix(self.nrows, self.ncols)
        a = Fraction(a)
        return SparseMatrix(self.nrows, self.ncols,
                            {j: {i: v * a for i, v in c.items()}
                             for j, c in self.cols.items()})

    def __neg__(self) -> "SparseMatrix":
        return self.scaled(-1)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ "
                             f"{other.nrows}x{other.ncols}")
        out_cols: dict[int, dict[int, Fraction]] = {}
        a_cols = self.cols
        for j, bcol in other.cols.items():
            acc: dict[int, Fraction] = {}
            for k, bv in bcol.items():
                acol = a_cols.get(k)
                if acol is None:
                    continue
                for i, av in acol.items():
                    w = acc.get(i, ZERO) + av * bv
                    if w == 0:
                        acc.pop(i, None)
                    else:
                        acc[i] = w
            if acc:
                out_cols[j] = acc
        return SparseMatrix(self.nrows, other.ncols, out_cols)

    def apply(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times sparse vector {row: value}."""
        acc: dict[int, Fraction] = {}
        for k, x in vec.items():
            col = self.cols.get(k)
            if col is None:
                continue
            for i, a in col.items():
                w = acc.get(i, ZERO) + a * x
                if w == 0:
                    acc.pop(i, None)
                else:
                    acc[i] = w
        return acc

    def transpose(self) -> "SparseMatrix":
        out: dict[int, dict[int, Fraction]] = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                out.setdefault(i, {})[j] = v
        return SparseMatrix(self.ncols, self.nrows, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return dict(self._normalized()) == dict(other._normalized())

    def _normalized(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        for j, col in self.cols.items():
            for i, v in col.items():
                if v != 0:
                    yield (i, j), v

    def _check_shape(self, other: "SparseMatrix") -> None:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")

    # -- slicing -----------------------------------------------------------

    def restrict(self, rows: list[int] | None = None,
                 cols: list[int] | None = None) -> "SparseMatrix":
        """Submatrix on the given row/column index lists (None = all)."""
        col_list = list(range(self.ncols)) if cols is None else list(cols)
        rmap = None if rows is None else {r: i for i, r in enumerate(rows)}
        out = SparseMatrix(self.nrows if rows is None else len(rows), len(col_list))
        for jnew, j in enumerate(col_list):
            col = self.cols.get(j)
            if not col:
                continue
            for i, v in col.items():
                if rmap is None:
                    out.add_at(i, jnew, v)
                elif i in rmap:
                    out.add_at(rmap[i], jnew, v)
        return out

    def row_support(self) -> set[int]:
        s: set[int] = set()
        for col in self.cols.values():
            s.update(col)
        return s

    def to_dense(self) -> list[list[Fraction]]:
        d = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            d[i][j] = v
        return d


# -- elimination ------------------------------------------------------------


def _integer_rows(m: SparseMatrix) -> list[dict[int, int]]:
    """Row-major integer copy; each row scaled by its lcm of denominators."""
    rows: list[dict[int, int]] = [dict() for _ in range(m.nrows)]
    for j, col in m.cols.items():
        for i, v in col.items():
            rows[i][j] = v
    out: list[dict[int, int]] = []
    for r in rows:
        if not r:
            out.append({})
            continue
        den = 1
        for v in r.values():
            den = den * v.denominator // gcd(den, v.denominator)
        out.append({j: int(v * den) for j, v in r.items()})
    return out


class Echelon:
    """Result of a fraction-free elimination."""

    def __init__(self, rank: int, pivots: list[tuple[int, int]],
                 rows: list[dict[int, int]], ncols: int):
        self.rank = rank
        self.pivots = pivots          # (row, col) in elimination order
        self.rows = rows              # integer echelon rows (scaled)
        self.ncols = ncols


def eliminate(m: SparseMatrix) -> Echelon:
    """Sparse fraction-free elimination over the integers.

    The update at pivot p is the two-term cross-multiplication
    ``row <- p * row - a * pivot_row`` followed by exact division of the row
    by the gcd of its entries; on rows that are updated at every step this
    recovers the Bareiss division, and it is exact unconditionally.  Pivot
    columns are drawn from a lazily-rescored min-occupancy heap, and within
    a column the shortest row wins.
    """
    rows = _integer_rows(m)
    col_occ: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for j in r:
            col_occ.setdefault(j, set()).add(i)
    active = [True] * len(rows)
    pivots: list[tuple[int, int]] = []
    heap = [(len(occ), j) for j, occ in col_occ.items()]
    heapq.heapify(heap)
    while heap:
        cnt, pj = heapq.heappop(heap)
        occ = col_occ.get(pj)
        if occ is None:
            continue
        live = [i for i in occ if active[i]]
        col_occ[pj] = occ = set(live)
        if not live:
            del col_occ[pj]
            continue
        if len(live) > cnt and heap and heap[0][0] < len(live):
            heapq.heappush(heap, (len(live), pj))
            continue
        pi = min(live, key=lambda i: len(rows[i]))
        prow = rows[pi]
        p = prow[pj]
        pivots.append((pi, pj))
        active[pi] = False
        for i in list(occ):
            if not active[i] or i == pi:
                continue
            r = rows[i]
            a = r.pop(pj)
            occ.discard(i)
            for j in r:
                if j not in prow:
                    r[j] = p * r[j]
            for j, pv in prow.items():
                if j == pj:
                    continue
                w = p * r.get(j, 0) - a * pv if j in r else -a * pv
                if w:
                    if j not in r:
                        jocc = col_occ.get(j)
                        if jocc is not None:
                            jocc.add(i)
                            heapq.heappush(heap, (len(jocc), j))
                        else:
                            col_occ[j] = {i}
                            heapq.heappush(heap, (1, j))
                    r[j] = w
                elif j in r:
                    del r[j]
                    col_occ[j].discard(i)
            if r:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    for j in r:
                        r[j] //= g
        del col_occ[pj]
    rank_ = len(pivots)
    return Echelon(rank_, pivots, rows, m.ncols)


def rank(m: SparseMatrix) -> int:
    ech = eliminate(m)
    assert 0 <= ech.rank <= min(m.nrows, m.ncols)
    return ech.rank


def nullspace(m: SparseMatrix) -> list[dict[int, Fraction]]:
    """Exact basis of ker(m), as sparse {index: Fraction} vectors."""
    ech = eliminate(m)
    piv_cols = {j for (_, j) in ech.pivots}
    free_cols = [j for j in range(m.ncols) if j not in piv_cols]
    piv_rows = [(pj, {j: Fraction(v) for j, v in ech.rows[pi].items()})
                for (pi, pj) in ech.pivots]
    basis = []
    for f in free_cols:
        vec: dict[int, Fraction] = {f: ONE}
        for pj, row in reversed(piv_rows):
            s = ZERO
            for j, v in row.items():
                if j == pj:
                    continue
                x = vec.get(j)
                if x is not None:
                    s += v * x
            if s != 0:
                vec[pj] = -s / row[pj]
        basis.append(vec)
    assert len(basis) + ech.rank == m.ncols
    return basis


def solve(m: SparseMatrix, rhs: dict[int, Fraction]) -> dict[int, Fraction] | None:
    """One exact solution of m x = rhs, or None if inconsistent."""
    aug = SparseMatrix(m.nrows, m.ncols + 1,
                       {j: dict(c) for j, c in m.cols.items()})
    for i, v in rhs.items():
        aug.add_at(i, m.ncols, v)
    for vec in nullspace(aug):
        t = vec.get(m.ncols, ZERO)
        if t != 0:
            return {j: -v / t for j, v in vec.items() if j != m.ncols and v != 0}
    if not rhs:
        return {}
    return None


def rank_mod_p(m: SparseMatrix, p: int) -> int:
    """Rank of m reduced mod a prime p (a certified lower bound for rank)."""
    rows: list[dict[int, int]] = [dict() for _ in range(m.nrows)]
    for j, col in m.cols.items():
        for i, v in col.items():
            den = v.denominator % p
            if den == 0:
                raise ValueError("denominator divisible by p")
            w = (v.numerator % p) * pow(den, p - 2, p) % p
            if w:
                rows[i][j] = w
    rk = 0
    col_of: dict[int, dict[int, int]] = {}   # pivot col -> its reduced row
    for r in rows:
        r = dict(r)
        while r:
            j = min(r)
            if j in col_of:
                prow = col_of[j]
                a = r.pop(j)
                for jj, pv in prow.items():
                    if jj == j:
                        continue
                    w = (r.get(jj, 0) - a * pv) % p
                    if w:
                        r[jj] = w
                    else:
                        r.pop(jj, None)
            else:
                inv = pow(r[j], p - 2, p)
                col_of[j] = {jj: v * inv % p for jj, v in r.items()}
                rk += 1
                break
    return rk
