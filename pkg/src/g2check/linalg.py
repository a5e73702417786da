"""Exact linear algebra over the rationals.

Thin wrappers around sympy's ``DomainMatrix`` (dense, gmpy2-backed ``QQ``)
that accept and return nested lists of :class:`~fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .scalars import frac

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def _dm(rows: Sequence[Sequence], ncols: int | None = None) -> DomainMatrix:
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    data = [[QQ(int(frac(x).numerator), int(frac(x).denominator)) for x in r] for r in rows]
    return DomainMatrix(data, (nrows, ncols), QQ)


def _back(M: DomainMatrix) -> Matrix:
    return [[frac(x) for x in row] for row in M.to_list()]


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return _dm(rows, ncols).rank()


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if not rows:
        return [], ()
    R, pivots = _dm(rows, ncols).rref()
    out = _back(R)[: len(pivots)]
    return out, tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -R[r][f]
        basis.append(v)
    return basis


def transpose(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def solve(rows: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> Vector | None:
    """One exact solution of A x = b, or ``None`` if inconsistent."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b[i]] for i, r in enumerate(rows)]
    if not aug:
        return [Fraction(0)] * ncols
    R, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, p in enumerate(pivots):
        x[p] = R[r][ncols]
    return x


def det(rows: Sequence[Sequence]) -> Fraction:
    if not rows:
        return Fraction(1)
    return frac(_dm(rows).det())


def inverse(rows: Sequence[Sequence]) -> Matrix:
    return _back(_dm(rows).inv())


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    return [[sum((frac(a) * frac(B[k][j]) for k, a in enumerate(row)), Fraction(0))
             for j in range(len(B[0]))] for row in A]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return [[frac(entries[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def span_equal(U: Sequence[Sequence], V: Sequence[Sequence], ncols: int) -> bool:
    """Exact equality of the row spans of U and V."""
    ru, rv = rank(U, ncols), rank(V, ncols)
    return ru == rv == rank(list(U) + list(V), ncols)


def in_span(U: Sequence[Sequence], v: Sequence, ncols: int) -> bool:
    return rank(list(U) + [list(v)], ncols) == rank(U, ncols)


def leading_minors(rows: Sequence[Sequence]) -> list[Fraction]:
    return [det([r[:k] for r in rows[:k]]) for k in range(1, len(rows) + 1)]
