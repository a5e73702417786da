"""Nilpotent Lie algebras, their Chevalley-Eilenberg complex and cohomology."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from . import linalg
from .exterior import (ExteriorForm, basis_masks, derivation_d, indices, monomial, parse_form,
                       pullback_linear, format_form)

__all__ = [
    "LieAlgebraSpec",
    "Cohomology",
    "STRUCTURE_EQUATIONS",
    "nilpotent_algebra",
    "abelian_algebra",
    "parse_structure",
    "ce_cohomology",
    "invariant_cohomology",
    "invariant_subcomplex_cohomology",
    "class_action_matrix",
    "poincare_pairing",
    "euler_characteristic",
    "betti_numbers",
    "diagonal_action",
    "RHO_SIGNS",
]

STRUCTURE_EQUATIONS = """\
de^1 = 0
de^2 = 0
de^3 = 0
de^4 = e^{12}
de^5 = e^{13}
de^6 = e^{14}
de^7 = e^{15}
"""

_LINE = re.compile(r"^\s*de\^\{?(\d+)\}?\s*=\s*(.+?)\s*$")


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Structure equations ``d e^i`` of a Lie algebra on its dual basis."""

    n: int
    de: tuple[ExteriorForm, ...]
    name: str = "g"

    def __post_init__(self):
        if len(self.de) != self.n:
            raise ValueError("need one differential per basis 1-form")
        for i, f in enumerate(self.de):
            if f and f.degree != 2:
                raise ValueError(f"d e^{i + 1} must be a 2-form")

    def d(self, a: ExteriorForm) -> ExteriorForm:
        return derivation_d(a, self.de)

    def jacobi_defects(self) -> list[int]:
        """Indices i with d(d e^i) != 0 (empty iff the Jacobi identity holds)."""
        return [i + 1 for i, f in enumerate(self.de) if self.d(f)]

    def is_lie(self) -> bool:
        return not self.jacobi_defects()

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        """c_ij^k with [e_i, e_j] = Σ_k c_ij^k e_k, using d e^k(e_i, e_j) = -e^k([e_i, e_j])."""
        if i == j:
            return Fraction(0)
        lo, hi = min(i, j), max(i, j)
        c = -self.de[k - 1].coefficient((lo, hi))
        return c if i < j else -c

    def bracket(self, i: int, j: int) -> list[Fraction]:
        return [self.structure_constant(i, j, k) for k in range(1, self.n + 1)]

    def d_matrix(self, k: int) -> list[list[Fraction]]:
        """Matrix of d: Λ^k → Λ^{k+1} in the bitmask-ordered bases (rows = target)."""
        src, tgt = basis_masks(self.n, k), basis_masks(self.n, k + 1)
        pos = {m: r for r, m in enumerate(tgt)}
        M = [[Fraction(0)] * len(src) for _ in tgt]
        for c, m in enumerate(src):
            for mm, v in self.d(ExteriorForm(self.n, {m: 1})).terms.items():
                M[pos[mm]][c] = v
        return M

    def describe(self) -> str:
        return "\n".join(f"de^{i + 1} = {format_form(f)}" for i, f in enumerate(self.de))


def parse_structure(text: str, name: str = "g") -> LieAlgebraSpec:
    """Read lines ``de^i = <2-form>``; other non-blank lines are rejected."""
    found: dict[int, str] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _LINE.match(line)
        if not mt:
            raise ValueError(f"cannot parse structure equation: {line!r}")
        found[int(mt.group(1))] = mt.group(2)
    n = max(found) if found else 0
    if sorted(found) != list(range(1, n + 1)):
        raise ValueError("structure equations must cover de^1..de^n")
    return LieAlgebraSpec(n, tuple(parse_form(found[i], n) for i in range(1, n + 1)), name)


def nilpotent_algebra() -> LieAlgebraSpec:
    return parse_structure(STRUCTURE_EQUATIONS, "g")


def abelian_algebra(n: int = 7) -> LieAlgebraSpec:
    return LieAlgebraSpec(n, tuple(ExteriorForm(n) for _ in range(n)), f"R^{n}")


@dataclass(frozen=True)
class Cohomology:
    """H^k of a cochain subcomplex of Λ^k, with normal-form representatives.

    ``boundary_rref``/``boundary_pivots`` describe B^k; every representative
    vanishes on the B-pivots, so class coordinates of a cocycle are read off
    after reduction modulo B.
    """

    n: int
    k: int
    representatives: tuple[ExteriorForm, ...]
    rep_rows: tuple[tuple[Fraction, ...], ...]
    rep_pivots: tuple[int, ...]
    boundary_rref: tuple[tuple[Fraction, ...], ...]
    boundary_pivots: tuple[int, ...]
    cocycle_rows: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    @staticmethod
    def _eliminate(v: list, rows, pivots) -> list:
        """Clear the pivot columns of ``v`` using sparse echelon rows."""
        for row, p in zip(rows, pivots):
            c = v[p]
            if c:
                for i, x in row:
                    v[i] -= c * x
        return v

    @cached_property
    def _sparse(self):
        sp = lambda rows: [[(i, x) for i, x in enumerate(r) if x] for r in rows]
        zp = [next(i for i, x in enumerate(r) if x) for r in self.cocycle_rows]
        return sp(self.boundary_rref), sp(self.rep_rows), sp(self.cocycle_rows), zp

    def _reduce(self, v: list[Fraction]) -> list[Fraction]:
        return self._eliminate(list(v), self._sparse[0], self.boundary_pivots)

    def is_cocycle(self, a: ExteriorForm) -> bool:
        v = self._eliminate(a.vector(self.k), self._sparse[2], self._sparse[3])
        return not any(v)

    def class_of(self, a: ExteriorForm) -> list[Fraction]:
        """Coordinates of [a] in the representative basis; ``a`` must be a cocycle."""
        if a.is_zero():
            return [Fraction(0)] * self.dim
        if a.degree != self.k:
            raise ValueError("degree mismatch")
        if not self.is_cocycle(a):
            raise ValueError(f"{format_form(a)} is not a cocycle of this complex")
        r = self._reduce(a.vector(self.k))
        coords = [r[p] for p in self.rep_pivots]
        if any(self._eliminate(r, self._sparse[1], self.rep_pivots)):
            raise ValueError("cocycle not in the span of the representatives")
        return coords

    def is_exact(self, a: ExteriorForm) -> bool:
        return not any(self.class_of(a))

    def form_of(self, coords: Sequence) -> ExteriorForm:
        out = ExteriorForm(self.n)
        for c, rep in zip(coords, self.representatives):
            if c:
                out = out + rep.scale(c)
        return out


def _vec_to_form(n: int, k: int, v: Sequence) -> ExteriorForm:
    return ExteriorForm(n, {m: c for m, c in zip(basis_masks(n, k), v) if c})


def _cohomology(n: int, k: int, cocycles: list, boundaries: list) -> Cohomology:
    size = len(basis_masks(n, k))
    B, bp = linalg.rref(boundaries, size) if boundaries else ([], ())
    reduced = []
    for z in cocycles:
        z = list(z)
        for row, p in zip(B, bp):
            if z[p]:
                c = z[p]
                z = [a - c * b for a, b in zip(z, row)]
        if any(z):
            reduced.append(z)
    R, rp = linalg.rref(reduced, size) if reduced else ([], ())
    reps = tuple(_vec_to_form(n, k, r) for r in R)
    Z = [tuple(z) for z in (linalg.rref(cocycles, size)[0] if cocycles else [])]
    return Cohomology(n, k, reps, tuple(tuple(r) for r in R), tuple(rp),
                      tuple(tuple(r) for r in B), tuple(bp), tuple(Z))


def ce_cohomology(spec: LieAlgebraSpec, k: int) -> Cohomology:
    """H^k of the Chevalley-Eilenberg complex with deterministic representatives."""
    if not spec.is_lie():
        raise ValueError(f"Jacobi identity fails at d e^{spec.jacobi_defects()}")
    n = spec.n
    size = len(basis_masks(n, k))
    if k < 0 or k > n:
        return _cohomology(n, max(0, min(k, n)), [], [])
    Dk = spec.d_matrix(k) if k < n else []
    Z = linalg.nullspace(Dk, size) if k < n else linalg.identity(size)
    boundaries = linalg.transpose(spec.d_matrix(k - 1)) if k > 0 else []
    return _cohomology(n, k, Z, [b for b in boundaries if any(b)])


def _action_matrix_on(n: int, k: int, A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Matrix of the induced map on Λ^k (columns = images of basis monomials)."""
    masks = basis_masks(n, k)
    cols = [pullback_linear(A, ExteriorForm(n, {m: 1})).vector(k) for m in masks]
    return linalg.transpose(cols, len(masks)) if cols else []


def _check_commutes(spec: LieAlgebraSpec, A: Sequence[Sequence]) -> None:
    for i in range(1, spec.n + 1):
        e = monomial(spec.n, [i])
        if pullback_linear(A, spec.d(e)) != spec.d(pullback_linear(A, e)):
            raise ValueError(f"action does not commute with d on e^{i}")


def class_action_matrix(spec: LieAlgebraSpec, H: Cohomology, A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Matrix of the induced map on H^k in the representative basis (columns = images)."""
    cols = [H.class_of(pullback_linear(A, r)) for r in H.representatives]
    return linalg.transpose(cols, H.dim) if cols else []


def invariant_cohomology(spec: LieAlgebraSpec, k: int, actions: Sequence[Sequence[Sequence]]) -> Cohomology:
    """Invariant part of H^k under the coframe maps ``actions`` (e^i ↦ Σ A_ij e^j).

    Invariant classes are found as the common fixed space of the induced
    action on H^k; representatives come from the invariant subcomplex and the
    two descriptions are cross-checked.
    """
    for A in actions:
        _check_commutes(spec, A)
    H = ce_cohomology(spec, k)
    if H.dim:
        rows = []
        for A in actions:
            C = class_action_matrix(spec, H, A)
            rows += [[C[i][j] - (1 if i == j else 0) for j in range(H.dim)] for i in range(H.dim)]
        fixed = linalg.nullspace(rows, H.dim)
    else:
        fixed = []
    Hinv = invariant_subcomplex_cohomology(spec, k, actions)
    if Hinv.dim != len(fixed):
        raise AssertionError("class-level and subcomplex invariant cohomology disagree")
    for rep in Hinv.representatives:
        c = H.class_of(rep)
        if fixed and not linalg.in_span(fixed, c, H.dim):
            raise AssertionError("invariant representative outside the fixed class space")
    return Hinv


def invariant_subcomplex_cohomology(spec: LieAlgebraSpec, k: int, actions) -> Cohomology:
    n = spec.n
    size = len(basis_masks(n, k))

    def invariants(deg: int) -> list[list[Fraction]]:
        dim = len(basis_masks(n, deg))
        rows = []
        for A in actions:
            M = _action_matrix_on(n, deg, A)
            rows += [[M[i][j] - (1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        return linalg.nullspace(rows, dim) if rows else linalg.identity(dim)

    inv_k = invariants(k)
    if k < n:
        Dk = spec.d_matrix(k)
        images = [[sum((Dk[r][c] * v[c] for c in range(size)), Fraction(0)) for r in range(len(Dk))] for v in inv_k]
        kernel = linalg.nullspace(linalg.transpose(images, len(Dk)), len(inv_k)) if inv_k else []
        Z = [[sum((w[j] * inv_k[j][c] for j in range(len(inv_k))), Fraction(0)) for c in range(size)] for w in kernel]
    else:
        Z = inv_k
    B = []
    if k > 0:
        Dm = spec.d_matrix(k - 1)
        for v in invariants(k - 1):
            b = [sum((Dm[r][c] * v[c] for c in range(len(v))), Fraction(0)) for r in range(size)]
            if any(b):
                B.append(b)
    return _cohomology(n, k, Z, B)


def poincare_pairing(Hk: Cohomology, Hc: Cohomology) -> list[list[Fraction]]:
    """Top-degree coefficient of rep_i ∧ rep_j for complementary degrees."""
    n = Hk.n
    top = (1 << n) - 1
    return [[(a * b).coefficient(top) for b in Hc.representatives] for a in Hk.representatives]


def euler_characteristic(spec: LieAlgebraSpec) -> int:
    return sum((-1) ** k * ce_cohomology(spec, k).dim for k in range(spec.n + 1))


def betti_numbers(spec: LieAlgebraSpec, actions=None) -> list[int]:
    if actions:
        return [invariant_cohomology(spec, k, actions).dim for k in range(spec.n + 1)]
    return [ce_cohomology(spec, k).dim for k in range(spec.n + 1)]


def diagonal_action(signs: Sequence[int]) -> list[list[Fraction]]:
    return [[Fraction(signs[i]) if i == j else Fraction(0) for j in range(len(signs))] for i in range(len(signs))]


RHO_SIGNS = (-1, -1, 1, 1, -1, -1, 1)
