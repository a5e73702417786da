"""Pointwise G2 linear algebra on constant-coefficient forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .exterior import (ExteriorForm, basis_masks, contract, indices, monomial, parse_form,
                       wedge_sign)
from .lie import LieAlgebraSpec
from .scalars import frac

__all__ = [
    "PHI0",
    "PHI",
    "THETA",
    "G2Structure",
    "SU3Data",
    "ComplexForm",
    "evaluate",
    "hitchin_form",
    "is_g2_form",
    "hodge_star",
    "inner_product",
    "torsion_flags",
    "cross_product",
    "su3_compatibility_check",
    "su3_data",
    "psi_local",
    "Psi_from_su2",
    "su2_data",
    "chi_form",
    "chi",
    "unit",
]

PHI0 = parse_form("e^{127} + e^{347} + e^{567} + e^{135} - e^{236} - e^{146} - e^{245}", 7)
PHI = parse_form("e^{123} + e^{145} + e^{167} - e^{246} + e^{257} + e^{347} + e^{356}", 7)
THETA = parse_form("e^{4567} + e^{2367} + e^{2345} - e^{1357} + e^{1346} + e^{1256} + e^{1247}", 7)


def unit(n: int, i: int) -> list[Fraction]:
    return [Fraction(int(j == i - 1)) for j in range(n)]


def evaluate(a: ExteriorForm, vectors: Sequence[Sequence]) -> Fraction:
    """a(v1, ..., vk) for a constant k-form."""
    k = a.degree
    if k is None:
        return Fraction(0)
    if len(vectors) != k:
        raise ValueError(f"a {k}-form needs {k} vectors")
    out = a
    for v in vectors:
        if out.is_zero():
            return Fraction(0)
        out = contract(v, out)
    return frac(out.coefficient(0))


def hitchin_form(phi: ExteriorForm) -> list[list[Fraction]]:
    """B(u, v) = (1/6) (u⌟φ)∧(v⌟φ)∧φ as coefficients of e^{1...7}."""
    if phi.n != 7 or (phi and phi.degree != 3):
        raise ValueError("hitchin_form needs a 3-form in rank 7")
    top = (1 << 7) - 1
    cs = [contract(unit(7, i), phi) if phi else phi for i in range(1, 8)]
    B = [[Fraction(0)] * 7 for _ in range(7)]
    for i in range(7):
        for j in range(i, 7):
            v = frac((cs[i] * cs[j] * phi).coefficient(top)) / 6 if phi else Fraction(0)
            B[i][j] = B[j][i] = v
    return B


def _rational_root(q: Fraction, n: int) -> Fraction | None:
    if q < 0 and n % 2 == 0:
        return None

    def iroot(m: int) -> int | None:
        sign = -1 if m < 0 else 1
        m = abs(m)
        r = round(m ** (1.0 / n)) if m else 0
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == m:
                return sign * c
        lo, hi = 0, 1
        while hi ** n < m:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** n < m:
                lo = mid + 1
            else:
                hi = mid
        return sign * lo if lo ** n == m else None

    a, b = iroot(q.numerator), iroot(q.denominator)
    return None if a is None or b is None else Fraction(a, b)


@dataclass(frozen=True)
class G2Structure:
    phi: ExteriorForm
    B: tuple[tuple[Fraction, ...], ...]
    status: str
    orientation: int
    metric: tuple[tuple, ...] | None
    metric_exact: bool

    @property
    def is_positive(self) -> bool:
        return self.status == "G2-positive"


def is_g2_form(phi: ExteriorForm) -> G2Structure:
    """Classify φ from the sign pattern of the leading principal minors of B_φ.

    The metric is g = det(B)^{-1/9} B, exact when det(B) has a rational ninth
    root and a float matrix (tolerance 1e-12) otherwise.
    """
    if phi.n != 7 or (phi and phi.degree != 3):
        raise ValueError("is_g2_form needs a 3-form in rank 7")
    B = hitchin_form(phi)
    minors = linalg.leading_minors(B)
    frozen = tuple(tuple(r) for r in B)
    if all(m > 0 for m in minors):
        status, orient, S = "G2-positive", 1, B
    elif all((m < 0) if k % 2 == 0 else (m > 0) for k, m in enumerate(minors)):
        status, orient, S = "opposite-orientation", -1, [[-x for x in r] for r in B]
    else:
        return G2Structure(phi, frozen, "degenerate", 0, None, False)
    d = linalg.det(S)
    root = _rational_root(d, 9)
    if root is not None:
        g = tuple(tuple(x / root for x in r) for r in S)
        return G2Structure(phi, frozen, status, orient, g, True)
    scale = float(d) ** (-1.0 / 9.0)
    g = tuple(tuple(float(x) * scale for x in r) for r in S)
    return G2Structure(phi, frozen, status, orient, g, False)


def _sub_det(M: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]) -> Fraction:
    return linalg.det([[M[r][c] for c in cols] for r in rows])


def inner_product(a: ExteriorForm, b: ExteriorForm, metric: Sequence[Sequence] | None = None) -> Fraction:
    """Induced inner product of constant forms (identity metric by default)."""
    if metric is None:
        return sum((frac(c) * frac(b.coefficient(m)) for m, c in a.terms.items()), Fraction(0))
    ginv = linalg.inverse(metric)
    total = Fraction(0)
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            I, J = [i - 1 for i in indices(m1)], [j - 1 for j in indices(m2)]
            if len(I) == len(J):
                total += frac(c1) * frac(c2) * _sub_det(ginv, I, J)
    return total


def hodge_star(a: ExteriorForm, metric: Sequence[Sequence] | None = None, orientation: int = 1) -> ExteriorForm:
    """★ defined by β∧★α = ⟨β, α⟩ vol with vol = orientation·sqrt(det g)·e^{1...n}."""
    n = a.n
    if metric is None:
        metric = linalg.identity(n)
    d = linalg.det(metric)
    minors = linalg.leading_minors(metric)
    if not all(m > 0 for m in minors):
        raise ValueError("metric is not positive definite")
    sq = _rational_root(d, 2)
    if sq is None:
        raise ValueError("sqrt(det g) is irrational; exact Hodge star unavailable")
    top = (1 << n) - 1
    identity = metric == linalg.identity(n)
    ginv = None if identity else linalg.inverse(metric)
    out: dict[int, Fraction] = {}
    degs = {bin(m).count("1") for m in a.terms}
    for k in degs:
        for mI in basis_masks(n, k):
            if identity:
                val = frac(a.coefficient(mI))
            else:
                I = [i - 1 for i in indices(mI)]
                val = sum((frac(c) * _sub_det(ginv, I, [j - 1 for j in indices(m)])
                           for m, c in a.terms.items() if bin(m).count("1") == k), Fraction(0))
            if val:
                comp = top & ~mI
                out[comp] = out.get(comp, Fraction(0)) + wedge_sign(mI, comp) * sq * orientation * val
    return ExteriorForm(n, out)


def torsion_flags(phi: ExteriorForm, spec: LieAlgebraSpec) -> dict:
    """dφ and d★φ via the Chevalley-Eilenberg differential."""
    st = is_g2_form(phi)
    if not st.metric_exact:
        raise ValueError("torsion flags need an exact metric")
    star = hodge_star(phi, [list(r) for r in st.metric], st.orientation)
    dphi, dstar = spec.d(phi), spec.d(star)
    return {
        "dphi": dphi,
        "dstarphi": dstar,
        "closed": dphi.is_zero(),
        "coclosed": dstar.is_zero(),
        "torsion_free": dphi.is_zero() and dstar.is_zero(),
    }


def cross_product(phi: ExteriorForm, u: Sequence, v: Sequence, metric: Sequence[Sequence] | None = None) -> list[Fraction]:
    """P(u, v) with φ(u, v, w) = g(P(u, v), w)."""
    n = phi.n
    w = [evaluate(phi, [u, v, unit(n, k)]) for k in range(1, n + 1)]
    if metric is None:
        return w
    return [x for x in linalg.solve(metric, w)]


@dataclass(frozen=True)
class ComplexForm:
    """A complex form stored as its real and imaginary parts."""

    re: ExteriorForm
    im: ExteriorForm

    def __mul__(self, other: "ComplexForm") -> "ComplexForm":
        return ComplexForm(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def conjugate(self) -> "ComplexForm":
        return ComplexForm(self.re, -self.im)

    def __add__(self, other: "ComplexForm") -> "ComplexForm":
        return ComplexForm(self.re + other.re, self.im + other.im)

    @staticmethod
    def from_parts(re: ExteriorForm, im: ExteriorForm | None = None) -> "ComplexForm":
        return ComplexForm(re, im if im is not None else re.zero())


@dataclass(frozen=True)
class SU3Data:
    omega: ExteriorForm
    Omega: ComplexForm
    e1: ExteriorForm

    def invariants(self) -> dict:
        w, O = self.omega, self.Omega
        vol_part = (O * O.conjugate())
        w3 = w * w * w
        ratio = None
        if w3:
            m, c = next(iter(w3.terms.items()))
            cand = frac(vol_part.im.coefficient(m)) / frac(c)
            ratio = cand if vol_part.im == w3.scale(cand) and vol_part.re.is_zero() else None
        return {
            "omega_wedge_reOmega": (w * O.re).is_zero(),
            "omega_wedge_imOmega": (w * O.im).is_zero(),
            "Omega_Omegabar_over_omega3": ratio,
        }


def su3_data() -> SU3Data:
    e = lambda i: monomial(7, [i])
    z = lambda a, b: ComplexForm(e(a), e(b))
    return SU3Data(e(2) * e(3) + e(4) * e(5) + e(6) * e(7), z(2, 3) * z(4, 5) * z(6, 7), e(1))


def su3_compatibility_check(data: SU3Data, phi: ExteriorForm) -> bool:
    """Exact test of φ = e^1∧ω − Re Ω together with the SU(3) algebraic identities."""
    inv = data.invariants()
    ok = inv["omega_wedge_reOmega"] and inv["omega_wedge_imOmega"] and inv["Omega_Omegabar_over_omega3"]
    return bool(ok) and phi == data.e1 * data.omega - data.Omega.re


def psi_local() -> ExteriorForm:
    """ψ on T^3 × B^4 in the primed coordinate differentials (rank 7, constant)."""
    return parse_form("e^{347} + e^{312} + e^{356} - e^{415} + e^{426} + e^{716} + e^{725}", 7)


def Psi_from_su2(omega: ExteriorForm, Omega: ComplexForm) -> ExteriorForm:
    """Ψ = dx'_{347} + dx'_3∧ω − dx'_4∧Re Ω + dx'_7∧Im Ω."""
    e = lambda i: monomial(7, [i])
    return e(3) * e(4) * e(7) + e(3) * omega - e(4) * Omega.re + e(7) * Omega.im


def su2_data() -> tuple[ExteriorForm, ComplexForm]:
    """ω = dx'_{12} + dx'_{56} and Ω = dz1∧dz2 with z1 = x1' + i x2', z2 = x5' + i x6'."""
    e = lambda i: monomial(7, [i])
    z1, z2 = ComplexForm(e(1), e(2)), ComplexForm(e(5), e(6))
    return e(1) * e(2) + e(5) * e(6), z1 * z2


def chi_form(phi: ExteriorForm) -> list[ExteriorForm]:
    """Components χ^j with ⟨χ(u, v, w), e_j⟩ = ★φ(u, v, w, e_j) (orthonormal coframe)."""
    st = is_g2_form(phi)
    if not st.is_positive:
        raise ValueError("chi_form needs a G2-positive form")
    star = hodge_star(phi, [list(r) for r in st.metric], st.orientation)
    # ★φ(u,v,w,e_j) = -(e_j ⌟ ★φ)(u,v,w) for a 4-form
    return [-contract(unit(7, j), star) for j in range(1, 8)]


def chi(phi: ExteriorForm, u: Sequence, v: Sequence, w: Sequence) -> list[Fraction]:
    return [evaluate(c, [u, v, w]) for c in chi_form(phi)]

