"""Graded cohomology rings with explicit structure constants.

Rings come from invariant Chevalley-Eilenberg cohomology (wedge of
representatives) or from the resolved splitting H*(base) plus one copy of
H*(T^3)⊗[E_j] per singular component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Mapping, Sequence

from . import linalg
from .exterior import ExteriorForm, format_form, indices, mask_of, monomial
from .lie import (Cohomology, LieAlgebraSpec, RHO_SIGNS, abelian_algebra, ce_cohomology, diagonal_action,
                  invariant_cohomology, nilpotent_algebra)
from .scalars import format_scalar, poly_ring

__all__ = [
    "GradedRing",
    "RingElement",
    "lie_ring",
    "invariant_ring",
    "torus_ring",
    "build_resolved_ring",
    "restriction_map",
    "TANGENT",
    "LAMBDA",
    "cup",
    "poincare_check",
    "ObstructionCertificate",
    "obstruction_scan",
    "top_trilinear_oracle",
]

TANGENT = (3, 4, 7)
LAMBDA = monomial(7, "1256")
Table = dict[tuple[int, int], dict[tuple[int, int], dict[int, Fraction]]]


@dataclass
class GradedRing:
    """Basis labels per degree and structure constants ``table[(p, q)][(i, j)] = {k: c}``.

    Missing entries are zero products.  ``top`` is the degree of the
    orientation class, which is basis element 0 of that degree.
    """

    name: str
    labels: list[list[str]]
    table: Table = field(repr=False)
    top: int
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def betti(self) -> list[int]:
        return [len(b) for b in self.labels]

    def product(self, p: int, i: int, q: int, j: int) -> dict[int, Fraction]:
        if p + q > self.top:
            return {}
        return self.table.get((p, q), {}).get((i, j), {})

    def element(self, degree: int, coeffs: Mapping[int, object] | Sequence) -> "RingElement":
        if not isinstance(coeffs, Mapping):
            coeffs = dict(enumerate(coeffs))
        return RingElement(self, degree, {k: v for k, v in coeffs.items() if v})

    def basis(self, degree: int, i: int) -> "RingElement":
        return RingElement(self, degree, {i: Fraction(1)})

    def index(self, degree: int, label: str) -> int:
        return self.labels[degree].index(label)

    def by_label(self, degree: int, label: str) -> "RingElement":
        return self.basis(degree, self.index(degree, label))

    def unit(self) -> "RingElement":
        return self.basis(0, 0)

    def from_form(self, form: ExteriorForm) -> "RingElement":
        """Class of a closed invariant form in the base part of the ring."""
        H = self.meta["cohomology"]
        k = form.degree or 0
        if form.is_zero():
            return RingElement(self, k, {})
        return self.element(k, H[k].class_of(form))

    def graded_commutativity_defects(self) -> list[tuple]:
        bad = []
        for (p, q), entries in self.table.items():
            s = (-1) ** (p * q)
            for (i, j), v in entries.items():
                w = self.product(q, j, p, i)
                if {k: s * c for k, c in v.items()} != w:
                    bad.append((p, i, q, j))
        return bad

    def associativity_defects(self, limit: int | None = None) -> list[tuple]:
        """Exhaustive check of (xy)z = x(yz) on basis triples."""
        bad = []
        b = self.betti
        for p in range(self.top + 1):
            for q in range(self.top + 1 - p):
                for r in range(self.top + 1 - p - q):
                    if not (b[p] and b[q] and b[r]):
                        continue
                    pq, qr = self.table.get((p, q), {}), self.table.get((q, r), {})
                    for i in range(b[p]):
                        for j in range(b[q]):
                            left_mid = pq.get((i, j), {})
                            for k in range(b[r]):
                                left = _accumulate(
                                    (c, self.product(p + q, m, r, k)) for m, c in left_mid.items())
                                right = _accumulate(
                                    (c, self.product(p, i, q + r, m)) for m, c in qr.get((j, k), {}).items())
                                if left != right:
                                    bad.append((p, i, q, j, r, k))
                                    if limit and len(bad) >= limit:
                                        return bad
        return bad

    def export(self) -> dict:
        """Structured, deterministically ordered description for regression diffing."""
        triples = []
        for (p, q) in sorted(self.table):
            for (i, j) in sorted(self.table[(p, q)]):
                for k, c in sorted(self.table[(p, q)][(i, j)].items()):
                    triples.append([self.labels[p][i], self.labels[q][j], self.labels[p + q][k], format_scalar(c)])
        return {"name": self.name, "betti": self.betti, "labels": self.labels, "products": triples,
                **{k: self.meta[k] for k in ("base_betti", "components", "assumption") if k in self.meta}}


def _accumulate(pairs) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for c, vec in pairs:
        for k, v in vec.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class RingElement:
    ring: GradedRing = field(repr=False, compare=False)
    degree: int
    coeffs: Mapping[int, object]
    overflow: bool = False

    def __add__(self, other: "RingElement") -> "RingElement":
        if other.degree != self.degree:
            raise ValueError("cannot add elements of different degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return RingElement(self.ring, self.degree, {k: v for k, v in out.items() if v})

    def __neg__(self) -> "RingElement":
        return self.scale(-1)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, c) -> "RingElement":
        return RingElement(self.ring, self.degree, {k: c * v for k, v in self.coeffs.items() if c * v})

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return cup(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, RingElement) and self.degree == other.degree and \
            dict(self.coeffs) == dict(other.coeffs)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def vector(self) -> list:
        return [self.coeffs.get(i, 0) for i in range(self.ring.betti[self.degree])]

    def __str__(self) -> str:
        if self.overflow:
            return f"0 (degree {self.degree} overflow)"
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            lab = f"[{self.ring.labels[self.degree][k]}]"
            parts.append(lab if c == 1 else f"-{lab}" if c == -1 else f"({c})*{lab}")
        return " + ".join(parts).replace("+ -", "- ")


def cup(x: RingElement, y: RingElement) -> RingElement:
    """Bilinear extension of the structure constants; overflow gives a flagged zero."""
    if x.ring is not y.ring:
        raise ValueError("elements belong to different rings")
    deg = x.degree + y.degree
    if deg > x.ring.top:
        return RingElement(x.ring, deg, {}, overflow=True)
    out: dict[int, object] = {}
    block = x.ring.table.get((x.degree, y.degree), {})
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            for k, c in block.get((i, j), {}).items():
                out[k] = out.get(k, 0) + a * b * c
    return RingElement(x.ring, deg, {k: v for k, v in out.items() if v})


# rings from Lie algebra cohomology

def lie_ring(spec: LieAlgebraSpec, actions=None, name: str | None = None) -> GradedRing:
    """Cohomology ring of the (invariant) CE complex, products by wedging representatives."""
    n = spec.n
    H = [invariant_cohomology(spec, k, actions) if actions else ce_cohomology(spec, k) for k in range(n + 1)]
    labels = [[format_form(r) for r in Hk.representatives] for Hk in H]
    table: Table = {}
    for p in range(n + 1):
        for q in range(n + 1 - p):
            block = {}
            for i, a in enumerate(H[p].representatives):
                for j, b in enumerate(H[q].representatives):
                    coords = H[p + q].class_of(a * b)
                    v = {k: c for k, c in enumerate(coords) if c}
                    if v:
                        block[(i, j)] = v
            if block:
                table[(p, q)] = block
    ring = GradedRing(name or spec.name, labels, table, n, {"cohomology": H})
    top_rep = H[n].representatives[0] if H[n].dim else None
    if top_rep is None or top_rep.coefficient((1 << n) - 1) == 0:
        raise ValueError("top cohomology must be spanned by the volume class")
    return ring


def invariant_ring() -> GradedRing:
    return lie_ring(nilpotent_algebra(), [diagonal_action(RHO_SIGNS)], "Mhat")


def torus_ring(n: int = 7) -> GradedRing:
    return lie_ring(abelian_algebra(n), None, f"T{n}")


def restriction_map(alpha: ExteriorForm, component: int = 1) -> ExteriorForm:
    """i_j^*: kill e^1, e^2, e^5, e^6, keeping the e^3, e^4, e^7 subalgebra.

    The same rule is used for every component (left translations act
    trivially on invariant classes).
    """
    if not 1 <= component <= 16:
        raise ValueError("component index must be in 1..16")
    keep = mask_of(TANGENT)
    return alpha._new({m: c for m, c in alpha.terms.items() if m & ~keep == 0})


def _torus_basis(d: int) -> list[int]:
    return [mask_of(c) for c in combinations(TANGENT, d)]


def _torus_label(m: int) -> str:
    return "1" if m == 0 else "e^{" + "".join(str(i) for i in indices(m)) + "}"


def build_resolved_ring(base: GradedRing | None = None, components: int = 16) -> GradedRing:
    """H*(base) ⊕ ⊕_j H*(T^3)⊗[E_j] with the exceptional-divisor product rules.

    [E_j] has degree 2, so β⊗[E_j] has degree |β| + 2.
    """
    base = base or invariant_ring()
    H: list[Cohomology] = base.meta.get("cohomology")
    if H is None or len(H) != 8:
        raise ValueError("base ring must carry degree 0..7 invariant cohomology")
    if base.betti[0] != 1 or base.betti[7] != 1:
        raise ValueError("inconsistent input ring: H^0 and H^7 must be one-dimensional")
    nb = base.betti
    labels = [list(base.labels[k]) for k in range(8)]
    # tensor basis: (degree) -> list of (j, torus mask) in index order after the base labels
    tensor: list[list[tuple[int, int]]] = [[] for _ in range(8)]
    for k in range(8):
        if 2 <= k <= 5:
            for j in range(1, components + 1):
                for m in _torus_basis(k - 2):
                    tensor[k].append((j, m))
                    labels[k].append(f"{_torus_label(m)}*E{j}")
    pos = [{t: nb[k] + idx for idx, t in enumerate(tensor[k])} for k in range(8)]
    table: Table = {pq: {ij: dict(v) for ij, v in block.items()} for pq, block in base.table.items()}

    def put(p, q, i, j, vec):
        if vec:
            table.setdefault((p, q), {})[(i, j)] = vec

    def torus_expand(form: ExteriorForm, j: int, k: int) -> dict[int, Fraction]:
        return {pos[k][(j, m)]: c for m, c in form.terms.items() if c}

    # base · tensor and tensor · base
    for p in range(8):
        for i, a in enumerate(H[p].representatives):
            ra = restriction_map(a)
            for q in range(2, 6):
                if p + q > 7:
                    continue
                for (j, m) in tensor[q]:
                    beta = ExteriorForm(7, {m: 1})
                    prod = ra * beta
                    put(p, q, i, pos[q][(j, m)], torus_expand(prod, j, p + q))
                    put(q, p, pos[q][(j, m)], i, torus_expand(beta * ra, j, p + q))
    # tensor · tensor on the same component: -2 β∧γ∧λ in the base
    for p in range(2, 6):
        for q in range(2, 6):
            if p + q > 7:
                continue
            for (j, m) in tensor[p]:
                for (jj, mm) in tensor[q]:
                    if j != jj:
                        continue
                    form = (ExteriorForm(7, {m: 1}) * ExteriorForm(7, {mm: 1}) * LAMBDA).scale(-2)
                    coords = H[p + q].class_of(form)
                    put(p, q, pos[p][(j, m)], pos[q][(jj, mm)], {k: c for k, c in enumerate(coords) if c})
    meta = {"cohomology": H, "base_betti": nb, "components": components,
            "assumption": "restriction to every component kills e^1, e^2, e^5, e^6"}
    return GradedRing(f"resolved({base.name})", labels, table, 7, meta)


# Poincaré duality

def poincare_check(ring: GradedRing) -> dict:
    """Rank of the pairing H^k × H^{top-k} → H^top, normalized by the orientation class."""
    ranks = {}
    ok = True
    for k in range(ring.top + 1):
        bk, bc = ring.betti[k], ring.betti[ring.top - k]
        M = [[ring.product(k, i, ring.top - k, j).get(0, Fraction(0)) for j in range(bc)] for i in range(bk)]
        r = linalg.rank(M, bc) if bk and bc else 0
        ranks[k] = r
        ok = ok and r == bk == bc
    return {"ranks": ranks, "ok": ok}


# torsion-free obstruction

@dataclass(frozen=True)
class ObstructionCertificate:
    ring: str
    omega_vars: int
    eta_vars: int
    monomials_checked: int
    nonzero: tuple[tuple[str, Fraction], ...]

    @property
    def all_zero(self) -> bool:
        return not self.nonzero


def obstruction_scan(ring: GradedRing) -> ObstructionCertificate:
    """Expand η·ω·ω·ω in the top degree with ω, η generic over the degree-2 and degree-1 bases."""
    n2, n1 = ring.betti[2], ring.betti[1]
    names = tuple(f"s{i}" for i in range(n2)) + tuple(f"t{l}" for l in range(n1))
    R = poly_ring(names)
    s, t = R.gens[:n2], R.gens[n2:]
    omega = RingElement(ring, 2, {i: s[i] for i in range(n2)})
    eta = RingElement(ring, 1, {l: t[l] for l in range(n1)})
    top = cup(cup(cup(eta, omega), omega), omega)
    if ring.top != 7:
        raise ValueError("scan expects a ring with top degree 7")
    poly = top.coeffs.get(0, R.zero)
    coeffs = dict(poly.terms()) if poly else {}
    monomials = [(l, a, b, c) for l in range(n1) for a, b, c in combinations_with_replacement(range(n2), 3)]
    nonzero = []
    for l, a, b, c in monomials:
        exps = [0] * len(names)
        for x in (a, b, c):
            exps[x] += 1
        exps[n2 + l] += 1
        v = coeffs.get(tuple(exps), 0)
        if v:
            nonzero.append((f"t{l}*s{a}*s{b}*s{c}", Fraction(v.numerator, v.denominator)))
    return ObstructionCertificate(ring.name, n2, n1, len(monomials), tuple(nonzero))


def top_trilinear_oracle(ring: GradedRing) -> list[tuple[int, int, int, int, Fraction]]:
    """Nonzero values of (η_l ω_a ω_b ω_c) on basis elements, by direct basis products."""
    out = []
    for l in range(ring.betti[1]):
        e = ring.basis(1, l)
        for a, b, c in combinations_with_replacement(range(ring.betti[2]), 3):
            v = cup(cup(cup(e, ring.basis(2, a)), ring.basis(2, b)), ring.basis(2, c))
            if v.coeffs:
                out.append((l, a, b, c, v.coeffs[0]))
    return out
