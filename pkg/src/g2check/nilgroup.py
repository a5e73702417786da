"""The nilpotent group G, its lattice, the involutions and their fixed loci."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from . import linalg
from .exterior import PolyMap, poly_substitute
from .scalars import frac, poly_ring

__all__ = [
    "NilGroupElement",
    "multiply",
    "inverse",
    "group_matrix",
    "from_matrix",
    "in_lattice",
    "lattice_generators",
    "RHO",
    "SIGMA",
    "rho",
    "sigma",
    "J_MATRIX",
    "is_automorphism",
    "verify_lattice_stability",
    "maps_lattice_into_lattice",
    "sigma_equivariance",
    "commutator_check",
    "mapping_torus_check",
    "FixedLocusComponent",
    "fixed_locus",
    "group_law_fixed_audit",
]

HALF = Fraction(1, 2)
COORDS = tuple(f"x{i}" for i in range(1, 8))


def multiply(A: Sequence, a: Sequence) -> tuple:
    """Coordinates of A·a; works for rationals and for polynomials alike."""
    A1, A2, A3, A4, A5, A6, A7 = A
    a1, a2, a3, a4, a5, a6, a7 = a
    return (
        a1 + A1,
        a2 + A2,
        a3 + A3,
        a4 + A2 * a1 + A4,
        a5 + A3 * a1 + A5,
        a6 - HALF * A2 * a1 * a1 - A1 * a4 - A1 * A2 * a1 + A6,
        a7 - HALF * A3 * a1 * a1 - A1 * a5 - A1 * A3 * a1 + A7,
    )


def inverse(a: Sequence) -> tuple:
    a1, a2, a3, a4, a5, a6, a7 = a
    b1, b2, b3 = -a1, -a2, -a3
    b4 = -a4 - b2 * a1
    b5 = -a5 - b3 * a1
    b6 = -(a6 - HALF * b2 * a1 * a1 - b1 * a4 - b1 * b2 * a1)
    b7 = -(a7 - HALF * b3 * a1 * a1 - b1 * a5 - b1 * b3 * a1)
    return (b1, b2, b3, b4, b5, b6, b7)


@dataclass(frozen=True)
class NilGroupElement:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != 7:
            raise ValueError("a point of G has 7 coordinates")
        object.__setattr__(self, "coords", tuple(frac(x) for x in self.coords))

    def __mul__(self, other: "NilGroupElement") -> "NilGroupElement":
        return NilGroupElement(multiply(self.coords, other.coords))

    def inverse(self) -> "NilGroupElement":
        return NilGroupElement(inverse(self.coords))

    @staticmethod
    def identity() -> "NilGroupElement":
        return NilGroupElement((0,) * 7)


def _block(x1, y2, y4, y6) -> list[list]:
    z, o = Fraction(0), Fraction(1)
    return [
        [o, -y2, x1, y4, -x1 * y2, y6],
        [z, o, z, -x1, x1, HALF * x1 * x1],
        [z, z, o, z, -y2, -y4],
        [z, z, z, o, z, z],
        [z, z, z, z, o, x1],
        [z, z, z, z, z, o],
    ]


def group_matrix(a: Sequence) -> list[list[Fraction]]:
    """The 12×12 block-diagonal matrix diag(A1, A2) representing a."""
    a = [frac(x) for x in a]
    A1 = _block(a[0], a[1], a[3], a[5])
    A2 = _block(a[0], a[2], a[4], a[6])
    z = [Fraction(0)] * 6
    return [row + z for row in A1] + [z + row for row in A2]


def from_matrix(M: Sequence[Sequence]) -> tuple[Fraction, ...]:
    """Read coordinates back from a block matrix (inverse of :func:`group_matrix`)."""
    x1 = M[0][2]
    return (x1, -M[0][1], -M[6][7], M[0][3], M[6][9], M[0][5], M[6][11])


def in_lattice(x: Sequence) -> bool:
    """x ∈ 2Z × Z^6."""
    x = [frac(v) for v in x]
    return all(v.denominator == 1 for v in x) and x[0].numerator % 2 == 0


def lattice_generators() -> list[tuple[Fraction, ...]]:
    gens = []
    for i in range(7):
        g = [Fraction(0)] * 7
        g[i] = Fraction(2 if i == 0 else 1)
        gens.append(tuple(g))
    return gens


def rho(x: Sequence) -> tuple:
    x1, x2, x3, x4, x5, x6, x7 = x
    return (-x1, -x2, x3, x4, -x5, -x6, x7)


def sigma(x: Sequence) -> tuple:
    x1, x2, x3, x4, x5, x6, x7 = x
    return (-x1, -x2, x3, x4, -x5, HALF - x6, x7)


_R7 = poly_ring(COORDS)
_X = _R7.gens
RHO = PolyMap(COORDS, COORDS, rho(_X), _R7)
SIGMA = PolyMap(COORDS, COORDS, sigma(_X), _R7)

_J1 = (1, -1, -1, 1, 1, -1)
_J2 = (1, 1, -1, -1, -1, 1)
J_MATRIX = linalg.diagonal(_J1 + _J2)


def conjugate_by_j(a: Sequence) -> tuple[Fraction, ...]:
    """Coordinates of j·a·j^{-1} (j is its own inverse)."""
    M = linalg.matmul(linalg.matmul(J_MATRIX, group_matrix(a)), J_MATRIX)
    return from_matrix(M)


def _symbolic_pair():
    R = poly_ring(COORDS + tuple(f"y{i}" for i in range(1, 8)))
    return R, R.gens[:7], R.gens[7:]


def _apply(action: PolyMap, point: Sequence, R) -> tuple:
    values = dict(zip(action.source, point))
    return tuple(poly_substitute(p, values, R) for p in action.polys)


def is_automorphism(action: PolyMap) -> bool:
    """Symbolic identity action(x·y) = action(x)·action(y)."""
    R, x, y = _symbolic_pair()
    lhs = _apply(action, multiply(x, y), R)
    rhs = multiply(_apply(action, x, R), _apply(action, y, R))
    return all(a == b for a, b in zip(lhs, rhs))


def maps_lattice_into_lattice(f: Callable[[Sequence], Sequence], points: Sequence[Sequence]) -> bool:
    """Naive test: does f send each of the given lattice points into Γ?"""
    return all(in_lattice(f(p)) for p in points)


def _is_involution(action: PolyMap) -> bool:
    return all(p == x for p, x in zip(action.compose(action).polys,
                                      [action.ring.gens[i] for i in range(len(action.source))]))


def verify_lattice_stability(action: PolyMap, inverse_action: PolyMap | None = None) -> bool:
    """True iff the automorphism and its inverse map the generators of Γ into Γ."""
    if not is_automorphism(action):
        raise ValueError("action is not a group automorphism")
    if inverse_action is None:
        if not _is_involution(action):
            raise ValueError("an inverse is required for a non-involutive action")
        inverse_action = action
    gens = lattice_generators()
    return maps_lattice_into_lattice(action, gens) and maps_lattice_into_lattice(inverse_action, gens)


SIGMA_SHIFT = (0, 0, 0, 0, 0, HALF, 0)


def sigma_equivariance(A: Sequence) -> bool:
    """Symbolic check of L_A∘σ = σ∘L_{ρ(A)} as maps of G."""
    R = _R7
    A = tuple(frac(v) for v in A)
    lhs = multiply(A, sigma(_X))
    rhs = sigma(multiply(rho(A), _X))
    return all(R(0) + a == R(0) + b for a, b in zip(lhs, rhs))


def commutator(g: Sequence, h: Sequence) -> tuple:
    return multiply(multiply(g, h), multiply(inverse(g), inverse(h)))


def commutator_check() -> dict:
    """Commutators of the lattice generators and the direction each one leads with.

    The expected pattern has [g1, g_k] leading in direction k+2 for k = 2..5
    and all other commutators trivial.
    """
    gens = lattice_generators()
    expected = {(1, 2): 4, (1, 3): 5, (1, 4): 6, (1, 5): 7}
    records = []
    ok = True
    for i in range(1, 8):
        for j in range(i + 1, 8):
            c = commutator(gens[i - 1], gens[j - 1])
            support = [k + 1 for k, v in enumerate(c) if v]
            lead = support[0] if support else None
            want = expected.get((i, j))
            good = lead == want and in_lattice(c)
            ok &= good
            records.append({"pair": (i, j), "commutator": tuple(str(v) for v in c),
                            "support": support, "leading": lead, "expected_leading": want, "ok": good})
    return {"ok": ok, "records": records}


def B_matrix(x1) -> list[list[Fraction]]:
    x1 = frac(x1)
    z, o = Fraction(0), Fraction(1)
    return [
        [o, z, z, z, z, z],
        [z, o, z, z, z, z],
        [x1, z, o, z, z, z],
        [z, x1, z, o, z, z],
        [-HALF * x1 * x1, z, z, z, o, z],
        [z, -HALF * x1 * x1, z, z, z, o],
    ]


C_MATRIX = [[Fraction(v) for v in row] for row in (
    (1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0),
    (0, 0, 0, 1, 0, 0), (0, 0, -2, 0, 1, 0), (0, 0, 0, -2, 0, 1))]
E_DISPLAYED = [[Fraction(v) for v in row] for row in (
    (1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (-2, 0, 1, 0, 0, 0),
    (0, -2, 0, 1, 0, 0), (2, 0, -2, 0, 1, 0), (0, 2, 0, -2, 0, 1))]
MONODROMY = [[Fraction(v) for v in row] for row in (
    (1, 0, 0, 0, 0, 0), (-2, 1, 0, 0, 0, 0), (2, -2, 1, 0, 0, 0),
    (0, 0, 0, 1, 0, 0), (0, 0, 0, -2, 1, 0), (0, 0, 0, 2, -2, 1))]
SWAP_ORDER = (0, 2, 4, 1, 3, 5)  # (x2,x4,x6,x3,x5,x7) inside (x2,...,x7)


def fiber_relation(x1, a: Sequence) -> tuple:
    """Shift of (x2..x7) produced by a lattice element a acting at fixed x1."""
    x1 = frac(x1)
    a2, a3, a4, a5, a6, a7 = (frac(v) for v in a)
    return (a2, a3, a2 * x1 + a4, a3 * x1 + a5, -HALF * a2 * x1 * x1 + a6, -HALF * a3 * x1 * x1 + a7)


def mapping_torus_check() -> dict:
    B0 = B_matrix(0)
    B2 = B_matrix(2)
    E = linalg.matmul(linalg.inverse(B2), C_MATRIX)
    P = [[Fraction(int(SWAP_ORDER[i] == j)) for j in range(6)] for i in range(6)]
    swapped = linalg.matmul(linalg.matmul(P, E), linalg.transpose(P))
    # the columns of B(x1) span the fiber lattice generated by the relations
    lattice_ok = True
    for x1 in (Fraction(0), Fraction(1, 3), Fraction(2)):
        for k in range(6):
            a = [0] * 6
            a[k] = 1
            col = [linalg.matmul(B_matrix(x1), [[v] for v in a])[r][0] for r in range(6)]
            lattice_ok &= tuple(col) == fiber_relation(x1, a)
    return {
        "B0_identity": B0 == linalg.identity(6),
        "E_matches": E == E_DISPLAYED,
        "det_E": linalg.det(E),
        "swap_matches": swapped == MONODROMY,
        "B_columns_match_relation": lattice_ok,
        "E": E,
        "ok": B0 == linalg.identity(6) and E == E_DISPLAYED and linalg.det(E) == 1
        and swapped == MONODROMY and lattice_ok,
    }


@dataclass(frozen=True)
class FixedLocusComponent:
    base: tuple[Fraction, ...]
    base_indices: tuple[int, ...]
    free_indices: tuple[int, ...]
    space: str

    def point(self, free_values: Sequence) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * 7
        for i, v in zip(self.base_indices, self.base):
            x[i - 1] = v
        for i, v in zip(self.free_indices, free_values):
            x[i - 1] = frac(v)
        return tuple(x)


def _lattice_reduce(x: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Coordinate-wise representative in [0,2)×[0,1)^6."""
    out = []
    for i, v in enumerate(x):
        p = 2 if i == 0 else 1
        out.append(v - p * (v // p))
    return tuple(out)


def fixed_locus(action: PolyMap, space: str = "M") -> list[FixedLocusComponent]:
    """Components of {x : action(x) - x ∈ Γ coordinate-wise} over the fundamental domain.

    Base coordinates are those moved by ``action``; they are searched among
    quarter-integers.  With ``space="Mhat"`` components are identified under ρ.
    """
    if not _is_involution(action):
        raise ValueError("action is not an involution")
    gens = action.ring.gens
    free = tuple(i + 1 for i, p in enumerate(action.polys) if p == gens[i])
    base_idx = tuple(i for i in range(1, 8) if i not in free)
    ranges = [[Fraction(k, 4) for k in range(8 if i == 1 else 4)] for i in base_idx]
    comps = []
    for base in product(*ranges):
        values = {f"x{i}": v for i, v in zip(base_idx, base)}
        ok = True
        for i, p in enumerate(action.polys):
            diff = poly_substitute(p - gens[i], values, action.ring)
            if not diff.is_ground:
                ok = False
                break
            v = frac(diff.LC) if diff else Fraction(0)
            if v.denominator != 1 or (i == 0 and v.numerator % 2):
                ok = False
                break
        if ok:
            comps.append(FixedLocusComponent(tuple(base), base_idx, free, "M"))
    if space == "M":
        return comps
    if space != "Mhat":
        raise ValueError(f"unknown space {space!r}")
    seen: dict[tuple, FixedLocusComponent] = {}
    for c in comps:
        full = c.point([0] * len(free))
        img = _lattice_reduce(rho(full))
        key = min(tuple(full[i - 1] for i in base_idx), tuple(img[i - 1] for i in base_idx))
        if key not in seen:
            seen[key] = FixedLocusComponent(key, base_idx, free, "Mhat")
    return sorted(seen.values(), key=lambda c: c.base)


def group_law_fixed_audit(action: Callable[[Sequence], Sequence], components: Sequence[FixedLocusComponent]) -> list[dict]:
    """Check each coordinate-wise component against the group-law quotient Γ\\G.

    A subset is pointwise fixed in Γ\\G iff action(x)·x^{-1} ∈ Γ for all values
    of the free coordinates.  Besides the straight component, sheared sets
    x6 = c - b1·x4 (the shape produced by left translation) are searched over
    quarter-integer offsets c in [0, 1).
    """
    R = poly_ring(("x3", "x4", "x7"))
    t3, t4, t7 = R.gens

    def fixed(x) -> bool:
        g = multiply(action(x), inverse(x))
        return all(v.is_ground for v in g) and in_lattice([frac(v.LC) if v else 0 for v in g])

    out = []
    for c in components:
        b1, b2, b5, b6 = (c.base[c.base_indices.index(i)] for i in (1, 2, 5, 6))
        straight = fixed((R(b1), R(b2), t3, t4, R(b5), R(b6), t7))
        offsets = [q for q in (Fraction(k, 4) for k in range(4))
                   if fixed((R(b1), R(b2), t3, t4, R(b5), R(q) - b1 * t4, t7))]
        out.append({"base": c.base, "straight_fixed": straight, "sheared_offsets": offsets})
    return out
