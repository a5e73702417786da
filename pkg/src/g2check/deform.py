"""Levi-Civita connection in the invariant frame, the linearised associative
deformation operator D1 on Y0, its Fourier kernel, and calibration checks for
the associative tori and the coassociative fibration."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

import numpy as np
from sympy import Matrix, sympify
from sympy.polys.domains import QQ_I

from . import linalg
from .exterior import ExteriorForm, PolyMap, contract, indices, mask_of, poly_substitute, pullback, restrict
from .g2 import PHI, chi_form, cross_product, evaluate, hodge_star, su3_data, unit
from .lie import LieAlgebraSpec, RHO_SIGNS
from .local_model import UNPRIMED, coframe_unprimed, to_coordinates
from .nilgroup import (B_matrix, C_MATRIX, SIGMA, fixed_locus, group_law_fixed_audit, lattice_generators,
                       multiply, sigma)
from .scalars import TAU_RING, format_scalar, frac, gaussian_parts, poly_ring

__all__ = [
    "NORMAL",
    "TANGENT",
    "ConnectionData",
    "levi_civita",
    "REFERENCE_PERP",
    "REFERENCE_DUAL",
    "table_comparison",
    "frame_vector_fields",
    "frame_duality_check",
    "DISPLAYED_D1",
    "D1Operator",
    "assemble_D1",
    "ModeCertificate",
    "FourierKernel",
    "symbol_matrix",
    "symbol_matrix_numeric",
    "mode_certificate",
    "fourier_kernel",
    "AssociativeVerdict",
    "associative_family",
    "associative_check",
    "special_lagrangian_check",
    "component_parametrization",
    "coassociative_fibration_check",
]

NORMAL = (1, 2, 5, 6)
TANGENT = (3, 4, 7)
_RANGE = range(1, 8)


# connection

@dataclass(frozen=True)
class ConnectionData:
    """Γ[i, j, k] = ⟨∇_{e_i} e_j, e_k⟩ for the orthonormal invariant frame."""

    spec: LieAlgebraSpec
    Gamma: dict

    def gamma(self, i: int, j: int, k: int) -> Fraction:
        return self.Gamma[i, j, k]

    def nabla(self, i: int, j: int) -> list[Fraction]:
        return [self.Gamma[i, j, k] for k in _RANGE]

    def perp_double(self, k: int, i: int) -> dict[int, Fraction]:
        """2∇^⊥_{e_k} e_i as {normal index: coefficient}."""
        return {m: 2 * self.Gamma[k, i, m] for m in NORMAL if self.Gamma[k, i, m]}

    def dual_double(self, i: int, j: int) -> dict[int, Fraction]:
        """2∇_{e_i} e^j as {k: coefficient of e^k}; ∇_{e_i} e^j = Σ_k Γ[i, j, k] e^k."""
        return {k: 2 * self.Gamma[i, j, k] for k in _RANGE if self.Gamma[i, j, k]}

    def covariant(self, i: int, a: ExteriorForm) -> ExteriorForm:
        """∇_{e_i} of a constant form (degree-zero derivation on the coframe)."""
        images = [ExteriorForm(7, {1 << (k - 1): self.Gamma[i, j, k] for k in _RANGE}) for j in _RANGE]
        out = a.zero()
        for m, c in a.terms.items():
            idx = indices(m)
            for pos, j in enumerate(idx):
                piece = ExteriorForm(7, {mask_of(idx[:pos]): c}) * images[j - 1] * \
                    ExteriorForm(7, {mask_of(idx[pos + 1:]): 1})
                out = out + piece
        return out

    def defects(self) -> dict:
        metric = [(i, j, k) for i in _RANGE for j in _RANGE for k in _RANGE
                  if self.Gamma[i, j, k] + self.Gamma[i, k, j]]
        torsion = [(i, j, k) for i in _RANGE for j in _RANGE for k in _RANGE
                   if self.Gamma[i, j, k] - self.Gamma[j, i, k] != self.spec.structure_constant(i, j, k)]
        return {"metric": metric, "torsion": torsion}


def levi_civita(spec: LieAlgebraSpec, sign: int = 1) -> ConnectionData:
    """Koszul formula 2Γ[i, j, k] = c_ij^k - c_jk^i + c_ki^j for the identity metric.

    ``sign=-1`` uses the opposite bracket convention (c replaced by -c).
    """
    c = {(i, j, k): sign * spec.structure_constant(i, j, k) for i in _RANGE for j in _RANGE for k in _RANGE}
    G = {(i, j, k): (c[i, j, k] - c[j, k, i] + c[k, i, j]) / 2 for i in _RANGE for j in _RANGE for k in _RANGE}
    return ConnectionData(spec, G)


# reference check-point values: 2∇^⊥_{e_k} e_i on Y0, key (k, i)
REFERENCE_PERP = {
    (3, 1): {5: 1}, (3, 2): {}, (3, 5): {1: -1}, (3, 6): {},
    (4, 1): {2: 1, 6: 1}, (4, 2): {1: 1}, (4, 5): {}, (4, 6): {1: -1},
    (7, 1): {5: 1}, (7, 2): {}, (7, 5): {1: -1}, (7, 6): {},
}

# reference check-point values: 2∇_{e_i} e^j, key (i, j), value {k: coefficient of e^k}
REFERENCE_DUAL = {
    (1, 1): {}, (1, 2): {4: -1}, (1, 3): {5: -1}, (1, 4): {6: -1}, (1, 5): {3: 1, 7: -1}, (1, 6): {4: 1},
    (1, 7): {5: 1},
    (2, 1): {4: -1}, (2, 2): {}, (2, 3): {}, (2, 4): {1: -2}, (2, 5): {}, (2, 6): {}, (2, 7): {},
    (5, 1): {3: 1, 7: 1}, (5, 2): {}, (5, 3): {1: -1}, (5, 4): {}, (5, 5): {}, (5, 6): {}, (5, 7): {1: -1},
    (6, 1): {4: 1}, (6, 2): {}, (6, 3): {}, (6, 4): {1: -1}, (6, 5): {}, (6, 6): {}, (6, 7): {},
}


def _perp_witness(k: int, i: int) -> list[str]:
    T = REFERENCE_PERP
    out = []
    for j in NORMAL:
        s = Fraction(T[k, i].get(j, 0)) + Fraction(T[k, j].get(i, 0))
        if s:
            out.append(f"metric: <2∇⊥_e{k} e{i}, e{j}> + <2∇⊥_e{k} e{j}, e{i}> = {s}")
    return out


def _dual_witness(spec: LieAlgebraSpec, i: int, j: int) -> list[str]:
    D = REFERENCE_DUAL
    out = []
    for k in _RANGE:
        s = Fraction(D[i, j].get(k, 0)) + Fraction(D[i, k].get(j, 0))
        if s:
            out.append(f"metric: coeff e^{k} in 2∇_e{i} e^{j} + coeff e^{j} in 2∇_e{i} e^{k} = {s}")
        if (j, i) in D:
            t = Fraction(D[i, j].get(k, 0)) - Fraction(D[j, i].get(k, 0))
            want = 2 * spec.structure_constant(i, j, k)
            if t != want:
                out.append(f"torsion: coeff e^{k} in 2∇_e{i} e^{j} - 2∇_e{j} e^{i} = {t}, bracket needs {want}")
    return out


def _compare(conn: ConnectionData) -> dict:
    mismatches, matches = [], 0
    for (k, i), ref in REFERENCE_PERP.items():
        got = conn.perp_double(k, i)
        if got == {m: Fraction(v) for m, v in ref.items()}:
            matches += 1
        else:
            mismatches.append({"table": "perp", "entry": (k, i), "reference": _vec_text(ref, "e_"),
                               "computed": _vec_text(got, "e_"), "witness": _perp_witness(k, i)})
    for (i, j), ref in REFERENCE_DUAL.items():
        got = conn.dual_double(i, j)
        if got == {m: Fraction(v) for m, v in ref.items()}:
            matches += 1
        else:
            mismatches.append({"table": "dual", "entry": (i, j), "reference": _vec_text(ref, "e^"),
                               "computed": _vec_text(got, "e^"), "witness": _dual_witness(conn.spec, i, j)})
    return {"matches": matches, "mismatches": mismatches}


def _vec_text(v: dict, prefix: str) -> str:
    parts = []
    for k in sorted(v):
        c = Fraction(v[k])
        coeff = "" if c == 1 else "-" if c == -1 else format_scalar(c)
        parts.append(f"{coeff}{prefix}{k}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def table_comparison(conn: ConnectionData) -> dict:
    """Compare both bracket conventions against the reference check-point values."""
    flipped = levi_civita(conn.spec, -1)
    conv = {"standard": _compare(conn), "flipped": _compare(flipped)}
    chosen = max(conv, key=lambda name: conv[name]["matches"])
    total = len(REFERENCE_PERP) + len(REFERENCE_DUAL)
    return {"conventions": conv, "chosen_convention": chosen, "total": total,
            "all_match": not conv[chosen]["mismatches"]}


# frame field in the coordinates of G

_RU = poly_ring(UNPRIMED)


def frame_vector_fields() -> list[list]:
    """e_i as coefficient vectors in ∂_1..∂_7."""
    x1, x2, x3 = _RU.gens[:3]
    o, z = _RU.one, _RU.zero
    rows = [[z] * 7 for _ in range(7)]
    rows[0] = [o, z, z, x2, x3, -x1 * x2, -x1 * x3]
    for i in range(1, 7):
        rows[i][i] = o
    rows[3][5] = -x1
    rows[4][6] = -x1
    return rows


def _coframe_matrix() -> list[list]:
    """P[i][m] = coefficient of dx_m in e^i."""
    return [[e.coefficient(1 << m) if e.coefficient(1 << m) else _RU.zero for m in range(7)]
            for e in coframe_unprimed()]


def _vf_bracket(X: Sequence, Y: Sequence) -> list:
    g = _RU.gens
    return [sum((X[l] * Y[m].diff(g[l]) - Y[l] * X[m].diff(g[l]) for l in range(7)), _RU.zero)
            for m in range(7)]


def frame_duality_check(spec: LieAlgebraSpec | None = None) -> dict:
    """⟨e^i, e_j⟩ = δ_ij as polynomial identities, and [e_i, e_j] = Σ c_ij^k e_k."""
    from .lie import nilpotent_algebra
    spec = spec or nilpotent_algebra()
    P, E = _coframe_matrix(), frame_vector_fields()
    pairings = {}
    dual_ok = True
    for i in _RANGE:
        for j in _RANGE:
            v = sum((P[i - 1][m] * E[j - 1][m] for m in range(7)), _RU.zero)
            pairings[i, j] = str(v.as_expr())
            dual_ok &= v == (_RU.one if i == j else _RU.zero)
    bracket_ok = True
    for i, j in combinations(_RANGE, 2):
        lhs = _vf_bracket(E[i - 1], E[j - 1])
        rhs = [sum((spec.structure_constant(i, j, k) * E[k - 1][m] for k in _RANGE), _RU.zero) for m in range(7)]
        bracket_ok &= lhs == rhs
    return {"pairings": pairings, "dual": dual_ok, "brackets_match_structure_constants": bracket_ok,
            "ok": dual_ok and bracket_ok}


# the operator D1

_DISPLAYED_ROWS = (
    ("0", "-d3", "d4", "-d7"),
    ("d3-1", "0", "-d7", "-d4"),
    ("-d4", "d7", "0", "-d3"),
    ("d7+1", "d4", "d3", "0"),
)
_TERM = re.compile(r"([+-]?)(d[347]|\d+)")


def _parse_displayed() -> dict:
    first = {k: [[Fraction(0)] * 4 for _ in range(4)] for k in TANGENT}
    zero = [[Fraction(0)] * 4 for _ in range(4)]
    for r, row in enumerate(_DISPLAYED_ROWS):
        for c, text in enumerate(row):
            for sign, tok in _TERM.findall(text):
                s = -1 if sign == "-" else 1
                if tok.startswith("d"):
                    first[int(tok[1])][r][c] += s
                else:
                    zero[r][c] += s * int(tok)
    return {"first_order": first, "zero_order": zero}


DISPLAYED_D1 = _parse_displayed()


@dataclass
class D1Operator:
    """D1 v = Σ_k first_order[k] ∂_k v + zero_order v on v = (v1, v2, v5, v6)."""

    first_order: dict
    zero_order: list
    pairing: str
    sign_flag: int
    alternatives: dict
    mismatches: list
    normal_valued: bool

    def apply_constant(self, v: Sequence) -> list[Fraction]:
        return [sum((self.zero_order[r][c] * frac(v[c]) for c in range(4)), Fraction(0)) for r in range(4)]


def _zero_order_parts(conn: ConnectionData) -> tuple[list, dict, bool]:
    """Σ_k e_k × ∇⊥_{e_k} e_i, and the torsion term under both argument orders."""
    star = hodge_star(PHI)
    dirac = [[Fraction(0)] * 4 for _ in range(4)]
    normal_valued = True
    for c, i in enumerate(NORMAL):
        for k in TANGENT:
            w = [conn.gamma(k, i, m) if m in NORMAL else Fraction(0) for m in _RANGE]
            cp = cross_product(PHI, unit(7, k), w)
            normal_valued &= all(cp[m - 1] == 0 for m in TANGENT)
            for r, o in enumerate(NORMAL):
                dirac[r][c] += cp[o - 1]
    omega_y = [unit(7, k) for k in TANGENT]
    torsion = {"omega_first": [[Fraction(0)] * 4 for _ in range(4)],
               "e_i_first": [[Fraction(0)] * 4 for _ in range(4)]}
    for c, j in enumerate(NORMAL):
        dpsi = conn.covariant(j, star)
        for r, i in enumerate(NORMAL):
            torsion["omega_first"][r][c] = evaluate(dpsi, omega_y + [unit(7, i)])
            torsion["e_i_first"][r][c] = evaluate(dpsi, [unit(7, i)] + omega_y)
    return dirac, torsion, normal_valued


def _add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _neg(A):
    return [[-a for a in r] for r in A]


def assemble_D1(conn: ConnectionData) -> D1Operator:
    """First-order symbol Σ_k e_k × ∂_k and zero-order terms, compared with the displayed matrix.

    The argument order in the torsion term is chosen by agreement with the
    displayed matrix; a global sign, if needed, is kept in ``sign_flag``.
    """
    first = {}
    normal_valued = True
    for k in TANGENT:
        M = [[Fraction(0)] * 4 for _ in range(4)]
        for c, i in enumerate(NORMAL):
            cp = cross_product(PHI, unit(7, k), unit(7, i))
            normal_valued &= all(cp[m - 1] == 0 for m in TANGENT)
            for r, o in enumerate(NORMAL):
                M[r][c] = cp[o - 1]
        first[k] = M
    dirac, torsion, nv = _zero_order_parts(conn)
    alternatives = {name: _add(dirac, T) for name, T in torsion.items()}
    want = DISPLAYED_D1

    def agrees(zero, s):
        return all((first[k] if s == 1 else _neg(first[k])) == want["first_order"][k] for k in TANGENT) and \
            (zero if s == 1 else _neg(zero)) == want["zero_order"]

    pairing, sign = "omega_first", 1
    for name in ("omega_first", "e_i_first"):
        hit = next((s for s in (1, -1) if agrees(alternatives[name], s)), None)
        if hit is not None:
            pairing, sign = name, hit
            break
    zero = alternatives[pairing]
    mismatches = []
    got = {k: first[k] if sign == 1 else _neg(first[k]) for k in TANGENT}
    z = zero if sign == 1 else _neg(zero)
    for r in range(4):
        for c in range(4):
            for k in TANGENT:
                if got[k][r][c] != want["first_order"][k][r][c]:
                    mismatches.append({"entry": (r + 1, c + 1), "part": f"d{k}", "computed": str(got[k][r][c]),
                                       "displayed": str(want["first_order"][k][r][c])})
            if z[r][c] != want["zero_order"][r][c]:
                mismatches.append({"entry": (r + 1, c + 1), "part": "zero", "computed": str(z[r][c]),
                                   "displayed": str(want["zero_order"][r][c])})
    return D1Operator(first, zero, pairing, sign, alternatives, mismatches, normal_valued and nv)


# Fourier modes: ∂_k ↦ i τ n_k with τ standing for 2π

_TAU = TAU_RING.gens[0]
_I = TAU_RING(QQ_I(0, 1))


@dataclass(frozen=True)
class ModeCertificate:
    mode: tuple[int, int, int]
    coefficients: list  # (re, im) of τ^0 .. τ^4 in det
    pfaffian: Fraction
    tau4: Fraction
    identically_zero: bool
    kernel_dimension: int
    kernel: list

    def record(self) -> dict:
        return {"mode": list(self.mode),
                "det": [[format_scalar(a), format_scalar(b)] for a, b in self.coefficients],
                "pfaffian": format_scalar(self.pfaffian), "kernel_dimension": self.kernel_dimension}


def symbol_matrix(n: Sequence[int], op: D1Operator | None = None) -> list[list]:
    """4×4 symbol of D1 at mode n with entries in Q(i)[τ]."""
    op = op or _default_operator()
    out = []
    for r in range(4):
        row = []
        for c in range(4):
            lin = sum((n[t] * op.first_order[k][r][c] for t, k in enumerate(TANGENT)), Fraction(0))
            row.append(_I * _TAU * TAU_RING(lin) + TAU_RING(op.zero_order[r][c]))
        out.append(row)
    return out


def symbol_matrix_numeric(n: Sequence[int], tau: float, op: D1Operator | None = None) -> np.ndarray:
    op = op or _default_operator()
    M = np.zeros((4, 4), dtype=complex)
    for r in range(4):
        for c in range(4):
            lin = sum(n[t] * float(op.first_order[k][r][c]) for t, k in enumerate(TANGENT))
            M[r, c] = 1j * tau * lin + float(op.zero_order[r][c])
    return M


_PERMS = [(p, 1 - 2 * (sum(1 for a, b in combinations(p, 2) if a > b) & 1)) for p in permutations(range(4))]


def _kernel(M: list[list]) -> list[list[Fraction]]:
    if all(e.is_ground for row in M for e in row):
        rows = [[frac(gaussian_parts(e)[0]) for e in row] for row in M]
        if any(gaussian_parts(e)[1] for row in M for e in row):
            raise ValueError("complex constant symbol")
        return [list(v) for v in linalg.nullspace(rows, 4)]
    S = Matrix([[sympify(e.as_expr()) for e in row] for row in M])
    return [[v for v in vec] for vec in S.nullspace()]


def _det_linear(Z: list[list], S: list[list]) -> list[Fraction]:
    """Coefficients of t^0..t^4 in det(Z + t S) for rational 4×4 matrices (Leibniz expansion)."""
    out = [0] * 5
    for p, s in _PERMS:
        poly = [s]
        for r in range(4):
            a, b = Z[r][p[r]], S[r][p[r]]
            if not a and not b:
                break
            nxt = [0] * (len(poly) + 1)
            for d, c in enumerate(poly):
                nxt[d] += c * a
                nxt[d + 1] += c * b
            poly = nxt
        else:
            for d, c in enumerate(poly):
                out[d] += c
    return [Fraction(c) for c in out]


def _exact(x: Fraction):
    """Plain int for integral values (keeps the Leibniz loop on machine integers)."""
    return x.numerator if x.denominator == 1 else x


_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def mode_certificate(n: Sequence[int], op: D1Operator | None = None) -> ModeCertificate:
    """Exact determinant of the symbol at mode n as a polynomial in τ over Q(i).

    With t = iτ the symbol is Z + t S for real Z, S, so the τ^p coefficient
    is i^p times the t^p coefficient of det(Z + t S).
    """
    op = op or _default_operator()
    n = tuple(int(v) for v in n)
    S = [[_exact(sum((n[t] * op.first_order[k][r][c] for t, k in enumerate(TANGENT)), Fraction(0)))
          for c in range(4)] for r in range(4)]
    cs = _det_linear([[_exact(v) for v in row] for row in op.zero_order], S)
    coeffs = [(c * _I_POWERS[p % 4][0], c * _I_POWERS[p % 4][1]) for p, c in enumerate(cs)]
    zero = not any(cs)
    kernel = _kernel(symbol_matrix(n, op)) if zero else []
    pf = Fraction(S[0][1] * S[2][3] - S[0][2] * S[1][3] + S[0][3] * S[1][2])
    re4, im4 = coeffs[4]
    if im4:
        raise ArithmeticError("top coefficient is not real")
    return ModeCertificate(n, coeffs, pf, re4, zero, len(kernel), kernel)


_DEFAULT_OP: list = []


def _default_operator() -> D1Operator:
    if not _DEFAULT_OP:
        from .lie import nilpotent_algebra
        _DEFAULT_OP.append(assemble_D1(levi_civita(nilpotent_algebra())))
    return _DEFAULT_OP[0]


@dataclass
class FourierKernel:
    N: int
    modes_checked: int
    total_dimension: int
    kernel_modes: list
    zero_mode_kernel: list
    pfaffian_ok: bool
    conjugation_ok: bool
    certificates: list = field(repr=False)
    note: str = ("each nonzero mode has a determinant polynomial in tau with leading coefficient "
                 "(n3^2+n4^2+n7^2)^2 != 0, so modes beyond N carry no kernel either")


def fourier_kernel(N: int = 10, op: D1Operator | None = None) -> FourierKernel:
    """Kernel dimension of D1 over the modes with ‖n‖_∞ ≤ N, with exact per-mode certificates."""
    if N < 0:
        raise ValueError("N must be non-negative")
    op = op or _default_operator()
    certs = {}
    for n in np.ndindex(*(2 * N + 1,) * 3):
        mode = tuple(int(v) - N for v in n)
        certs[mode] = mode_certificate(mode, op)
    pf_ok = all(c.pfaffian == sum(v * v for v in m) and c.tau4 == c.pfaffian ** 2 for m, c in certs.items())
    conj_ok = all(certs[tuple(-v for v in m)].coefficients == [(a, -b) for a, b in c.coefficients]
                  for m, c in certs.items())
    kernel_modes = [m for m, c in certs.items() if c.kernel_dimension]
    zero = certs[(0, 0, 0)].kernel
    return FourierKernel(N, len(certs), sum(c.kernel_dimension for c in certs.values()), kernel_modes,
                         zero, pf_ok, conj_ok, list(certs.values()))


# submanifold checks

@dataclass(frozen=True)
class AssociativeVerdict:
    phi_value: str
    gram: str
    calibrated: bool
    chi_zero: bool
    chi: list
    restricted: str
    tangent_frame: list


def associative_family() -> PolyMap:
    """Y(a, b, c): x = (0, a, y1, y2, b, 1/4 + c, y3)."""
    names = ("a", "b", "c", "y1", "y2", "y3")
    R = poly_ring(names)
    a, b, c, y1, y2, y3 = R.gens
    return PolyMap(names, UNPRIMED, [R.zero, a, y1, y2, b, c + Fraction(1, 4), y3], R)


def _frame_components(param: PolyMap, tangent: Sequence[str]) -> list[list]:
    """Components in the frame e_1..e_7 of the coordinate tangent vectors along ``tangent``."""
    if param.target != UNPRIMED:
        raise ValueError("parametrization must target the coordinates x1..x7")
    R = param.ring
    P = _coframe_matrix()
    values = dict(zip(UNPRIMED, param.polys))
    Ps = [[poly_substitute(p, values, R) for p in row] for row in P]
    out = []
    for t in tangent:
        g = R.gens[[str(s) for s in R.symbols].index(t)]
        T = [p.diff(g) for p in param.polys]
        out.append([sum((Ps[i][m] * T[m] for m in range(7)), R.zero) for i in range(7)])
    return out


def _eval_poly(a: ExteriorForm, vectors: Sequence[Sequence], R):
    out = a.with_ring(R)
    for v in vectors:
        if out.is_zero():
            return R.zero
        out = contract(v, out)
    return out.coefficient(0) if out.coefficient(0) else R.zero


def _gram(F: list[list], R):
    G = [[sum((u[m] * v[m] for m in range(7)), R.zero) for v in F] for u in F]
    k = len(G)
    total = R.zero
    for p in permutations(range(k)):
        s = 1 - 2 * (sum(1 for a, b in combinations(p, 2) if a > b) & 1)
        term = R.one
        for r in range(k):
            term = term * G[r][p[r]]
        total = total + term if s > 0 else total - term
    return total


def _poly_text(p) -> str:
    return str(p.as_expr()) if p else "0"


def _frame_text(F: list[list]) -> list:
    if all(e.is_ground for row in F for e in row):
        return [[frac(e.LC) if e else Fraction(0) for e in row] for row in F]
    return [[_poly_text(e) for e in row] for row in F]


def associative_check(param: PolyMap, tangent: Sequence[str]) -> AssociativeVerdict:
    """φ on the tangent frame compared with the induced volume, and χ on the tangent frame.

    Calibrated means φ(T1, T2, T3)^2 equals the Gram determinant identically,
    with χ(T1, T2, T3) = 0.
    """
    if len(tangent) != 3:
        raise ValueError("need exactly three tangent coordinates")
    R = param.ring
    F = _frame_components(param, tangent)
    gram = _gram(F, R)
    if not gram:
        raise ValueError("degenerate parametrization")
    value = _eval_poly(PHI, F, R)
    chis = [_eval_poly(c, F, R) for c in chi_form(PHI)]
    chi_zero = all(not c for c in chis)
    restricted_full = pullback(param, to_coordinates(PHI, coframe_unprimed()))
    keep = [param.source.index(t) + 1 for t in tangent]
    restricted = restrict(restricted_full, keep)
    return AssociativeVerdict(_poly_text(value), _poly_text(gram), value * value == gram and chi_zero, chi_zero,
                              [_poly_text(c) for c in chis], _form_text(restricted), _frame_text(F))


def _form_text(a: ExteriorForm) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for m, c in sorted(a.terms.items()):
        mono = "^".join(f"d{a.coords[i - 1]}" for i in indices(m))
        coeff = _poly_text(c)
        parts.append(mono if coeff == "1" else f"({coeff})*{mono}")
    return " + ".join(parts)


def special_lagrangian_check(param: PolyMap, tangent: Sequence[str]) -> dict:
    """ω and Im Ω on the tangent frame, plus the value of Re Ω."""
    su3 = su3_data()
    R = param.ring
    F = _frame_components(param, tangent)
    omega_vals = [_eval_poly(su3.omega, [u, v], R) for u, v in combinations(F, 2)]
    im = _eval_poly(su3.Omega.im, F, R)
    re_ = _eval_poly(su3.Omega.re, F, R)
    omega_zero = all(not v for v in omega_vals)
    return {"omega_zero": omega_zero, "im_Omega_zero": not im, "re_Omega_value": _poly_text(re_),
            "ok": omega_zero and not im}


def component_parametrization(index: int) -> tuple[PolyMap, dict]:
    """One of the eight fixed tori of σ̂ (1-based, in base-coordinate order) as a map from (y1, y2, y3).

    Components through x1 = 1 are taken in their group-law form x6 = c - x1·x4.
    """
    comps = fixed_locus(SIGMA, "Mhat")
    if not 1 <= index <= len(comps):
        raise ValueError(f"component index must be in 1..{len(comps)}")
    comp = comps[index - 1]
    audit = group_law_fixed_audit(sigma, [comp])[0]
    b1, b2, b5, b6 = comp.base
    R = poly_ring(("y1", "y2", "y3"))
    y1, y2, y3 = R.gens
    if audit["straight_fixed"]:
        offset, sheared = b6, False
    else:
        offsets = audit["sheared_offsets"]
        offset, sheared = (b6 if b6 in offsets else offsets[0]), True
    x6 = R(offset) - b1 * y2
    param = PolyMap(("y1", "y2", "y3"), UNPRIMED, [R(b1), R(b2), y1, y2, R(b5), x6, y3], R)
    return param, {"index": index, "base": comp.base, "sheared": sheared, "offset": offset}


def _singular_base() -> list[tuple[Fraction, Fraction]]:
    """Fixed points of ρ on the (x1, x2) base factor, periods 2 and 1."""
    periods = (2, 1)
    axes = []
    for p, s in zip(periods, RHO_SIGNS[:2]):
        if s != -1:
            raise ValueError("base involution must negate x1 and x2")
        # -x ≡ x mod p  ⇔  x ∈ {0, p/2}
        axes.append([Fraction(0), Fraction(p, 2)])
    return [(a, b) for a in axes[0] for b in axes[1]]


def coassociative_fibration_check(fiber: Sequence[int] = (4, 5, 6, 7)) -> dict:
    """φ vanishes on span{∂_m : m in fiber}; invariance of that span; singular base points."""
    fiber = tuple(fiber)
    if len(fiber) != 4 or not set(fiber) <= set(range(2, 8)):
        raise ValueError("fiber directions must be four of x2..x7")
    phi_c = to_coordinates(PHI, coframe_unprimed())
    phi_zero = restrict(phi_c, fiber).is_zero()
    R = _RU
    ident = PolyMap.identity(UNPRIMED, R)
    F = _frame_components(ident, [UNPRIMED[m - 1] for m in fiber])
    theta = _eval_poly(hodge_star(PHI), F, R)
    gram = _gram(F, R)
    ratio = None
    if gram.is_ground and theta.is_ground:
        g = frac(gram.LC)
        root = Fraction(int(g.numerator ** 0.5), int(g.denominator ** 0.5))
        if root * root == g:
            ratio = format_scalar(frac(theta.LC) / root if theta else Fraction(0))
    sub = [m - 2 for m in fiber]
    other = [r for r in range(6) if r not in sub]

    def invariant(M) -> bool:
        return all(M[r][c] == 0 for r in other for c in sub)

    # B(x1) has entries of degree <= 2 in x1, so three sample values decide each entry
    E = linalg.matmul(linalg.inverse(B_matrix(2)), C_MATRIX)
    inv = {"B(x1)": all(invariant(B_matrix(t)) for t in (0, 1, 2)), "C": invariant(C_MATRIX), "E": invariant(E)}
    x = R.gens
    lattice_ok = True
    for g in lattice_generators():
        moved = multiply(g, x)
        lattice_ok &= all(moved[i] - x[i] == R(g[i]) for i in range(3))
        lattice_ok &= frac(g[0]) % 2 == 0 and all(frac(g[i]).denominator == 1 for i in (1, 2))
    ok = phi_zero and all(inv.values()) and lattice_ok
    return {"fiber": fiber, "phi_on_fiber_zero": phi_zero, "theta_value": _poly_text(theta),
            "gram": _poly_text(gram), "theta_over_volume": ratio, "invariance": inv,
            "singular_base": _singular_base(), "lattice_compatible": lattice_ok, "ok": ok}
