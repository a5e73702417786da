"""Local geometry near the singular locus: primed coordinates, the radial
primitive, the blow-up charts and Eguchi-Hanson potential sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .exterior import (ExteriorForm, PolyMap, d_poly, indices, pullback, poly_substitute,
                       restrict)
from .g2 import PHI, psi_local
from .nilgroup import fixed_locus, RHO
from .scalars import poly_ring

__all__ = [
    "UNPRIMED",
    "PRIMED",
    "NORMAL",
    "TANGENT",
    "primed_to_unprimed",
    "unprimed_to_primed",
    "coframe_unprimed",
    "coframe_primed",
    "to_coordinates",
    "coordinate_change_check",
    "radial_primitive",
    "blowup_chart_check",
    "EHSample",
    "eh_potential_eval",
    "eh_grid_sweep",
    "bump",
    "neighbourhood_disjointness",
]

UNPRIMED = tuple(f"x{i}" for i in range(1, 8))
PRIMED = tuple(f"x{i}p" for i in range(1, 8))
NORMAL = (1, 2, 5, 6)
TANGENT = (3, 4, 7)
HALF = Fraction(1, 2)

_RU = poly_ring(UNPRIMED)
_RP = poly_ring(PRIMED)


def primed_to_unprimed() -> PolyMap:
    """x5 = x5' + x1'x3', x7 = x7' - (1/2) x3'x1'^2, other coordinates unchanged."""
    p = _RP.gens
    return PolyMap(PRIMED, UNPRIMED, [p[0], p[1], p[2], p[3], p[4] + p[0] * p[2], p[5],
                                      p[6] - HALF * p[2] * p[0] ** 2], _RP)


def unprimed_to_primed() -> PolyMap:
    x = _RU.gens
    return PolyMap(UNPRIMED, PRIMED, [x[0], x[1], x[2], x[3], x[4] - x[0] * x[2], x[5],
                                      x[6] + HALF * x[2] * x[0] ** 2], _RU)


def coframe_unprimed() -> list[ExteriorForm]:
    x = _RU.gens
    dx = [ExteriorForm(7, {1 << i: 1}, _RU, UNPRIMED) for i in range(7)]
    return [dx[0], dx[1], dx[2], dx[3] - x[1] * dx[0], dx[4] - x[2] * dx[0],
            dx[5] + x[0] * dx[3], dx[6] + x[0] * dx[4]]


def coframe_primed() -> list[ExteriorForm]:
    f = primed_to_unprimed()
    return [pullback(f, e) for e in coframe_unprimed()]


def to_coordinates(form: ExteriorForm, coframe: Sequence[ExteriorForm]) -> ExteriorForm:
    """Replace each e^i of a constant form by the given coordinate 1-form."""
    out = coframe[0].zero()
    for m, c in form.terms.items():
        piece = ExteriorForm(7, {0: c}, coframe[0].ring, coframe[0].coords)
        for i in indices(m):
            piece = piece * coframe[i - 1]
        out = out + piece
    return out


def _on_zero_section(form: ExteriorForm) -> ExteriorForm:
    """Coefficients evaluated at x1' = x2' = x5' = x6' = 0; all differentials kept."""
    return form.subs({PRIMED[i - 1]: 0 for i in NORMAL})


def rho_primed() -> PolyMap:
    """ρ conjugated into primed coordinates."""
    inner = primed_to_unprimed()
    rho_u = PolyMap(UNPRIMED, UNPRIMED, RHO.polys, RHO.ring)
    return unprimed_to_primed().compose(rho_u.compose(inner))


def coordinate_change_check() -> dict:
    f, g = primed_to_unprimed(), unprimed_to_primed()
    inverse_ok = list(g.compose(f).polys) == list(_RP.gens) and \
        list(f.compose(g).polys) == list(_RU.gens)
    es = coframe_primed()
    dxp = [ExteriorForm(7, {1 << i: 1}, _RP, PRIMED) for i in range(7)]
    restricted = [_on_zero_section(e) for e in es]
    coframe_ok = [r == d for r, d in zip(restricted, dxp)]
    phi_p = to_coordinates(PHI, es)
    psi_p = to_coordinates(psi_local(), dxp)
    diff = psi_p - phi_p
    on_section = _on_zero_section(diff).is_zero()
    tangential = restrict(diff.subs({PRIMED[i - 1]: 0 for i in NORMAL}), TANGENT).is_zero()
    rp = rho_primed()
    expected = [-v if i + 1 in NORMAL else v for i, v in enumerate(_RP.gens)]
    rho_ok = all(a == b for a, b in zip(rp.polys, expected))
    psi_inv = pullback(rp, psi_p) == psi_p
    return {
        "inverse_maps": inverse_ok,
        "coframe_on_section": coframe_ok,
        "e5_on_section": str(restricted[4]),
        "psi_minus_phi_on_section": on_section,
        "psi_minus_phi_on_T3": tangential,
        "rho_primed_is_linear_negation": rho_ok,
        "psi_rho_invariant": psi_inv,
        "phi_closed_in_primed": d_poly(phi_p).is_zero(),
        "ok": inverse_ok and all(coframe_ok) and on_section and tangential and rho_ok and psi_inv,
    }


def radial_primitive(beta: ExteriorForm, normal: Sequence[int] = NORMAL) -> ExteriorForm:
    """α with dα = β for a closed polynomial form vanishing on the zero section.

    Uses the homotopy operator of the fibrewise scaling F_t of the normal
    coordinates: α = ∫_0^1 t^{-1} F_t^*(ι_R β) dt with R the normal Euler field,
    integrated exactly monomial by monomial.
    """
    if beta.coords is None:
        raise ValueError("radial_primitive needs a form in coordinate differentials")
    R = beta.ring
    if beta.is_zero():
        return beta.zero()
    if not d_poly(beta).is_zero():
        raise ValueError("beta is not closed")
    names = [str(s) for s in R.symbols]
    gi = {i: names.index(beta.coords[i - 1]) for i in normal}
    nmask = 0
    for i in normal:
        nmask |= 1 << (i - 1)
    zero_section = beta.subs({beta.coords[i - 1]: 0 for i in normal})
    if any(not m & nmask for m in zero_section.terms):
        raise ValueError("beta does not vanish on the zero section")
    out: dict[int, object] = {}
    for m, c in beta.terms.items():
        idx = indices(m)
        for exps, coeff in c.terms():
            mono = R({exps: coeff})
            weight = sum(exps[gi[i]] for i in normal) + bin(m & nmask).count("1")
            for pos, i in enumerate(idx):
                if i not in gi:
                    continue
                term = mono * R.gens[gi[i]] * Fraction(1, weight)
                if pos & 1:
                    term = -term
                r = m & ~(1 << (i - 1))
                out[r] = out[r] + term if r in out else term
    return ExteriorForm(beta.n, out, R, beta.coords)


def blowup_chart_check() -> dict:
    """Pull Ω = dz1∧dz2 back to both affine charts of the blown-up C^2."""
    S = poly_ring(("z", "w", "u"))
    z, w, u = S.gens
    zw = ("z", "w")
    Rzw = poly_ring(zw)
    zz, ww = Rzw.gens
    Omega = ExteriorForm(2, {0b11: 1}, poly_ring(("z1", "z2")), ("z1", "z2"))
    chart1 = PolyMap(zw, ("z1", "z2"), [zz, ww * zz], Rzw)
    chart2 = PolyMap(zw, ("z1", "z2"), [ww * zz, zz], Rzw)
    o1, o2 = pullback(chart1, Omega), pullback(chart2, Omega)
    dzdw = ExteriorForm(2, {0b11: 1}, Rzw, zw)
    half_du_dw = ExteriorForm(2, {0b11: HALF}, poly_ring(("u", "w")), ("u", "w"))
    quotient = PolyMap(zw, ("u", "w"), [zz ** 2, ww], Rzw)
    lifted = pullback(quotient, half_du_dw)
    return {
        "chart1": str(o1),
        "chart2": str(o2),
        "chart1_is_z_dz_dw": o1 == dzdw.scale(zz),
        "chart1_is_half_du_dw": o1 == lifted,
        "chart2_is_minus_half_du_dw": o2 == -lifted,
        "coefficient_in_u_w": HALF,
        "ok": o1 == lifted and o2 == -lifted,
    }


# Eguchi-Hanson potential

def bump(r, eps: float, deriv: int = 0):
    """C^2 smootherstep: 1 for r <= eps/4, 0 for r >= eps/2 (value or derivative)."""
    a, b = eps / 4.0, eps / 2.0
    r = np.asarray(r, dtype=float)
    x = np.clip((r - a) / (b - a), 0.0, 1.0)
    inside = (r > a) & (r < b)
    if deriv == 0:
        return 1.0 - (x ** 3 * (10 - 15 * x + 6 * x * x))
    if deriv == 1:
        return np.where(inside, -(30 * x ** 2 * (1 - x) ** 2) / (b - a), 0.0)
    if deriv == 2:
        return np.where(inside, -(60 * x * (1 - x) * (1 - 2 * x)) / (b - a) ** 2, 0.0)
    raise ValueError("deriv must be 0, 1 or 2")


def _eh_parts(t, r):
    """f_t - r^2, f_t' - 2r and f_t'' - 2 in cancellation-free form."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    s = r * r
    t2 = t * t
    t4 = t2 * t2
    u = np.sqrt(s * s + t4)
    h = t2 / (u + s) + 2 * np.log(r) - np.log(u + t2)
    f_minus = t2 * h
    df_minus = 2 * t4 / ((u + s) * r)
    d2f_minus = -2 * t4 * (s / (u + s) + 1) / (u * s)
    return f_minus, df_minus, d2f_minus, h, s, u


def _levi_eigenvalues(dphi, d2phi, r):
    """Eigenvalues of the complex Hessian of a radial potential, flat = (1, 1)."""
    return dphi / (2 * r), (dphi + r * d2phi) / (4 * r)


@dataclass(frozen=True)
class EHSample:
    t: float
    r: float
    f: float
    df: float
    d2f: float
    h: float
    eigenvalues_pure: tuple[float, float]
    margin_pure: float
    eigenvalues_blended: tuple[float, float] | None
    margin_blended: float | None


def eh_potential_eval(t: float, r: float, epsilon: float | None = None) -> EHSample:
    """f_t(r), its radial derivatives and the nondegeneracy margin at radius r.

    The margin is the smaller eigenvalue of the complex Hessian, normalised so
    the flat potential r^2 has margin 1.  With ``epsilon`` the blended
    potential r^2 + b(r)(f_t - r^2) is evaluated as well, b being the bump.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    fm, dfm, d2fm, h, s, u = (float(v) for v in _eh_parts(t, r))
    f, df, d2f = r * r + fm, 2 * r + dfm, 2 + d2fm
    ev = tuple(float(v) for v in _levi_eigenvalues(df, d2f, r))
    evb = None
    mb = None
    if epsilon is not None:
        b0, b1, b2 = (float(bump(r, epsilon, k)) for k in range(3))
        dphi = 2 * r + b1 * fm + b0 * dfm
        d2phi = 2 + b2 * fm + 2 * b1 * dfm + b0 * d2fm
        evb = tuple(float(v) for v in _levi_eigenvalues(dphi, d2phi, r))
        mb = min(evb)
    return EHSample(float(t), float(r), f, df, d2f, h, ev, min(ev), evb, mb)


def eh_grid_sweep(epsilon: float = 0.2, t_samples: int = 64, r_samples: int = 64,
                  t_max: float = 1.0, tol: float = 1e-10) -> dict:
    """Blended margin over t_k = k t_max / T (k = 1..T) and r in [eps/4, eps/2].

    Also samples the core r in (0, eps/4] where the potential is pure
    Eguchi-Hanson and the collar r in [eps/2, eps] where it is flat.
    """
    ts = np.linspace(t_max / t_samples, t_max, t_samples)
    rs = np.linspace(epsilon / 4, epsilon / 2, r_samples)
    T, Rg = np.meshgrid(ts, rs, indexing="ij")
    fm, dfm, d2fm, h, s, u = _eh_parts(T, Rg)
    b0, b1, b2 = bump(Rg, epsilon, 0), bump(Rg, epsilon, 1), bump(Rg, epsilon, 2)
    dphi = 2 * Rg + b1 * fm + b0 * dfm
    d2phi = 2 + b2 * fm + 2 * b1 * dfm + b0 * d2fm
    l1, l2 = _levi_eigenvalues(dphi, d2phi, Rg)
    margin = np.minimum(l1, l2)
    per_t = margin.min(axis=1)
    good = [float(t) for t, m in zip(ts, per_t) if m > tol]
    core_r = np.linspace(epsilon / (4 * r_samples), epsilon / 4, r_samples)
    core = []
    for t in ts:
        parts = _eh_parts(t, core_r)
        c1, c2 = _levi_eigenvalues(2 * core_r + parts[1], 2 + parts[2], core_r)
        core.append(float(np.minimum(c1, c2).min()))
    h_grid = _eh_parts(np.linspace(0.0, 1.0, t_samples)[:, None], rs[None, :])[3]
    k = int(np.argmin(margin))
    i, j = divmod(k, r_samples)
    best = int(np.argmax(per_t))
    return {
        "epsilon": epsilon,
        "t_samples": t_samples,
        "r_samples": r_samples,
        "min_margin": float(margin.min()),
        "min_location": (float(ts[i]), float(rs[j])),
        "per_t_min": [float(v) for v in per_t],
        "t_with_positive_margin": good,
        "best_t": float(ts[best]),
        "best_t_margin": float(per_t[best]),
        "core_min_margin": core,
        "h_finite": bool(np.all(np.isfinite(h_grid))),
        "h_max_abs": float(np.abs(h_grid).max()),
        "exists_positive": bool(good),
    }


def neighbourhood_disjointness(epsilon: Fraction) -> bool:
    """Open boxes of radius ε in (x1, x2, x5, x6) around distinct bases of A are disjoint."""
    eps = Fraction(epsilon)
    bases = [c.base for c in fixed_locus(RHO)]
    periods = (2, 1, 1, 1)

    def circ(a: Fraction, b: Fraction, p: int) -> Fraction:
        d = (a - b) % p
        return min(d, p - d)

    for a, b in combinations(bases, 2):
        if not any(circ(x, y, p) >= 2 * eps for x, y, p in zip(a, b, periods)):
            return False
    return True
