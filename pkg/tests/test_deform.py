import cmath
import math
import time
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from g2check import linalg
from g2check.deform import (DISPLAYED_D1, NORMAL, REFERENCE_DUAL, REFERENCE_PERP, TANGENT, assemble_D1,
                            associative_check, associative_family, coassociative_fibration_check,
                            component_parametrization, fourier_kernel, frame_duality_check, levi_civita,
                            mode_certificate, special_lagrangian_check, table_comparison)
from g2check.exterior import PolyMap
from g2check.g2 import PHI
from g2check.lie import nilpotent_algebra
from g2check.local_model import UNPRIMED
from g2check.scalars import poly_ring


@pytest.fixture(scope="module")
def conn():
    return levi_civita(nilpotent_algebra())


def _cartan_oracle(spec):
    # independent route: solve d e^i = -Σ_j w^i_j ∧ e^j for skew connection 1-forms,
    # unknowns w^i_j(e_k) with i < j
    n = spec.n
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    unknowns = [(i, j, k) for (i, j) in pairs for k in range(1, n + 1)]
    pos = {u: c for c, u in enumerate(unknowns)}
    rows, rhs = [], []
    for i in range(1, n + 1):
        for a, b in pairs:
            row = [Fraction(0)] * len(unknowns)
            # coefficient of e^{ab} in -Σ_j w^i_j ∧ e^j, with w^i_j = Σ_k w(i,j,k) e^k
            for j in range(1, n + 1):
                for k, other, sign in ((a, b, 1), (b, a, -1)):
                    if other != j or i == j:
                        continue
                    key, s = ((i, j, k), 1) if i < j else ((j, i, k), -1)
                    row[pos[key]] -= sign * s
            rows.append(row)
            rhs.append(spec.de[i - 1].coefficient((a, b)))
    sol = linalg.solve(rows, rhs, len(unknowns))
    assert sol is not None

    def w(i, j, k):
        if i == j:
            return Fraction(0)
        return sol[pos[(i, j, k)]] if i < j else -sol[pos[(j, i, k)]]
    # ∇_{e_k} e_j = Σ_i w^i_j(e_k) e_i
    return {(k, j, i): w(i, j, k) for i in range(1, n + 1) for j in range(1, n + 1) for k in range(1, n + 1)}


def test_levi_civita_matches_cartan_oracle(conn):
    oracle = _cartan_oracle(nilpotent_algebra())
    for (k, j, i), v in oracle.items():
        assert conn.gamma(k, j, i) == v


def test_metric_compatible_and_torsion_free(conn):
    spec = nilpotent_algebra()
    r = range(1, 8)
    for i, j, k in product(r, r, r):
        assert conn.gamma(i, j, k) + conn.gamma(i, k, j) == 0
        assert conn.gamma(i, j, k) - conn.gamma(j, i, k) == spec.structure_constant(i, j, k)
    assert conn.defects() == {"metric": [], "torsion": []}


def test_documented_examples(conn):
    assert conn.perp_double(3, 1) == {5: 1}
    assert conn.perp_double(4, 1) == {2: 1, 6: 1}
    assert conn.dual_double(1, 5) == {3: 1, 7: -1}


def test_table_comparison_conventions(conn):
    rep = table_comparison(conn)
    assert rep["chosen_convention"] == "standard"
    std = rep["conventions"]["standard"]
    flipped = rep["conventions"]["flipped"]
    total = len(REFERENCE_PERP) + len(REFERENCE_DUAL)
    assert std["matches"] > flipped["matches"]
    assert std["matches"] + len(std["mismatches"]) == total


def test_table_mismatches_violate_identities(conn):
    # every entry the computation disagrees with must itself break metric
    # compatibility or torsion-freeness when read together with the other entries
    rep = table_comparison(conn)
    for m in rep["conventions"]["standard"]["mismatches"]:
        assert m["witness"], m


def test_frame_duality():
    rep = frame_duality_check()
    assert rep["ok"]
    assert rep["pairings"][(4, 1)] == "0"
    assert rep["pairings"][(6, 4)] == "0"
    assert all(rep["pairings"][(i, i)] == "1" for i in range(1, 8))
    assert rep["brackets_match_structure_constants"]


def test_assemble_d1_matches_displayed(conn):
    op = assemble_D1(conn)
    assert op.sign_flag == 1
    assert op.mismatches == []
    assert op.first_order[3][0][1] == -1
    assert op.zero_order == [[0, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]]
    for k in TANGENT:
        assert op.first_order[k] == DISPLAYED_D1["first_order"][k]
    assert op.pairing == "omega_first"
    assert op.alternatives["e_i_first"] != op.zero_order


def test_d1_kills_constant_tangent_directions(conn):
    op = assemble_D1(conn)
    for v in ([0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]):
        assert op.apply_constant(v) == [0, 0, 0, 0]
    assert op.apply_constant([1, 0, 0, 0]) != [0, 0, 0, 0]


def test_fourier_kernel_n10_runtime():
    t = time.perf_counter()
    res = fourier_kernel(10)
    assert time.perf_counter() - t < 10.0
    assert res.total_dimension == 3
    assert res.modes_checked == 21 ** 3
    assert res.kernel_modes == [(0, 0, 0)]
    assert res.zero_mode_kernel == [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert res.pfaffian_ok and res.conjugation_ok


def _pfaffian_oracle(n):
    n3, n4, n7 = n
    # skew first-order symbol entries from the displayed matrix, a_rc for r < c
    a12, a13, a14, a23, a24, a34 = -n3, n4, -n7, -n7, -n4, -n3
    return a12 * a34 - a13 * a24 + a14 * a23


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-30, 30)] * 3))
def test_mode_pfaffian_property(n):
    cert = mode_certificate(n)
    pf = _pfaffian_oracle(n)
    assert cert.pfaffian == pf == n[0] ** 2 + n[1] ** 2 + n[2] ** 2
    assert cert.tau4 == pf * pf
    if any(n):
        assert cert.kernel_dimension == 0 and not cert.identically_zero


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.integers(-10, 10)] * 3))
def test_mode_conjugation(n):
    a, b = mode_certificate(n), mode_certificate(tuple(-x for x in n))
    assert b.coefficients == [(re, -im) for re, im in a.coefficients]


@pytest.mark.parametrize("n", [(1, 0, 0), (0, 2, -1), (3, 1, 4)])
def test_mode_determinant_numeric_oracle(n):
    # independent route: float determinant with tau = 2*pi
    import numpy as np
    from g2check.deform import symbol_matrix_numeric
    M = symbol_matrix_numeric(n, 2 * math.pi)
    val = complex(np.linalg.det(M))
    cert = mode_certificate(n)
    poly = sum(complex(float(re), float(im)) * (2 * math.pi) ** p for p, (re, im) in enumerate(cert.coefficients))
    assert cmath.isclose(val, poly, rel_tol=1e-9)
    assert abs(val) > 1


def test_associative_family():
    fam = associative_family()
    rep = associative_check(fam, ("y1", "y2", "y3"))
    assert rep.calibrated and rep.chi_zero
    assert rep.phi_value == "1" and rep.gram == "1"
    assert rep.restricted == "dy1^dy2^dy3"


def test_special_lagrangian_y0():
    fam = associative_family()
    R = poly_ring(("y1", "y2", "y3"))
    y1, y2, y3 = R.gens
    y0 = fam.compose(PolyMap(("y1", "y2", "y3"), fam.source, [0, 0, 0, y1, y2, y3], R))
    rep = special_lagrangian_check(y0, ("y1", "y2", "y3"))
    assert rep["omega_zero"] and rep["im_Omega_zero"]
    assert rep["re_Omega_value"] == "-1"


def test_non_associative_plane():
    R = poly_ring(("s", "t", "u"))
    s, t, u = R.gens
    # through the origin along e1, e2, e4 (x1 = 0 keeps ∂4 = e4)
    param = PolyMap(("s", "t", "u"), UNPRIMED, [s, t, 0, u, 0, 0, 0], R)
    rep = associative_check(param, ("s", "t", "u"))
    assert not rep.chi_zero and not rep.calibrated


def test_degenerate_parametrization():
    R = poly_ring(("s", "t", "u"))
    s, t, u = R.gens
    param = PolyMap(("s", "t", "u"), UNPRIMED, [0, 0, s + t, u, 0, 0, 0], R)
    with pytest.raises(ValueError, match="degenerate"):
        associative_check(param, ("s", "t", "u"))


@pytest.mark.parametrize("index", range(1, 9))
def test_all_eight_components_associative(index):
    param, info = component_parametrization(index)
    rep = associative_check(param, ("y1", "y2", "y3"))
    assert rep.calibrated and rep.chi_zero
    assert rep.tangent_frame == [[0, 0, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0, 1]]


def test_straight_component_at_x1_one_is_not_associative():
    _, info = component_parametrization(5)
    assert info["base"][0] == 1 and info["sheared"]
    R = poly_ring(("y1", "y2", "y3"))
    y1, y2, y3 = R.gens
    b = info["base"]
    straight = PolyMap(("y1", "y2", "y3"), UNPRIMED, [b[0], b[1], y1, y2, b[2], b[3], y3], R)
    assert not associative_check(straight, ("y1", "y2", "y3")).calibrated


def test_coassociative_fibration():
    rep = coassociative_fibration_check()
    assert rep["phi_on_fiber_zero"]
    assert rep["theta_over_volume"] == "1"
    assert rep["invariance"] == {"B(x1)": True, "C": True, "E": True}
    assert rep["singular_base"] == [(Fraction(0), Fraction(0)), (Fraction(0), Fraction(1, 2)),
                                    (Fraction(1), Fraction(0)), (Fraction(1), Fraction(1, 2))]
    assert rep["lattice_compatible"]
    assert rep["ok"]


def test_singular_base_brute_force_oracle():
    # grid search of (x1, x2) with -x ≡ x modulo (2Z, Z) at denominator 12
    found = []
    for a in range(24):
        for b in range(12):
            x1, x2 = Fraction(a, 12), Fraction(b, 12)
            if (2 * x1) % 2 == 0 and (2 * x2) % 1 == 0:
                found.append((x1, x2))
    assert coassociative_fibration_check()["singular_base"] == found


def test_fibration_detects_bad_subspace():
    rep = coassociative_fibration_check(fiber=(3, 4, 5, 6))
    assert not rep["phi_on_fiber_zero"] and not rep["ok"]
