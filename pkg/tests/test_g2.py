from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2check import linalg
from g2check.exterior import (ExteriorForm, PolyMap, coordinate_coframe, d_poly, mask_of, monomial,
                              parse_form, pullback_linear)
from g2check.g2 import (PHI, PHI0, THETA, ComplexForm, SU3Data, Psi_from_su2, chi, cross_product,
                        hitchin_form, hodge_star, inner_product, is_g2_form, su2_data,
                        su3_data, psi_local, su3_compatibility_check, torsion_flags, unit)
from g2check.lie import abelian_algebra, nilpotent_algebra

ID7 = tuple(tuple(Fraction(int(i == j)) for j in range(7)) for i in range(7))


def perm_sign(p):
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def as_tensor(form):
    """Alternating tensor of a constant form as a dict on ordered index tuples."""
    out = {}
    for m, c in form.terms.items():
        idx = tuple(i for i in range(form.n) if m >> i & 1)
        for p in permutations(range(len(idx))):
            out[tuple(idx[i] for i in p)] = c * perm_sign(p)
    return out


def hitchin_oracle(phi, i, j):
    """(1/6)(e_i⌟φ)∧(e_j⌟φ)∧φ through the permutation-sum definition of the wedge."""
    T = as_tensor(phi)
    a = {k[1:]: v for k, v in T.items() if k[0] == i}
    b = {k[1:]: v for k, v in T.items() if k[0] == j}
    total = Fraction(0)
    for p in permutations(range(7)):
        x = a.get(p[0:2])
        if not x:
            continue
        y = b.get(p[2:4])
        if not y:
            continue
        z = T.get(p[4:7])
        if z:
            total += perm_sign(p) * x * y * z
    return total / (2 * 2 * 6) / 6


def test_hitchin_phi0_oracle():
    B = hitchin_form(PHI0)
    for i in range(7):
        for j in range(i, 7):
            assert B[i][j] == hitchin_oracle(PHI0, i, j)
    assert B == [list(r) for r in ID7]


def test_hitchin_phi_oracle_diagonal():
    B = hitchin_form(PHI)
    for i in range(7):
        assert B[i][i] == hitchin_oracle(PHI, i, i) == 1
    assert B == [list(r) for r in ID7]


def test_degenerate_forms():
    assert linalg.rank(hitchin_form(monomial(7, "123")), 7) < 7
    assert is_g2_form(ExteriorForm(7)).status == "degenerate"
    assert is_g2_form(monomial(7, "123")).status == "degenerate"
    assert is_g2_form(-PHI0).status == "opposite-orientation"
    with pytest.raises(ValueError):
        is_g2_form(monomial(7, "12"))


def test_g2_positive_with_identity_metric():
    for phi in (PHI0, PHI):
        s = is_g2_form(phi)
        assert s.status == "G2-positive" and s.metric_exact and s.metric == ID7


def test_scaled_form_has_exact_scaled_metric():
    s = is_g2_form(PHI0.scale(8))
    assert s.metric_exact and s.metric[0][0] == 4


def test_star_phi_is_theta():
    assert hodge_star(PHI) == THETA


def test_star_trivial_cases():
    assert hodge_star(ExteriorForm(7, {0: 1})) == monomial(7, "1234567")
    assert hodge_star(hodge_star(monomial(7, "12"))) == monomial(7, "12")


def test_torsion_flags():
    flags = torsion_flags(PHI, nilpotent_algebra())
    assert flags["closed"] and not flags["coclosed"]
    assert nilpotent_algebra().d(parse_form("e^{257} + e^{347} + e^{356}", 7)).is_zero()
    flat = torsion_flags(PHI, abelian_algebra())
    assert flat["torsion_free"]


def test_dstar_phi_matches_coordinate_route():
    # express e^i in dx's and differentiate with d_poly: independent of the CE differential
    R, dx, x = coordinate_coframe([f"x{i}" for i in range(1, 8)])
    cof = [dx[0], dx[1], dx[2], dx[3] - x[1] * dx[0], dx[4] - x[2] * dx[0], dx[5] + x[0] * dx[3], dx[6] + x[0] * dx[4]]

    def to_coords(form):
        out = ExteriorForm(7, {}, R, dx[0].coords)
        for m, c in form.terms.items():
            piece = ExteriorForm(7, {0: c}, R, dx[0].coords)
            for i in range(7):
                if m >> i & 1:
                    piece = piece * cof[i]
            out = out + piece
        return out

    d_theta = nilpotent_algebra().d(THETA)
    assert not d_theta.is_zero()
    assert d_poly(to_coords(THETA)) == to_coords(d_theta)
    assert d_poly(to_coords(PHI)).is_zero()


def test_cross_product_examples():
    assert cross_product(PHI0, unit(7, 1), unit(7, 2)) == unit(7, 7)
    assert cross_product(PHI0, unit(7, 1), unit(7, 3)) == unit(7, 5)
    assert not any(cross_product(PHI0, unit(7, 4), unit(7, 4)))


def test_phi_wedge_star_phi():
    assert PHI0 * hodge_star(PHI0) == monomial(7, "1234567").scale(7)


def test_su3_compatibility():
    data = su3_data()
    assert su3_compatibility_check(data, PHI)
    e = lambda s: monomial(7, s)
    flipped = SU3Data(e("23") - e("45") + e("67"), data.Omega, data.e1)
    assert not su3_compatibility_check(flipped, PHI)


def test_Psi_equals_local_psi():
    omega, Omega = su2_data()
    assert Psi_from_su2(omega, Omega) == psi_local()
    assert omega == monomial(7, "12") + monomial(7, "56")
    assert Omega.re == monomial(7, "15") - monomial(7, "26")
    assert Omega.im == monomial(7, "25") + monomial(7, "16")


def test_chi_examples():
    assert not any(chi(PHI, unit(7, 3), unit(7, 4), unit(7, 7)))
    assert not any(chi(PHI, unit(7, 1), unit(7, 2), unit(7, 3)))
    assert any(chi(PHI, unit(7, 1), unit(7, 2), unit(7, 4)))


rat = st.integers(-4, 4)
vec = st.lists(rat, min_size=7, max_size=7)


@settings(max_examples=100, deadline=None)
@given(vec, vec)
def test_cross_product_norm_identity(u, v):
    P = cross_product(PHI, u, v)
    dot = lambda a, b: sum(Fraction(x) * y for x, y in zip(a, b))
    assert dot(P, P) == dot(u, u) * dot(v, v) - dot(u, v) ** 2
    assert dot(P, u) == 0 == dot(P, v)
    assert cross_product(PHI, v, u) == [-c for c in P]


@st.composite
def matrices(draw):
    while True:
        A = [[Fraction(draw(st.integers(-2, 2))) + (1 if i == j else 0) for j in range(7)] for i in range(7)]
        if linalg.det(A) > 0:
            return A


@settings(max_examples=25, deadline=None)
@given(matrices())
def test_stability_under_orientation_preserving_maps(A):
    assert is_g2_form(pullback_linear(A, PHI0)).status == "G2-positive"


@st.composite
def forms(draw, k):
    from itertools import combinations
    pool = [mask_of(c) for c in combinations(range(1, 8), k)]
    chosen = draw(st.lists(st.sampled_from(pool), max_size=4))
    return ExteriorForm(7, {m: draw(rat) for m in chosen})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 7).flatmap(lambda k: st.tuples(forms(k), forms(k), st.just(k))))
def test_star_isometry_and_involution(args):
    a, b, k = args
    assert inner_product(hodge_star(a), hodge_star(b)) == inner_product(a, b)
    assert hodge_star(hodge_star(a)) == a.scale((-1) ** (k * (7 - k)))


def test_star_with_diagonal_metric():
    g = linalg.diagonal([4, 1, 1, 1, 1, 1, 1])
    # e^1 has norm 1/2, volume form 2 e^{1..7}
    assert hodge_star(monomial(7, "1"), g) == monomial(7, "234567").scale(Fraction(1, 2))
