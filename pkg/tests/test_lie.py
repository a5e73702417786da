import time
from fractions import Fraction

import pytest

from g2check import linalg
from g2check.exterior import monomial, parse_form
from g2check.lie import (RHO_SIGNS, abelian_algebra, betti_numbers, ce_cohomology, diagonal_action,
                         euler_characteristic, invariant_cohomology, nilpotent_algebra, parse_structure,
                         poincare_pairing)

G = nilpotent_algebra()
RHO = [diagonal_action(RHO_SIGNS)]

H2_LISTED = ["e^{16}", "e^{17}", "e^{23}", "e^{24}", "e^{25} + e^{34}", "e^{35}", "e^{27} - e^{45} - e^{36}"]
H3_LISTED = ["e^{136}", "e^{146}", "e^{147}", "e^{157}", "e^{167}", "e^{234}", "e^{235}", "e^{236} + e^{245}",
             "e^{237} + e^{345}", "e^{246}", "e^{357}", "e^{247} + e^{256} + e^{346}", "e^{257} + e^{347} + e^{356}"]
H3_INV_LISTED = ["e^{136}", "e^{146}", "e^{157}", "e^{167}", "e^{235}", "e^{236} + e^{245}", "e^{246}",
                 "e^{257} + e^{347} + e^{356}"]


def listed_span_matches(H, texts):
    forms = [parse_form(t, 7) for t in texts]
    assert all(G.d(f).is_zero() for f in forms)
    coords = [H.class_of(f) for f in forms]
    return len(forms) == H.dim and linalg.rank(coords, H.dim) == H.dim


def test_jacobi_holds():
    assert G.jacobi_defects() == []


def test_corrupted_structure_fails_jacobi():
    from g2check.lie import STRUCTURE_EQUATIONS
    bad = parse_structure(STRUCTURE_EQUATIONS.replace("de^6 = e^{14}", "de^6 = e^{45}"))
    assert bad.jacobi_defects() == [6]
    with pytest.raises(ValueError):
        ce_cohomology(bad, 1)


def test_brackets_follow_sign_convention():
    assert G.bracket(1, 2) == [0, 0, 0, -1, 0, 0, 0]
    assert G.bracket(2, 1) == [0, 0, 0, 1, 0, 0, 0]


def test_betti_numbers_of_M():
    t = time.perf_counter()
    dims = [ce_cohomology(G, k).dim for k in (1, 2, 3)]
    assert dims == [3, 7, 13]
    assert time.perf_counter() - t < 1.0


def test_h1_classes():
    H1 = ce_cohomology(G, 1)
    assert [str(r) for r in H1.representatives] == ["e^{1}", "e^{2}", "e^{3}"]


def test_listed_bases_span_cohomology():
    assert listed_span_matches(ce_cohomology(G, 2), H2_LISTED)
    assert listed_span_matches(ce_cohomology(G, 3), H3_LISTED)


def test_invariant_cohomology():
    H1 = invariant_cohomology(G, 1, RHO)
    assert H1.dim == 1 and H1.representatives[0] == monomial(7, "3")
    H2 = invariant_cohomology(G, 2, RHO)
    span = [parse_form("e^{16}", 7).vector(2), parse_form("e^{25} + e^{34}", 7).vector(2)]
    assert linalg.span_equal([r.vector(2) for r in H2.representatives], span, 21)
    H3 = invariant_cohomology(G, 3, RHO)
    assert H3.dim == 8
    assert listed_span_matches(H3, H3_INV_LISTED)


def test_representatives_are_deterministic():
    a = [str(r) for r in ce_cohomology(G, 3).representatives]
    b = [str(r) for r in ce_cohomology(nilpotent_algebra(), 3).representatives]
    assert a == b


def test_euler_characteristic_zero():
    assert euler_characteristic(G) == 0


@pytest.mark.parametrize("actions", [None, RHO])
def test_poincare_duality(actions):
    for k in range(8):
        if actions:
            Hk, Hc = invariant_cohomology(G, k, actions), invariant_cohomology(G, 7 - k, actions)
        else:
            Hk, Hc = ce_cohomology(G, k), ce_cohomology(G, 7 - k)
        P = poincare_pairing(Hk, Hc)
        assert Hk.dim == Hc.dim
        assert linalg.rank(P, Hc.dim) == Hk.dim


def test_full_betti_vectors():
    assert betti_numbers(G) == [1, 3, 7, 13, 13, 7, 3, 1]
    assert betti_numbers(G, RHO) == [1, 1, 2, 8, 8, 2, 1, 1]
    assert betti_numbers(abelian_algebra()) == [1, 7, 21, 35, 35, 21, 7, 1]


def test_action_must_commute_with_d():
    bad = [diagonal_action((-1, 1, 1, 1, 1, 1, 1))]
    with pytest.raises(ValueError):
        invariant_cohomology(G, 1, bad)


def test_exact_form_has_zero_class():
    H = ce_cohomology(G, 2)
    assert H.is_exact(G.d(monomial(7, "4")))
    assert not H.is_exact(monomial(7, "16"))
    with pytest.raises(ValueError):
        H.class_of(monomial(7, "14") * Fraction(1) + monomial(7, "47"))
