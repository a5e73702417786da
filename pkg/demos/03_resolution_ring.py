"""Cohomology ring of the resolution and the torsion-free obstruction scan."""

from g2check.exterior import monomial
from g2check.ring import build_resolved_ring, invariant_ring, obstruction_scan, torus_ring

R = build_resolved_ring(invariant_ring())
print("b(Mtilde) =", R.betti)

e = lambda s: monomial(7, s)
a1, a2 = R.from_form(e("16")), R.from_form(e("25") + e("34"))
E1 = R.by_label(2, "1*E1")
print("a1^2   =", a1 * a1)
print("a1*a2  =", a1 * a2, "  (twice the class of e^{1256})")
print("E1^2   =", E1 * E1)

# a torsion-free structure would need some eta*omega^3 != 0
cert = obstruction_scan(R)
print(f"{cert.monomials_checked} coefficients of eta*omega^3, nonzero: {len(cert.nonzero)}")
ctrl = obstruction_scan(torus_ring())
print(f"T^7 control: {len(ctrl.nonzero)} nonzero, e.g. {ctrl.nonzero[0]}")
