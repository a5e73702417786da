"""Cohomology of the nilmanifold and of its quotient by rho."""

from g2check.exterior import format_form
from g2check.lie import RHO_SIGNS, betti_numbers, ce_cohomology, diagonal_action, invariant_cohomology, nilpotent_algebra

g = nilpotent_algebra()
print("structure equations:")
print(g.describe())
print("Jacobi defects:", g.jacobi_defects() or "none")

# Nomizu: de Rham cohomology of M is the cohomology of the CE complex
print("b(M)    =", betti_numbers(g))
for k in (1, 2):
    H = ce_cohomology(g, k)
    print(f"H^{k}(M) basis:", ", ".join(format_form(r) for r in H.representatives))

# rho negates e1, e2, e5, e6; the quotient sees only invariant classes
rho = [diagonal_action(RHO_SIGNS)]
print("b(Mhat) =", betti_numbers(g, rho))
for k in (1, 2):
    H = invariant_cohomology(g, k, rho)
    print(f"H^{k}(Mhat) basis:", ", ".join(format_form(r) for r in H.representatives))
