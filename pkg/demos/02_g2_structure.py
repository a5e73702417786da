"""The closed G2 form on the nilmanifold: positivity, metric and torsion."""

from g2check.exterior import format_form
from g2check.g2 import PHI, THETA, hodge_star, is_g2_form, torsion_flags
from g2check.lie import nilpotent_algebra

st = is_g2_form(PHI)
print("phi =", format_form(PHI))
print("status:", st.status, "| metric is the identity:", st.metric == tuple(tuple(int(i == j) for j in range(7))
                                                                           for i in range(7)))
print("*phi == theta:", hodge_star(PHI) == THETA)

flags = torsion_flags(PHI, nilpotent_algebra())
print("d phi  =", format_form(flags["dphi"]) or "0")
print("d*phi  =", format_form(flags["dstarphi"]))
print("closed but not coclosed:", flags["closed"] and not flags["coclosed"])
