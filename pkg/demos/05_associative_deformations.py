"""Associative tori, the deformation operator D1 and its Fourier kernel."""

from g2check.deform import (assemble_D1, associative_check, component_parametrization, fourier_kernel,
                            levi_civita, mode_certificate, table_comparison)
from g2check.lie import nilpotent_algebra

conn = levi_civita(nilpotent_algebra())
tab = table_comparison(conn)
std = tab["conventions"]["standard"]
print(f"connection check-point values reproduced: {std['matches']} of {tab['total']}")
for m in std["mismatches"]:
    print(f"  {m['table']} {m['entry']}: reference {m['reference']}, computed {m['computed']}")

for i in range(1, 9):
    param, info = component_parametrization(i)
    v = associative_check(param, ("y1", "y2", "y3"))
    print(f"torus {i} base {tuple(map(str, info['base']))}: calibrated {v.calibrated}")

op = assemble_D1(conn)
print("zero-order part of D1:", [[str(x) for x in row] for row in op.zero_order], "sign flag", op.sign_flag)
cert = mode_certificate((1, 2, 0))
print("mode (1,2,0): Pfaffian", cert.pfaffian, "tau^4 coefficient", cert.tau4)
res = fourier_kernel(6)
print(f"kernel dimension: {res.total_dimension} (modes {res.kernel_modes})")
