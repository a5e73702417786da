"""Minimal-model morphisms to the orbifold and resolution cohomology.

The built-in models fail injectivity on H^4; completing them with one round
of degree-3 generators repairs this.
"""

from g2check.cdga import builtin_models, complete_model, quasi_iso_range

m = builtin_models()
for key in ("rho", "theta"):
    f = m[key]
    for row in quasi_iso_range(f, 3)["degrees"]:
        status = "ok" if row["pass"] else f"kernel {row['kernel_dim']}, e.g. {row['kernel_sample'][0]}"
        print(f"{key}: H^{row['degree']} {row['source_dim']} -> {row['target_dim']} ({row['required']}) {status}")
    g, log = complete_model(f, 3)
    print(f"{key} completed with {sum(r['added'] for r in log)} generators:",
          "ok" if quasi_iso_range(g, 3)["ok"] else "still failing")
