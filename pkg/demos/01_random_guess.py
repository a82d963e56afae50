"""How well does a random state overlap a fixed one?

For A = |1><1| the expectation value is the fidelity |<1|psi>|^2, and its
law is the beta density (d-1)(1-x)^(d-2).  The general residue formula,
which treats 0 as a (d-1)-fold degenerate eigenvalue, reproduces it.
"""

import numpy as np

from haarlaw import SpectrumKind, compile_law, density, cdf, generate, moments_fidelity

x = np.linspace(0.0, 1.0, 6)
for d in (2, 3, 8, 30):
    law = compile_law(generate(SpectrumKind.projector(1), d))
    p = density(law, x)
    beta = (d - 1) * (1 - x) ** (d - 2)
    print(f"d={d:3d}  P(x)   =", np.array2string(p, precision=5))
    print("        beta   =", np.array2string(beta, precision=5))
    print("        cdf(x) =", np.array2string(cdf(law, x), precision=5))

print()
print("fidelity moments n!(d-1)!/(d+n-1)! for d=10:")
print(np.array(moments_fidelity(10, 5).m))
print("mean fidelity is 1/d:", moments_fidelity(10, 1).m[0])
