"""Approach to a Gaussian.

Standardise Z = (A - mean)/sqrt(k_2).  For a_k = k^alpha the skewness
k_3(Z) falls like 1/sqrt(d).  For a_k = ln k the leading-order cumulants
are 1/d and -4/d^2, but the corrections decay slowly (only like
(ln d)^3/d relative to the leading term).
"""

import numpy as np

from haarlaw import SpectrumKind, clt_diagnostics

dims = [16, 32, 64, 128, 256]
for kind in (SpectrumKind.power(1.0), SpectrumKind.power(2.0), SpectrumKind.log()):
    rep = clt_diagnostics(kind, dims, z=[])
    print(f"{kind.tag}({kind.param}):  k3(Z) =", np.array2string(rep.kappa3_z, precision=4),
          f" slope {rep.slope:.3f}")

rep = clt_diagnostics(SpectrumKind.log(), [64, 256, 1024], z=[])
d = np.array(rep.d_grid)
print("log spectrum  d      ", d)
print("              d k2   ", np.array2string(d * rep.kappa2, precision=4))
print("              d^2 k3 ", np.array2string(d ** 2 * rep.kappa3, precision=4))

rep = clt_diagnostics(SpectrumKind.power(1.0), [8, 16, 32, 64])
print("sup |P_Z - normal| for a_k = k:", np.array2string(rep.sup_norm, precision=5))
