"""A degenerate observable, seen through density, CDF and three moment routes."""

import numpy as np

from haarlaw import (compile_law, cdf, char_fn, cumulants, density, from_pairs, moments_compact,
                     moments_permutation, moments_quadrature, RequiresNonDegenerate)

s = from_pairs([(-1.0, 2), (0.0, 3), (2.0, 1)])
print(s, " d =", s.d, " mean =", s.mean)

law = compile_law(s)
print("terms in the residue sum:", law.n_terms)
print("powers p per term:        ", law.power)

x = np.linspace(-1.0, 2.0, 7)
print("x       ", x)
print("density ", np.array2string(density(law, x), precision=6))
print("cdf     ", np.array2string(cdf(law, x), precision=6))

# The compact spectral formula needs distinct eigenvalues.
try:
    moments_compact(s, 3)
except RequiresNonDegenerate as exc:
    print("compact route:", exc)

perm = cumulants(moments_permutation(s, 3))
quad = cumulants(moments_quadrature(law, 3))
print("permutation m_n:", perm.m, " kappa:", perm.kappa)
print("quadrature  m_n:", quad.m, " kappa:", quad.kappa)

lam = np.array([0.0, 0.5, 2.0, 10.0])
print("chi(lam):", np.array2string(char_fn(law, lam), precision=6))
