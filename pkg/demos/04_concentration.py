"""Exact tails against Levy's lemma.

For the random guess the exact tail decays like exp(-eps d); Levy's bound
only gives exp(-eps^2 d / 387).  For a_k = k the tail of 1 - cdf(mean + eps)
is roughly exponential in eps, with a rate that falls as d grows.
"""

import numpy as np

from haarlaw import SpectrumKind, generate, levy_compare, number_operator_tail
from haarlaw.analysis import NUMBER_OPERATOR_LEVY_C, RANDOM_GUESS_LEVY_C

print(f"random guess Levy constant C = 1/{1 / RANDOM_GUESS_LEVY_C:.1f}")
eps = np.array([0.001, 0.002, 0.005, 0.01])
rep = levy_compare(generate(SpectrumKind.projector(1), 1000), eps)
print("eps              ", eps)
print("exact tail       ", np.array2string(rep.exact_tail, precision=4))
print("e^-1 e^(-eps d)  ", np.array2string(np.exp(-1 - eps * 1000), precision=4))
print("Levy bound       ", np.array2string(rep.levy_bound, precision=4))

print()
print(f"number operator: Levy constant C' = {NUMBER_OPERATOR_LEVY_C:.4f}")
for d in (50, 100, 200, 400):
    r = number_operator_tail(d)
    print(f"  d={d:4d}  B(d,0)={r.exact_tail[0]:.3f}  fitted C={r.exact_rate:.3f}  alpha={r.exact_prefactor:.3f}")
