"""Why the evaluator carries error bounds.

The density is an alternating sum whose terms grow like (d-1)!/gap^(d-1).
For a_k = k the terms at d=40 exceed the result by ~40 orders of magnitude,
so double precision returns noise.  Float modes detect this and refuse;
high precision recomputes with MPFR until the bound is met.
"""

import numpy as np

from haarlaw import PrecisionExceeded, PrecisionPolicy, SpectrumKind, compile_law, density, generate

fractions = np.array([0.1, 0.25, 0.5])
for d in (5, 10, 20, 40):
    s = generate(SpectrumKind.number_operator(), d)
    law_fast = compile_law(s, PrecisionPolicy.fast())
    print(f"d={d}: largest |c_k| = {np.max(np.abs(law_fast.coefficients)):.3e}")
    pts = 1 + (d - 1) * fractions
    try:
        print("   fast_float    ", density(law_fast, pts))
    except PrecisionExceeded as exc:
        print("   fast_float     refused:", exc)
    print("   high_precision", density(compile_law(s, PrecisionPolicy.high()), pts))
