"""Random test spectra."""

import numpy as np

from haarlaw import build_spectrum, from_pairs


def random_spectrum(rng, d, degenerate=False, gap=1e-3):
    while True:
        if degenerate:
            ell = rng.integers(2, max(3, d) + 1)
            ell = min(ell, d)
            vals = rng.uniform(-1, 1, ell)
            mults = np.ones(ell, dtype=int)
            for _ in range(d - ell):
                mults[rng.integers(ell)] += 1
            pairs = list(zip(vals.tolist(), mults.tolist()))
            s = from_pairs(pairs)
        else:
            s = build_spectrum(rng.uniform(-1, 1, d), 0.0)
        if s.n_distinct >= 2 and np.min(np.diff(s.values)) >= gap:
            return s
