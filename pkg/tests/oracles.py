"""Reference implementations that share no code with haarlaw."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def residue_coefficients_exact(values, mults):
    """c_{k,M} by literal enumeration of compositions, in exact rationals.

    Returns a list ordered by (k, M) with M = 0..n_k-1.
    """
    a = [Fraction(v) for v in values]
    d = sum(mults)
    out = []
    for k, nk in enumerate(mults):
        others = [j for j in range(len(a)) if j != k]
        for M in range(nk):
            beta = Fraction(0)
            for m in compositions(M, len(others)):
                term = Fraction(1)
                for j, mj in zip(others, m):
                    nj = mults[j]
                    term *= Fraction(math.comb(nj + mj - 1, mj)) / (a[k] - a[j]) ** (nj + mj)
                beta += term
            scale = Fraction(math.factorial(d - 1),
                             2 * math.factorial(d + M - nk - 1) * math.factorial(nk - 1 - M))
            out.append((-1) ** M * scale * beta)
    return out


def bspline_density(knots, x):
    """Density of sum_i w_i t_i, w ~ Dirichlet(1,...,1), via Cox-de Boor.

    This is the Curry-Schoenberg B-spline with knots t (repeats allowed),
    normalised to unit integral.  Right-continuous at interior knots.
    """
    t = np.sort(np.asarray(knots, dtype=float))
    n = len(t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    # order-1 basis: indicator of [t_i, t_{i+1})
    basis = [((x >= t[i]) & (x < t[i + 1])).astype(float) for i in range(n - 1)]
    for order in range(2, n):
        new = []
        for i in range(n - order):
            left = t[i + order - 1] - t[i]
            right = t[i + order] - t[i + 1]
            term = np.zeros_like(x)
            if left > 0:
                term += (x - t[i]) / left * basis[i]
            if right > 0:
                term += (t[i + order] - x) / right * basis[i + 1]
            new.append(term)
        basis = new
    # single normalised B-spline of order n-1; M = (n-1)/(t_last - t_first) N
    return (n - 1) / (t[-1] - t[0]) * basis[0]


def beta_density(d, x):
    x = np.asarray(x, dtype=float)
    return (d - 1) * (1 - x) ** (d - 2)


def permutation_moment_bruteforce(eigs, n):
    """m_n = (d-1)!/(d+n-1)! sum_pi tr(P_pi A^{(x)n}) by explicit index sums.

    Only sensible for tiny d and n: the trace is summed over all d^n index
    tuples for each permutation.
    """
    eigs = [Fraction(v) for v in eigs]
    d = len(eigs)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        for idx in itertools.product(range(d), repeat=n):
            # A diagonal: <i|P_pi A^{(x)n}|i> nonzero iff i_{pi(r)} = i_r for all r
            if all(idx[perm[r]] == idx[r] for r in range(n)):
                total += math.prod((eigs[i] for i in idx), start=Fraction(1))
    return Fraction(math.factorial(d - 1), math.factorial(d + n - 1)) * total


def fourier_charfn(density_fn, lo, hi, lam, breaks=(), nodes=80):
    """int P(x) e^{i lam x} dx with Gauss-Legendre on each piece between ``breaks``.

    ``density_fn`` must accept arrays.  P is a polynomial on each piece and
    the exponential is entire, so 80 nodes per piece are ample for |lam| <= 40.
    """
    pts = [lo] + sorted(b for b in breaks if lo < b < hi) + [hi]
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        half = 0.5 * (b - a)
        x = a + half * (xg + 1)
        total += np.sum(half * wg * np.asarray(density_fn(x)) * np.exp(1j * lam * x))
    return complex(total)


def tail_random_guess(d, eps):
    """Prob(|<1|psi>|^2 - 1/d >= eps) = (1 - 1/d - eps)^{d-1}."""
    with mpmath.workdps(50):
        base = 1 - mpmath.mpf(1) / d - eps
        return float(base ** (d - 1)) if base > 0 else 0.0


def log_cumulants(d):
    """k_2, k_3 of A(psi) for a_k = ln k from the Dirichlet cumulant formulas."""
    with mpmath.workdps(60):
        a = [mpmath.log(k) for k in range(1, d + 1)]
        m = mpmath.fsum(a) / d
        c2 = mpmath.fsum((x - m) ** 2 for x in a)
        c3 = mpmath.fsum((x - m) ** 3 for x in a)
        return float(c2 / (d * (d + 1))), float(2 * c3 / (d * (d + 1) * (d + 2)))


def dirichlet_cumulants(eigs):
    """k_2, k_3 for sum_i w_i a_i with w ~ Dirichlet(1,...,1)."""
    a = [Fraction(v) for v in eigs]
    d = len(a)
    m = sum(a) / d
    c2 = sum((x - m) ** 2 for x in a)
    c3 = sum((x - m) ** 3 for x in a)
    return c2 / (d * (d + 1)), 2 * c3 / (d * (d + 1) * (d + 2))
