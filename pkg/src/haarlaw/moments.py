"""Moments and cumulants of A(psi) by independent routes.

* ``moments_compact``: the spectral formula
  m_n = C(n+d-1, n)^-1 sum_k a_k^{n+d-1} / prod_{j != k} (a_k - a_j).
* ``moments_permutation``: the symmetric-group average, reduced to power sums
  over cycle types and evaluated in exact rational arithmetic.
* ``moments_fidelity``: n! (d-1)! / (d+n-1)! for a rank-one projector.
* ``moments_quadrature``: Gauss-Legendre integration of the exact density.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import InvalidArgument, RequiresNonDegenerate, TooLarge
from .precision import PrecisionPolicy, adaptive, mp_context
from .spectrum import Spectrum

METHODS = ("compact", "permutation", "fidelity", "quadrature")
MAX_PERMUTATION_ORDER = 6


@dataclass(frozen=True)
class MomentReport:
    """Raw moments m_1..m_{n_max} and, once filled in, cumulants k_1..k_3."""

    method: str
    m: tuple[float, ...]
    kappa: tuple[float, ...] | None = None

    @property
    def n_max(self) -> int:
        return len(self.m)

    def moment(self, n: int) -> float:
        return 1.0 if n == 0 else self.m[n - 1]

    def to_dict(self) -> dict:
        out = {"method": self.method, "n_max": self.n_max, "m": list(self.m)}
        if self.kappa is not None:
            out["kappa"] = list(self.kappa)
        return out


def _check_order(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise InvalidArgument("n_max must be a positive integer")
    return int(n_max)


def moments_compact(s: Spectrum, n_max: int, policy: PrecisionPolicy | None = None) -> MomentReport:
    n_max = _check_order(n_max)
    if s.is_degenerate:
        raise RequiresNonDegenerate(
            "the compact formula needs distinct eigenvalues; use moments_permutation "
            "or moments_quadrature")
    policy = policy or PrecisionPolicy()
    d = s.d
    scale = s.operator_norm
    if policy.is_float:
        return MomentReport("compact", tuple(_compact_float(s, n) for n in range(1, n_max + 1)))

    weights: dict[int, list] = {}

    def inverse_products(prec):
        if prec not in weights:
            with mp_context(prec):
                A = [mpfr(v) for v in s.values]
                ws = []
                for k, ak in enumerate(A):
                    prod = mpfr(1)
                    for j, aj in enumerate(A):
                        if j != k:
                            prod *= ak - aj
                    ws.append(1 / prod)
                weights[prec] = (A, ws)
        return weights[prec]

    out = []
    for n in range(1, n_max + 1):
        binom = gmpy2.comb(n + d - 1, n)

        def evaluate(prec, n=n):
            A, ws = inverse_products(prec)
            with mp_context(prec):
                terms = [w * a ** (n + d - 1) for a, w in zip(A, ws)]
                value = gmpy2.fsum(terms) / binom
                err = gmpy2.fsum([abs(t) for t in terms]) / binom * (n + 3 * d + 4)
                return value, (err + 4 * abs(value)) * mpfr(2) ** (-prec)

        value, _ = adaptive(evaluate, policy, 1e-15, 1e-30 * scale ** n)
        out.append(float(value))
    return MomentReport("compact", tuple(out))


def _compact_float(s: Spectrum, n: int) -> float:
    d = s.d
    terms = []
    for k, ak in enumerate(s.values):
        if ak == 0:
            continue
        log_mag = (n + d - 1) * math.log(abs(ak))
        sign = -1.0 if ak < 0 and (n + d - 1) % 2 else 1.0
        for j, aj in enumerate(s.values):
            if j != k:
                log_mag -= math.log(abs(ak - aj))
                sign *= math.copysign(1.0, ak - aj)
        terms.append(sign * math.exp(log_mag))
    return math.fsum(terms) / math.comb(n + d - 1, n)


def _cycle_type(perm) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths))


def permutation_trace_sums(s: Spectrum, n_max: int) -> list[Fraction]:
    """sum_{pi in S_n} tr(P_pi A^{(x)n}) for n = 1..n_max, exactly.

    The trace of a permutation operator against A^{(x)n} factorises over the
    cycles of pi into power sums p_r = tr(A^r).
    """
    a = [Fraction(v) for v in s.values]
    power_sums = [None] + [sum(n * v ** r for v, n in zip(a, s.multiplicities))
                           for r in range(1, n_max + 1)]
    out = []
    for n in range(1, n_max + 1):
        counts: dict[tuple[int, ...], int] = {}
        for perm in itertools.permutations(range(n)):
            ct = _cycle_type(perm)
            counts[ct] = counts.get(ct, 0) + 1
        total = Fraction(0)
        for ct, count in counts.items():
            total += count * math.prod((power_sums[r] for r in ct), start=Fraction(1))
        out.append(total)
    return out


def moments_permutation_exact(s: Spectrum, n_max: int) -> list[Fraction]:
    n_max = _check_order(n_max)
    if n_max > MAX_PERMUTATION_ORDER:
        raise TooLarge(f"permutation route enumerates S_n; n_max <= {MAX_PERMUTATION_ORDER}")
    d = s.d
    sums = permutation_trace_sums(s, n_max)
    return [Fraction(math.factorial(d - 1), math.factorial(d + n - 1)) * t
            for n, t in enumerate(sums, start=1)]


def moments_permutation(s: Spectrum, n_max: int) -> MomentReport:
    """Moments from the symmetric-group formula; valid for degenerate spectra."""
    return MomentReport("permutation", tuple(float(v) for v in moments_permutation_exact(s, n_max)))


def fidelity_moment(d: int, n: int) -> float:
    """n! (d-1)! / (d+n-1)! = prod_{j=1..n} j / (d+j-1).

    The product of n ratios in (0, 1] never overflows and is accurate to
    about n ulps (n = 1 gives 1/d correctly rounded); very large n falls back
    to log-gamma.
    """
    if n > 4096:
        return math.exp(math.lgamma(n + 1) + math.lgamma(d) - math.lgamma(d + n))
    out = 1.0
    for j in range(1, n + 1):
        out *= j / (d + j - 1)
    return out


def moments_fidelity(d: int, n_max: int) -> MomentReport:
    """Moments of |<1|psi>|^2, the fidelity of a random guess."""
    if int(d) != d or d < 1:
        raise InvalidArgument("d must be a positive integer")
    n_max = _check_order(n_max)
    return MomentReport("fidelity", tuple(fidelity_moment(int(d), n) for n in range(1, n_max + 1)))


def moments_quadrature(law, n_max: int, policy: PrecisionPolicy | None = None) -> MomentReport:
    """Moments as integrals of x^n against the exact density (or the point mass)."""
    from .exact_law import PointMassLaw, integrate

    n_max = _check_order(n_max)
    if isinstance(law, PointMassLaw):
        return MomentReport("quadrature", tuple(law.location ** n for n in range(1, n_max + 1)))
    out = tuple(integrate(law, lambda x, n=n: x ** n, n, policy) for n in range(1, n_max + 1))
    return MomentReport("quadrature", out)


def cumulants(report: MomentReport) -> MomentReport:
    """Fill in k_1..k_3 from m_1..m_3."""
    if report.n_max < 3:
        raise InvalidArgument("cumulants need m_1, m_2 and m_3")
    m1, m2, m3 = report.m[:3]
    k2 = max(m2 - m1 * m1, 0.0)
    k3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3
    return replace(report, kappa=(m1, k2, k3))


def central_cumulants(s: Spectrum, policy: PrecisionPolicy | None = None) -> tuple[float, float, float]:
    """(mean, k_2, k_3) with the moments taken about tr(A)/d to limit cancellation."""
    mean = s.mean
    shifted = s.shifted(-mean)
    if s.is_constant:
        return mean, 0.0, 0.0
    if s.is_degenerate:
        rep = moments_permutation(shifted, 3)
    else:
        rep = moments_compact(shifted, 3, policy)
    _, k2, k3 = cumulants(rep).kappa
    return mean, k2, k3


def basis_covariance(d: int) -> Fraction:
    """cov(X_h, X_k) for X_k = |<k|psi>|^2, h != k, exactly.

    Uses E[(X_h + X_k)^2] for the rank-2 projector and E[X^2] for rank one.
    """
    from .spectrum import SpectrumKind, generate

    if d < 2:
        raise InvalidArgument("need d >= 2 for two distinct basis states")
    m2_rank2 = moments_permutation_exact(generate(SpectrumKind.projector(2), d), 2)[1]
    m2_rank1 = moments_permutation_exact(generate(SpectrumKind.projector(1), d), 2)[1]
    cross = (m2_rank2 - 2 * m2_rank1) / 2
    return cross - Fraction(1, d * d)


def exact_mean_variance(s: Spectrum) -> tuple[float, float]:
    m1, m2 = moments_permutation_exact(s, 2)
    return float(m1), float(m2 - m1 * m1)
