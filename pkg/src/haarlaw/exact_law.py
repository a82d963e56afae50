"""Exact law of A(psi) = <psi|A|psi> for Haar-random pure states.

The density, CDF, characteristic function and moment generating function are
all finite sums over distinct eigenvalues a_k of terms

    c_{k,M} (a_k - x)^p sign(a_k - x),    p = d + M - n_k - 1,

(or their Fourier partners e^{i lam a_k} / (i lam)^{p+1}), one term for each
derivative order M = 0..n_k-1 of the residue at a_k.  ``compile_law``
computes the coefficients once; the evaluators sum them under a
``PrecisionPolicy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import InvalidArgument, NoDensity, PrecisionExceeded, RequiresNonDegenerate
from .precision import EPS, PrecisionPolicy, adaptive, check_fast, float_sum, mp_context
from .spectrum import Spectrum

# Smallest positive value we try to resolve in relative terms.
_TINY = 1e-300
_SERIES_TOL = 1e-18


@dataclass(frozen=True)
class PointMassLaw:
    """Law of A(psi) for a multiple of the identity: a point mass."""

    location: float
    spectrum: Spectrum | None = field(default=None, compare=False)
    policy: PrecisionPolicy = field(default_factory=PrecisionPolicy, compare=False)


class LawCoefficients:
    """Residue coefficient table of a spectrum with at least two distinct values.

    Treat instances as immutable.  ``index[i]``, ``order[i]`` and ``power[i]``
    give the eigenvalue index k, derivative order M and power p of term i;
    ``sign`` and ``log_abs`` hold the coefficient as sign and log-magnitude.
    Higher-precision copies of the coefficients are computed on demand and
    cached per precision.
    """

    def __init__(self, spectrum: Spectrum, policy: PrecisionPolicy):
        if spectrum.is_constant:
            raise InvalidArgument("constant spectra compile to PointMassLaw")
        self.spectrum = spectrum
        self.policy = policy
        self.values = np.array(spectrum.values)
        self.d = spectrum.d
        idx, order, power = [], [], []
        for k, nk in enumerate(spectrum.multiplicities):
            for m in range(nk):
                idx.append(k)
                order.append(m)
                power.append(self.d + m - nk - 1)
        self.index = np.array(idx)
        self.order = np.array(order)
        self.power = np.array(power)
        # Terms are grouped by eigenvalue: group k covers slice(starts[k], starts[k+1]).
        self._starts = np.concatenate([[0], np.cumsum(spectrum.multiplicities)])
        self._depth = 2 * self.d + spectrum.n_distinct + 8
        self._mp_cache: dict[int, tuple[list, list]] = {}
        self._aux_cache: dict = {}

        coef, major, prec = self._table_coefficients()
        with mp_context(prec):
            self.sign = np.array([int(gmpy2.sign(c)) for c in coef], dtype=np.int8)
            self.log_abs = np.array([float(gmpy2.log(abs(c))) if c != 0 else -np.inf
                                     for c in coef])
        if policy.is_float and np.any(self.log_abs > 709.0):
            raise PrecisionExceeded("residue coefficients overflow double precision")

    def __repr__(self):
        return f"LawCoefficients({self.spectrum!r}, terms={len(self.index)})"

    @property
    def n_terms(self) -> int:
        return len(self.index)

    @property
    def coefficients(self) -> np.ndarray:
        """Coefficients as floats (may overflow to inf for very large d)."""
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_abs)

    def _table_coefficients(self):
        prec = max(128, self.policy.bits)
        while True:
            coef, major = self.mp_coefficients(prec)
            with mp_context(prec):
                slack = mpfr(2) ** (-prec) * self._depth
                ok = all(m * slack <= abs(c) * 2.0 ** -60 for c, m in zip(coef, major))
            if ok or prec >= 4096:
                return coef, major, prec
            prec *= 2

    def mp_coefficients(self, prec: int):
        """(coefficients, majorants) as MPFR numbers at working precision ``prec``.

        The majorant of a coefficient is the same sum with every term replaced
        by its absolute value; the coefficient's rounding error is below
        ``majorant * depth * 2**-prec``.
        """
        if prec not in self._mp_cache:
            self._mp_cache[prec] = residue_coefficients(
                self.spectrum.values, self.spectrum.multiplicities, prec)
        return self._mp_cache[prec]

    def groups(self):
        for k in range(self.spectrum.n_distinct):
            yield k, range(self._starts[k], self._starts[k + 1])


def residue_coefficients(values, multiplicities, prec: int):
    """Coefficients c_{k,M} of the general density formula at precision ``prec``.

    For each k the inner sum over compositions {m_j} of M is the degree-M
    coefficient of prod_{j != k} sum_m C(n_j+m-1, m) t^m / (a_k-a_j)^{n_j+m},
    which we build by truncated series multiplication.
    """
    d = sum(multiplicities)
    coef, major = [], []
    with mp_context(prec):
        A = [mpfr(v) for v in values]
        for k, nk in enumerate(multiplicities):
            beta = beta_abs = None
            for j, nj in enumerate(multiplicities):
                if j == k:
                    continue
                inv = 1 / (A[k] - A[j])
                g = inv ** nj
                f = []
                for m in range(nk):
                    f.append(gmpy2.comb(nj + m - 1, m) * g)
                    g *= inv
                f_abs = [abs(v) for v in f]
                if beta is None:
                    beta, beta_abs = f, f_abs
                else:
                    beta = _truncated_product(beta, f)
                    beta_abs = _truncated_product(beta_abs, f_abs)
            for m in range(nk):
                scale = mpfr(gmpy2.fac(d - 1)) / (2 * gmpy2.fac(d + m - nk - 1) * gmpy2.fac(nk - 1 - m))
                sign = -1 if m % 2 else 1
                coef.append(sign * scale * beta[m])
                major.append(scale * beta_abs[m])
    return coef, major


def _truncated_product(u, v):
    n = len(u)
    return [gmpy2.fsum([u[i] * v[m - i] for i in range(m + 1)]) for m in range(n)]


def compile_law(s: Spectrum, policy: PrecisionPolicy | None = None):
    """Compile a spectrum into ``LawCoefficients`` (or ``PointMassLaw`` if l=1)."""
    policy = policy or PrecisionPolicy()
    if s.is_constant:
        return PointMassLaw(s.values[0], s, policy)
    return LawCoefficients(s, policy)


# --------------------------------------------------------------------------
# piecewise polynomial sums: density, cdf, survival function

def _as_points(x):
    arr = np.asarray(x, dtype=float)
    return arr.reshape(-1), arr.ndim == 0, arr.shape


def _restore(values, scalar, shape):
    if scalar:
        return values[0].item()
    return values.reshape(shape)


def _poly_weights(law: LawCoefficients, kind: str):
    """Float weight table (sign, log|w|, power q, constant) for ``kind``."""
    p = law.power
    if kind == "density":
        return law.sign.astype(float), law.log_abs, p, 0.0
    shift = np.log(p + 1.0)
    sign = -law.sign if kind == "cdf" else law.sign
    return sign.astype(float), law.log_abs - shift, p + 1, 0.5


def _mp_poly_weights(law: LawCoefficients, kind: str, prec: int):
    key = (kind, prec)
    if key not in law._aux_cache:
        coef, major = law.mp_coefficients(prec)
        with mp_context(prec):
            if kind == "density":
                w, wa = list(coef), list(major)
            else:
                sgn = -1 if kind == "cdf" else 1
                w = [sgn * c / (int(p) + 1) for c, p in zip(coef, law.power)]
                wa = [m / (int(p) + 1) for m, p in zip(major, law.power)]
        law._aux_cache[key] = (w, wa)
    return law._aux_cache[key]


def _float_poly(law: LawCoefficients, kind: str, x: np.ndarray, compensated: bool):
    sign, logw, q, const = _poly_weights(law, kind)
    a = law.values[law.index]
    t = a[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lt = np.log(np.abs(t))
        qq = q[:, None]
        L = logw[:, None] + np.where(qq > 0, qq * lt, 0.0)
        # t^q sign(t) = |t|^q sign(t)^(q+1)
        tsign = np.where(qq % 2 == 0, np.sign(t), 1.0)
        terms = sign[:, None] * tsign * np.exp(L)
        lt = np.where(t == 0, 0.0, lt)
        relerr = 3.0 + qq + np.abs(logw)[:, None] + qq * np.abs(lt)
    terms = np.where(t == 0, 0.0, terms)
    if const:
        terms = np.vstack([terms, np.full((1, x.size), const)])
        relerr = np.vstack([relerr, np.zeros((1, x.size))])
    return float_sum(terms, relerr, compensated)


def _mp_poly(law: LawCoefficients, kind: str, x: float, prec: int):
    w, wa = _mp_poly_weights(law, kind, prec)
    q = law.power if kind == "density" else law.power + 1
    const = 0 if kind == "density" else mpfr("0.5")
    terms, errs = [], []
    with mp_context(prec):
        X = mpfr(x)
        for k, rng in law.groups():
            t = mpfr(law.values[k]) - X
            s = gmpy2.sign(t)
            if s == 0:
                continue
            at = abs(t)
            qmax = int(q[rng.stop - 1])
            pw = [mpfr(1)]
            for _ in range(qmax):
                pw.append(pw[-1] * at)
            for i in rng:
                qi = int(q[i])
                term = w[i] * pw[qi]
                terms.append(-term if (s < 0 and qi % 2 == 0) else term)
                errs.append(wa[i] * pw[qi] * (qi + law._depth))
        value = gmpy2.fsum(terms) + const
        bound = (gmpy2.fsum(errs) + 4 * abs(value)) * mpfr(2) ** (-prec)
    return value, bound


def _evaluate(law, kind, pts, policy, atol, fast_scale):
    """Float pass, then MPFR refinement of points whose bound is too loose."""
    compensated = policy.mode == "compensated"
    values, bounds = _float_poly(law, kind, pts, compensated)
    if policy.is_float:
        check_fast(bounds, fast_scale, policy, kind)
        return values
    atol = max(atol, policy.atol * fast_scale) if np.isfinite(fast_scale) else atol
    target = np.maximum(policy.rtol * np.abs(values), atol)
    redo = ~(bounds <= target)
    for i in np.flatnonzero(redo):
        xi = float(pts[i])
        value, _ = adaptive(lambda prec: _mp_poly(law, kind, xi, prec), policy, policy.rtol, atol)
        values[i] = float(value)
    return values


def _endpoint_density(law: LawCoefficients, k: int) -> float:
    """One-sided limit of the density at the support endpoint a_k (k = 0 or l-1).

    Only the power-0 term of the endpoint eigenvalue survives the limit; it
    exists iff the remaining eigenvalues form a single simple one.
    """
    for i in range(law._starts[k], law._starts[k + 1]):
        if law.power[i] == 0:
            c = float(law.sign[i] * math.exp(law.log_abs[i]))
            return -2.0 * c if k == 0 else 2.0 * c
    return 0.0


def density(law, x, policy: PrecisionPolicy | None = None):
    """Probability density P(x).

    Exactly 0 outside [a_1, a_l].  At the endpoints the one-sided limit from
    inside the support is returned; at interior eigenvalues sign(0) := 0.
    """
    if isinstance(law, PointMassLaw):
        raise NoDensity(f"point mass at {law.location!r} has no density")
    policy = policy or law.policy
    pts, scalar, shape = _as_points(x)
    out = np.zeros(pts.size)
    lo, hi = law.spectrum.lower, law.spectrum.upper
    inside = (pts > lo) & (pts < hi)
    if np.any(inside):
        scale = 1.0 / law.spectrum.width
        out[inside] = _evaluate(law, "density", pts[inside], policy, _TINY * scale, scale)
    out[pts == lo] = _endpoint_density(law, 0)
    out[pts == hi] = _endpoint_density(law, law.spectrum.n_distinct - 1)
    nonfinite = ~np.isfinite(pts)
    if np.any(nonfinite & ~np.isinf(pts)):
        raise InvalidArgument("density evaluated at NaN")
    return _restore(np.maximum(out, 0.0), scalar, shape)


def unclamped_density(law: LawCoefficients, x, policy: PrecisionPolicy | None = None):
    """The raw residue sum without the support clamp (diagnostics only)."""
    policy = policy or law.policy
    pts, scalar, shape = _as_points(x)
    scale = 1.0 / law.spectrum.width
    return _restore(_evaluate(law, "density", pts, policy, _TINY * scale, np.inf), scalar, shape)


def cdf(law, x, policy: PrecisionPolicy | None = None):
    """Prob(A <= x), clamped to [0, 1]."""
    pts, scalar, shape = _as_points(x)
    if isinstance(law, PointMassLaw):
        return _restore((pts >= law.location).astype(float), scalar, shape)
    return _restore(_cdf_like(law, "cdf", pts, policy or law.policy), scalar, shape)


def sf(law, x, policy: PrecisionPolicy | None = None):
    """Survival function Prob(A > x), accurate in relative terms for small tails."""
    pts, scalar, shape = _as_points(x)
    if isinstance(law, PointMassLaw):
        return _restore((pts < law.location).astype(float), scalar, shape)
    return _restore(_cdf_like(law, "sf", pts, policy or law.policy), scalar, shape)


def _cdf_like(law, kind, pts, policy):
    lo, hi = law.spectrum.lower, law.spectrum.upper
    below, above = (0.0, 1.0) if kind == "cdf" else (1.0, 0.0)
    out = np.where(pts <= lo, below, above)
    inside = (pts > lo) & (pts < hi)
    if np.any(inside):
        out[inside] = _evaluate(law, kind, pts[inside], policy, _TINY, 1.0)
    if np.any(np.isnan(pts)):
        raise InvalidArgument("cdf evaluated at NaN")
    return np.clip(out, 0.0, 1.0)


# --------------------------------------------------------------------------
# characteristic and moment generating functions

def _exp_weights(law: LawCoefficients):
    """Float (sign, log|W|, q) for the terms W e^{z a_k} / z^q, W = 2 c p!."""
    p = law.power
    logw = law.log_abs + math.log(2.0) + np.array([math.lgamma(int(v) + 1) for v in p])
    return law.sign.astype(float), logw, p + 1


def _mp_exp_weights(law: LawCoefficients, prec: int):
    key = ("exp", prec)
    if key not in law._aux_cache:
        coef, major = law.mp_coefficients(prec)
        with mp_context(prec):
            f = [2 * gmpy2.fac(int(p)) for p in law.power]
            law._aux_cache[key] = ([c * g for c, g in zip(coef, f)],
                                   [m * g for m, g in zip(major, f)])
    return law._aux_cache[key]


_ROTATE = {0: (1, 0, 0, 1), 1: (0, 1, -1, 0), 2: (-1, 0, 0, -1), 3: (0, -1, 1, 0)}
# (-i)^q (c + i s) = (r0 c + r1 s) + i (r2 c + r3 s)


def _float_chi(law, lam, compensated):
    sign, logw, q = _exp_weights(law)
    a = law.values[law.index]
    phase = a[:, None] * lam[None, :]
    cos, sin = np.cos(phase), np.sin(phase)
    qm = (q % 4)[:, None]
    r = np.array([_ROTATE[i] for i in range(4)])[qm[:, 0]]
    re_unit = r[:, 0:1] * cos + r[:, 1:2] * sin
    im_unit = r[:, 2:3] * cos + r[:, 3:4] * sin
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ll = np.log(np.abs(lam))[None, :]
        lsign = np.where((q[:, None] % 2 == 1) & (lam[None, :] < 0), -1.0, 1.0)
        mag = sign[:, None] * lsign * np.exp(logw[:, None] - q[:, None] * ll)
        relerr = 4.0 + q[:, None] + np.abs(logw)[:, None] + q[:, None] * np.abs(ll) + np.abs(phase)
    re, bre = float_sum(mag * re_unit, relerr, compensated)
    im, bim = float_sum(mag * im_unit, relerr, compensated)
    return re + 1j * im, bre + bim


def _mp_chi(law, lam: float, prec: int):
    w, wa = _mp_exp_weights(law, prec)
    q = law.power + 1
    re_t, im_t, errs = [], [], []
    with mp_context(prec):
        L = mpfr(lam)
        inv = 1 / L
        ainv = abs(inv)
        for k, rng in law.groups():
            ph = mpfr(law.values[k]) * L
            c, s = gmpy2.cos(ph), gmpy2.sin(ph)
            qmax = int(q[rng.stop - 1])
            pw = [mpfr(1)]
            for _ in range(qmax):
                pw.append(pw[-1] * inv)
            for i in rng:
                qi = int(q[i])
                r0, r1, r2, r3 = _ROTATE[qi % 4]
                m = w[i] * pw[qi]
                re_t.append(m * (r0 * c + r1 * s))
                im_t.append(m * (r2 * c + r3 * s))
                errs.append(wa[i] * ainv ** qi * (qi + law._depth + abs(ph)))
        value = mpc(gmpy2.fsum(re_t), gmpy2.fsum(im_t))
        bound = (2 * gmpy2.fsum(errs) + 4 * abs(value)) * mpfr(2) ** (-prec)
    return value, bound


def _float_mgf0(law, y, compensated):
    sign, logw, q = _exp_weights(law)
    a = law.values[law.index]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ly = np.log(np.abs(y))[None, :]
        ya = a[:, None] * y[None, :]
        ysign = np.where((q[:, None] % 2 == 1) & (y[None, :] < 0), -1.0, 1.0)
        L = logw[:, None] + ya - q[:, None] * ly
        terms = sign[:, None] * ysign * np.exp(L)
        relerr = 4.0 + q[:, None] + np.abs(L) + np.abs(ya) + q[:, None] * np.abs(ly)
    return float_sum(terms, relerr, compensated)


def _mp_mgf0(law, y: float, prec: int):
    w, wa = _mp_exp_weights(law, prec)
    q = law.power + 1
    terms, errs = [], []
    with mp_context(prec):
        Y = mpfr(y)
        inv = 1 / Y
        for k, rng in law.groups():
            ya = mpfr(law.values[k]) * Y
            e = gmpy2.exp(ya)
            qmax = int(q[rng.stop - 1])
            pw = [mpfr(1)]
            for _ in range(qmax):
                pw.append(pw[-1] * inv)
            for i in rng:
                qi = int(q[i])
                terms.append(w[i] * e * pw[qi])
                errs.append(wa[i] * e * abs(pw[qi]) * (qi + law._depth + abs(ya)))
        value = gmpy2.fsum(terms)
        bound = (gmpy2.fsum(errs) + 4 * abs(value)) * mpfr(2) ** (-prec)
    return value, bound


def _series_order(radius: float) -> int:
    """Number of Taylor terms so that (radius/2)^n / n! < _SERIES_TOL."""
    half = radius / 2.0
    n, term = 0, 1.0
    while term >= _SERIES_TOL or n < 2:
        n += 1
        term *= half / n
    return n + 1


def central_moments(law: LawCoefficients, n_max: int) -> np.ndarray:
    """Moments of A - mid about the midpoint of the support, index 0..n_max.

    Cached on the law.  Non-degenerate spectra use the compact spectral
    formula, degenerate ones the Taylor expansion of the residue MGF.
    """
    key = ("central", n_max)
    if key not in law._aux_cache:
        from . import moments
        s = law.spectrum
        shifted = s.shifted(-0.5 * (s.lower + s.upper))
        if not s.is_degenerate:
            m = moments.moments_compact(shifted, n_max, PrecisionPolicy.high(law.policy.bits)).m
        else:
            m = taylor_moments(compile_law(shifted, PrecisionPolicy.high(law.policy.bits)), n_max)
        law._aux_cache[key] = np.concatenate([[1.0], m])
    return law._aux_cache[key]


def taylor_moments(law: LawCoefficients, n_max: int) -> np.ndarray:
    """m_1..m_{n_max} from the Taylor coefficients of the residue MGF.

    m_n = n! sum_i W_i a_{k_i}^{n+q_i} / (n+q_i)! with W = 2 c p!, q = p+1.
    """
    policy = law.policy if not law.policy.is_float else PrecisionPolicy.high()
    scale = max(abs(law.spectrum.lower), abs(law.spectrum.upper))
    q = law.power + 1
    out = []
    for n in range(1, n_max + 1):
        def evaluate(prec, n=n):
            w, wa = _mp_exp_weights(law, prec)
            with mp_context(prec):
                terms, errs = [], []
                for i in range(law.n_terms):
                    qi = int(q[i])
                    f = mpfr(gmpy2.fac(n)) / gmpy2.fac(n + qi)
                    ap = mpfr(law.values[law.index[i]]) ** (n + qi)
                    terms.append(w[i] * f * ap)
                    errs.append(wa[i] * f * abs(ap) * (n + qi + law._depth))
                value = gmpy2.fsum(terms)
                return value, (gmpy2.fsum(errs) + 4 * abs(value)) * mpfr(2) ** (-prec)
        value, _ = adaptive(evaluate, policy, 1e-15, 1e-30 * scale ** n)
        out.append(float(value))
    return np.array(out)


def _series(law, z: np.ndarray, imaginary: bool, radius: float) -> np.ndarray:
    """sum_n m~_n z^n / n! (times e^{z mid}); z = i*lam when ``imaginary``."""
    s = law.spectrum
    mid = 0.5 * (s.lower + s.upper)
    half = 0.5 * s.width
    nmax = _series_order(radius)
    mom = central_moments(law, nmax)
    zz = 1j * z if imaginary else z.astype(float)
    total = np.zeros(z.shape, dtype=complex if imaginary else float)
    term = np.ones_like(total)
    for n in range(nmax + 1):
        if n:
            term = term * zz / n
        total = total + mom[n] * term
        # |m~_n| <= (width/2)^n bounds every later term
        if np.all(np.abs(term) * half ** n < 1e-16 * np.abs(total)):
            break
    return total * np.exp(zz * mid)


def char_fn(law, lam, policy: PrecisionPolicy | None = None):
    """Characteristic function E[exp(i lam A)]."""
    pts, scalar, shape = _as_points(lam)
    if isinstance(law, PointMassLaw):
        return _restore(np.exp(1j * pts * law.location), scalar, shape)
    policy = policy or law.policy
    out = np.ones(pts.size, dtype=complex)
    width = law.spectrum.width
    near = np.abs(pts) * width < policy.taylor_switch_radius
    near_nz = near & (pts != 0)
    if np.any(near_nz):
        out[near_nz] = _series(law, pts[near_nz], True, policy.taylor_switch_radius)
    far = ~near
    if np.any(far):
        lam_far = pts[far]
        values, bounds = _float_chi(law, lam_far, policy.mode == "compensated")
        if policy.is_float:
            check_fast(bounds, 1.0, policy, "char_fn")
        else:
            atol = max(policy.atol, 1e-17)
            target = np.maximum(policy.rtol * np.abs(values), atol)
            for i in np.flatnonzero(~(bounds <= target)):
                li = float(lam_far[i])
                v, _ = adaptive(lambda prec: _mp_chi(law, li, prec), policy, policy.rtol, atol)
                values[i] = complex(v)
        out[far] = values
    return _restore(out, scalar, shape)


def mgf(law, y, omega: float = 0.0, policy: PrecisionPolicy | None = None):
    """Shifted moment generating function M(y, omega) = E[exp(y (A - omega))]."""
    pts, scalar, shape = _as_points(y)
    if isinstance(law, PointMassLaw):
        with np.errstate(over="ignore"):
            out = np.exp(pts * (law.location - omega))
        if not np.all(np.isfinite(out)):
            raise PrecisionExceeded("moment generating function overflows double")
        return _restore(out, scalar, shape)
    policy = policy or law.policy
    out = np.ones(pts.size)
    width = law.spectrum.width
    near = np.abs(pts) * width < policy.taylor_switch_radius
    near_nz = near & (pts != 0)
    if np.any(near_nz):
        yy = pts[near_nz]
        out[near_nz] = _series(law, yy, False, policy.taylor_switch_radius) * np.exp(-omega * yy)
    far = ~near
    if np.any(far):
        y_far = pts[far]
        values, bounds = _float_mgf0(law, y_far, policy.mode == "compensated")
        with np.errstate(over="ignore", invalid="ignore"):
            shifted = values * np.exp(-omega * y_far)
        if policy.is_float:
            check_fast(bounds, np.abs(values), policy, "mgf")
            if not np.all(np.isfinite(shifted)):
                raise PrecisionExceeded("moment generating function overflows double")
            values = shifted
        else:
            redo = ~(bounds <= policy.rtol * np.abs(values)) | ~np.isfinite(shifted)
            values = shifted
            for i in np.flatnonzero(redo):
                yi = float(y_far[i])
                v, _ = adaptive(lambda prec: _mp_mgf0(law, yi, prec), policy, policy.rtol, 0.0)
                with mp_context(max(v.precision, 64)):
                    values[i] = float(v * gmpy2.exp(-mpfr(omega) * mpfr(yi)))
            if not np.all(np.isfinite(values)):
                raise PrecisionExceeded("moment generating function overflows double")
        out[far] = values
    return _restore(out, scalar, shape)


# --------------------------------------------------------------------------
# identities

def identity_check(s: Spectrum, omega: float, n: int, policy: PrecisionPolicy | None = None) -> float:
    """sum_k (a_k - omega)^n / prod_{j != k} (a_k - a_j) for a non-degenerate spectrum.

    Equals 0 for 0 <= n <= d-2 and 1 for n = d-1, for every omega.
    """
    if s.is_degenerate:
        raise RequiresNonDegenerate("identity_check needs a non-degenerate spectrum")
    if int(n) != n or not 0 <= n <= s.d - 1:
        raise InvalidArgument(f"n must be an integer in [0, {s.d - 1}]")
    n = int(n)
    policy = policy or PrecisionPolicy()
    if policy.is_float:
        terms = []
        for k, ak in enumerate(s.values):
            prod = math.prod(ak - aj for j, aj in enumerate(s.values) if j != k)
            terms.append((ak - omega) ** n / prod)
        bound = EPS * (2 * s.d + n + 4) * math.fsum(abs(t) for t in terms)
        check_fast(np.array([bound]), 1.0, policy, "identity_check")
        return math.fsum(terms)
    with mp_context(policy.bits):
        A = [mpfr(v) for v in s.values]
        W = mpfr(omega)
        terms = []
        for k, ak in enumerate(A):
            prod = mpfr(1)
            for j, aj in enumerate(A):
                if j != k:
                    prod *= ak - aj
            terms.append((ak - W) ** n / prod)
        return float(gmpy2.fsum(terms))


def support_pieces(law: LawCoefficients):
    """Consecutive eigenvalue intervals on which the density is a polynomial."""
    v = law.spectrum.values
    return list(zip(v[:-1], v[1:]))


def integrate(law: LawCoefficients, f=None, extra_degree: int = 0, policy=None) -> float:
    """Integral of f(x) P(x) over the support by per-piece Gauss-Legendre.

    Exact (up to rounding) when f is a polynomial of degree <= extra_degree.
    """
    nodes = max(1, math.ceil((law.d - 1 + extra_degree) / 2) + 1)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for lo, hi in support_pieces(law):
        half = 0.5 * (hi - lo)
        xs.append(lo + half * (xg + 1.0))
        ws.append(half * wg)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    p = density(law, x, policy)
    fx = np.ones_like(x) if f is None else f(x)
    return math.fsum(w * p * fx)
