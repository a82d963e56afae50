"""Exact tails against Levy's concentration bound, and CLT diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLaw, InvalidArgument
from .exact_law import compile_law, density, sf
from .moments import central_cumulants
from .precision import PrecisionPolicy
from .spectrum import Spectrum, SpectrumKind, generate

# Levy's lemma on the unit sphere S^k in R^{k+1}, for an eta-Lipschitz f:
#   Prob(f - <f> >= eps) <= 2 exp(-C1 (k+1) eps^2 / eta^2)
LEVY_C1 = 1.0 / (9.0 * math.pi ** 3 * math.log(2.0))
# Exponent constants of the bound written as exp(-C eps^2 d) for a rank-one
# projector (eta = 2) and as 2 exp(-C' eps^2) for the number operator.
RANDOM_GUESS_LEVY_C = LEVY_C1 / 2.0
NUMBER_OPERATOR_LEVY_C = 2.0 * LEVY_C1
NUMBER_OPERATOR_REPORTED_RATE = 0.25

FIT_TAIL_RANGE = (1e-12, 0.5)
NUMBER_OPERATOR_FIT_WINDOW = (1.0, 10.0)
DOMINANCE_TOL = 1e-9


@dataclass
class ConcentrationReport:
    d: int
    mean: float
    eps: np.ndarray
    exact_tail: np.ndarray
    levy_bound: np.ndarray
    eta: float
    c1: float = LEVY_C1
    levy_exponent: float = 0.0
    exact_rate: float = math.nan
    exact_prefactor: float = math.nan
    levy_rate: float = math.nan
    fit_points: int = 0
    violations: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)

    @property
    def dominated(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "mean": self.mean,
            "eta": self.eta,
            "c1": self.c1,
            "levy_exponent": self.levy_exponent,
            "exact_rate": self.exact_rate,
            "exact_prefactor": self.exact_prefactor,
            "levy_rate": self.levy_rate,
            "fit_points": self.fit_points,
            "violations": list(self.violations),
            "reference": dict(self.reference),
            "eps": self.eps.tolist(),
            "exact_tail": self.exact_tail.tolist(),
            "levy_bound": self.levy_bound.tolist(),
        }


def _log_linear_fit(x, y):
    """Least squares log(y) = log(A) - r x; returns (r, A)."""
    slope, intercept = np.polyfit(x, np.log(y), 1)
    return -float(slope), float(math.exp(intercept))


def _tail_report(s: Spectrum, eps, fit_mask_fn, policy) -> ConcentrationReport:
    if s.is_constant:
        raise DegenerateLaw("a constant observable has no tail")
    eps = np.asarray(eps, dtype=float).reshape(-1)
    law = compile_law(s, policy)
    mean = s.mean
    tail = np.asarray(sf(law, mean + eps), dtype=float)
    eta = 2.0 * s.operator_norm
    exponent = LEVY_C1 * 2 * s.d / eta ** 2
    bound = 2.0 * np.exp(-exponent * eps ** 2)

    report = ConcentrationReport(s.d, mean, eps, tail, bound, eta, levy_exponent=exponent)
    mask = fit_mask_fn(eps, tail) & (tail > 0)
    report.fit_points = int(np.count_nonzero(mask))
    if report.fit_points >= 2:
        report.exact_rate, report.exact_prefactor = _log_linear_fit(eps[mask], tail[mask])
        q, _ = np.polyfit(eps[mask] ** 2, np.log(bound[mask] / 2.0), 1)
        report.levy_rate = -float(q)
    informative = bound <= 1.0
    bad = informative & (tail > bound + DOMINANCE_TOL)
    report.violations = eps[bad].tolist()
    return report


def levy_compare(s: Spectrum, eps_grid, policy: PrecisionPolicy | None = None) -> ConcentrationReport:
    """Exact Prob(A - mean >= eps) next to Levy's bound with eta = 2 ||A||_op.

    The exact decay rate is fitted where the tail lies in FIT_TAIL_RANGE.
    """
    eps = np.asarray(eps_grid, dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise InvalidArgument("eps grid must be nonempty and positive")
    lo, hi = FIT_TAIL_RANGE
    return _tail_report(s, eps, lambda e, t: (t >= lo) & (t <= hi), policy)


def number_operator_tail(d: int, eps_grid=None, fit_window=NUMBER_OPERATOR_FIT_WINDOW,
                         policy: PrecisionPolicy | None = None) -> ConcentrationReport:
    """B(d, eps) = 1 - cdf((d+1)/2 + eps) for a_k = k, with B ~ alpha exp(-C eps)
    fitted on eps in ``fit_window``."""
    if int(d) != d or d < 3:
        raise InvalidArgument("number operator tail needs d >= 3")
    if eps_grid is None:
        eps_grid = np.linspace(0.0, fit_window[1], 41)
    eps = np.asarray(eps_grid, dtype=float)
    if np.any(eps < 0):
        raise InvalidArgument("eps must be nonnegative")
    lo, hi = fit_window
    report = _tail_report(generate(SpectrumKind.number_operator(), int(d)), eps,
                          lambda e, t: (e >= lo) & (e <= hi), policy)
    report.reference = {"reported_rate": NUMBER_OPERATOR_REPORTED_RATE,
                        "levy_constant": NUMBER_OPERATOR_LEVY_C,
                        "fit_window": list(fit_window)}
    return report


@dataclass
class CLTReport:
    kind: SpectrumKind
    d_grid: list
    mean: np.ndarray
    kappa2: np.ndarray
    kappa3: np.ndarray
    z: np.ndarray
    densities: list
    sup_norm: np.ndarray
    slope: float = math.nan

    @property
    def kappa3_z(self) -> np.ndarray:
        """Third cumulant of Z = (A - mean)/sqrt(k_2)."""
        return self.kappa3 / self.kappa2 ** 1.5

    @property
    def normal(self) -> np.ndarray:
        return np.exp(-0.5 * self.z ** 2) / math.sqrt(2 * math.pi)

    def to_dict(self) -> dict:
        return {
            "kind": {"tag": self.kind.tag, "param": self.kind.param},
            "d": list(self.d_grid),
            "mean": self.mean.tolist(),
            "kappa2": self.kappa2.tolist(),
            "kappa3": self.kappa3.tolist(),
            "kappa3_z": self.kappa3_z.tolist(),
            "slope_log_kappa3_z": self.slope,
            "sup_norm": self.sup_norm.tolist(),
            "z": self.z.tolist(),
            "densities": [p.tolist() for p in self.densities],
            "normal": self.normal.tolist(),
        }


def rescaled_density(s: Spectrum, z, policy: PrecisionPolicy | None = None, law=None):
    """Density of Z = (A - mean)/sqrt(k_2) on the grid ``z``."""
    mean, k2, _ = central_cumulants(s, policy)
    law = law or compile_law(s, policy)
    sd = math.sqrt(k2)
    return sd * np.asarray(density(law, mean + sd * np.asarray(z, dtype=float)))


def clt_diagnostics(kind: SpectrumKind, d_grid, z=None, policy: PrecisionPolicy | None = None) -> CLTReport:
    """Cumulants and rescaled densities along ``d_grid``.

    ``z`` defaults to 161 points on [-4, 4]; pass an empty sequence to skip
    the density grids.
    """
    if kind.tag not in ("power", "log"):
        raise InvalidArgument("clt_diagnostics takes power(alpha) or log spectra")
    d_grid = [int(d) for d in d_grid]
    if not d_grid or min(d_grid) < 4 or any(b <= a for a, b in zip(d_grid, d_grid[1:])):
        raise InvalidArgument("d grid must be strictly ascending with d >= 4")
    z = np.linspace(-4.0, 4.0, 161) if z is None else np.asarray(z, dtype=float)
    normal = np.exp(-0.5 * z ** 2) / math.sqrt(2 * math.pi)
    means, k2s, k3s, dens, sups = [], [], [], [], []
    for d in d_grid:
        s = generate(kind, d)
        mean, k2, k3 = central_cumulants(s, policy)
        means.append(mean)
        k2s.append(k2)
        k3s.append(k3)
        if z.size:
            sd = math.sqrt(k2)
            p = sd * np.asarray(density(compile_law(s, policy), mean + sd * z))
            dens.append(p)
            sups.append(float(np.max(np.abs(p - normal))))
        else:
            sups.append(math.nan)
    report = CLTReport(kind, d_grid, np.array(means), np.array(k2s), np.array(k3s), z, dens,
                       np.array(sups))
    # symmetric spectra have k_3 = 0 up to roundoff; no slope then
    k3z = np.abs(report.kappa3_z)
    keep = k3z > 1e-12
    if np.count_nonzero(keep) >= 2:
        report.slope = float(np.polyfit(np.log(np.array(d_grid)[keep]), np.log(k3z[keep]), 1)[0])
    return report
