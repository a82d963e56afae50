"""Precision policy and summation kernels.

The residue sums behind the exact law alternate in sign and their terms can
exceed the result by many orders of magnitude, so every evaluation carries a
running error bound.  Float results whose bound is too large are either
rejected (``fast_float``/``compensated``) or recomputed with MPFR at increasing
precision (``high_precision``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import gmpy2
import numpy as np

from .errors import InvalidArgument, PrecisionExceeded

EPS = float(np.finfo(float).eps)
MODES = ("fast_float", "compensated", "high_precision")


@dataclass(frozen=True)
class PrecisionPolicy:
    """How sums are evaluated.

    ``bits`` is the starting MPFR precision for ``high_precision``; it grows
    automatically (up to ``max_bits``) until the error bound meets ``rtol``
    or ``atol`` (absolute, in units of the quantity's natural scale: 1/width
    for densities, 1 for probabilities and the characteristic function).
    ``fast_tol`` is the largest error bound, in units of the quantity's natural
    scale, that the float modes accept before raising PrecisionExceeded.
    """

    mode: str = "high_precision"
    bits: int = 256
    taylor_switch_radius: float = 1.0
    rtol: float = 1e-14
    atol: float = 0.0
    fast_tol: float = 1e-9
    max_bits: int = 1 << 15

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgument(f"unknown precision mode {self.mode!r}")
        if self.mode == "high_precision" and self.bits < 64:
            raise InvalidArgument("high_precision needs at least 64 bits")
        if not self.taylor_switch_radius > 0:
            raise InvalidArgument("taylor_switch_radius must be positive")
        if self.max_bits < self.bits:
            raise InvalidArgument("max_bits below starting bits")

    @classmethod
    def fast(cls, **kw):
        return cls(mode="fast_float", **kw)

    @classmethod
    def compensated(cls, **kw):
        return cls(mode="compensated", **kw)

    @classmethod
    def high(cls, bits: int = 256, **kw):
        return cls(mode="high_precision", bits=bits, **kw)

    @classmethod
    def parse(cls, text: str) -> PrecisionPolicy:
        """Parse ``fast``, ``compensated``, ``high`` or ``high:<bits>``."""
        text = text.strip().lower()
        if text in ("fast", "fast_float"):
            return cls.fast()
        if text == "compensated":
            return cls.compensated()
        if text in ("high", "high_precision"):
            return cls.high()
        if text.startswith("high:"):
            try:
                bits = int(text[5:])
            except ValueError:
                raise InvalidArgument(f"bad precision spec {text!r}") from None
            return cls.high(bits)
        raise InvalidArgument(f"bad precision spec {text!r}")

    @property
    def is_float(self) -> bool:
        return self.mode != "high_precision"


def mp_context(prec: int):
    return gmpy2.context(gmpy2.get_context(), precision=int(prec))


def neumaier_sum(terms: np.ndarray) -> np.ndarray:
    """Compensated sum along axis 0, vectorised over the remaining axes."""
    total = np.zeros(terms.shape[1:])
    comp = np.zeros(terms.shape[1:])
    with np.errstate(invalid="ignore", over="ignore"):
        for t in terms:
            s = total + t
            big = np.abs(total) >= np.abs(t)
            comp += np.where(big, (total - s) + t, (t - s) + total)
            total = s
    return total + comp


def float_sum(terms: np.ndarray, relerr: np.ndarray, compensated: bool = False):
    """Sum ``terms`` (T x N) column-wise and return ``(values, error_bounds)``.

    ``relerr`` holds each term's relative error in units of machine epsilon.
    Non-finite terms give a non-finite bound.
    """
    if terms.shape[0] == 0:
        zeros = np.zeros(terms.shape[1:])
        return zeros, zeros.copy()
    if compensated:
        values = np.array([math.fsum(col) if np.all(np.isfinite(col)) else np.nan
                           for col in terms.T])
    else:
        values = neumaier_sum(terms)
    with np.errstate(invalid="ignore", over="ignore"):
        bound = EPS * (np.sum(np.abs(terms) * (relerr + 2.0), axis=0) + 2.0 * np.abs(values))
    bad = ~np.isfinite(values)
    bound[bad] = np.inf
    return values, bound


def adaptive(evaluate: Callable[[int], tuple], policy: PrecisionPolicy, rtol: float, atol: float):
    """Run ``evaluate(prec) -> (value, bound)`` at growing precision.

    Stops when ``bound <= max(rtol*|value|, atol)`` or at ``policy.max_bits``.
    Values and bounds are MPFR numbers; the last pair is returned.
    """
    prec = max(64, int(policy.bits))
    while True:
        value, bound = evaluate(prec)
        target = max(rtol * abs(value), atol)
        if bound <= target or prec >= policy.max_bits:
            return value, bound
        if target > 0 and bound > 0:
            grow = math.log2(float(bound / target)) if gmpy2.is_finite(bound / target) else prec
            step = int(grow) + 48
        else:
            step = prec
        prec = min(policy.max_bits, _round_bits(prec + max(step, 64)))


def _round_bits(prec: int) -> int:
    return (prec + 63) // 64 * 64


def check_fast(bounds: np.ndarray, scale: np.ndarray | float, policy: PrecisionPolicy, what: str):
    """Raise PrecisionExceeded if any float bound exceeds fast_tol * scale."""
    with np.errstate(invalid="ignore"):
        ok = bounds <= policy.fast_tol * np.asarray(scale)
    if not np.all(ok):
        worst = np.nanmax(np.where(np.isfinite(bounds), bounds, np.inf))
        raise PrecisionExceeded(
            f"{what}: float error bound {worst:.3g} exceeds tolerance in {policy.mode} mode")
