"""Observables described by their spectra.

The law of <psi|A|psi> under the Haar measure depends on A only through its
distinct eigenvalues and their multiplicities, so that is all we store.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidSpectrum

DEFAULT_CLUSTER_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues ``values`` (strictly increasing) with multiplicities."""

    values: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        mults = tuple(int(n) for n in self.multiplicities)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "multiplicities", mults)
        if not values:
            raise InvalidSpectrum("spectrum must have at least one eigenvalue")
        if len(values) != len(mults):
            raise InvalidSpectrum("values and multiplicities differ in length")
        if not all(math.isfinite(v) for v in values):
            raise InvalidSpectrum("eigenvalues must be finite")
        if any(n < 1 for n in mults):
            raise InvalidSpectrum("multiplicities must be positive integers")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InvalidSpectrum("distinct eigenvalues must be strictly increasing")

    @property
    def d(self) -> int:
        return sum(self.multiplicities)

    @property
    def n_distinct(self) -> int:
        return len(self.values)

    @property
    def is_degenerate(self) -> bool:
        return any(n > 1 for n in self.multiplicities)

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    @property
    def lower(self) -> float:
        return self.values[0]

    @property
    def upper(self) -> float:
        return self.values[-1]

    @property
    def width(self) -> float:
        return self.values[-1] - self.values[0]

    @property
    def trace(self) -> float:
        return math.fsum(n * a for a, n in zip(self.values, self.multiplicities))

    @property
    def mean(self) -> float:
        """First moment tr(A)/d."""
        return self.trace / self.d

    @property
    def operator_norm(self) -> float:
        return max(abs(self.values[0]), abs(self.values[-1]))

    def eigenvalues(self) -> list[float]:
        """All d eigenvalues, repeated according to multiplicity."""
        out = []
        for a, n in zip(self.values, self.multiplicities):
            out.extend([a] * n)
        return out

    def shifted(self, shift: float) -> Spectrum:
        return Spectrum(tuple(a + shift for a in self.values), self.multiplicities)

    def affine(self, scale: float, shift: float) -> Spectrum:
        if scale <= 0:
            raise InvalidSpectrum("affine map needs a positive scale")
        return Spectrum(tuple(scale * a + shift for a in self.values), self.multiplicities)

    def __repr__(self):
        pairs = ", ".join(f"{a!r}x{n}" for a, n in zip(self.values, self.multiplicities))
        return f"Spectrum([{pairs}], d={self.d})"


def build_spectrum(raw_eigenvalues: Iterable[float], cluster_tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    """Canonical spectrum from a raw eigenvalue list.

    Sorted neighbours closer than ``cluster_tol`` times the spectral range
    (absolute when the range is zero) are chained into one cluster, which is
    replaced by its arithmetic mean carrying the summed multiplicity.
    """
    raw = [float(v) for v in raw_eigenvalues]
    if not raw:
        raise InvalidSpectrum("empty eigenvalue list")
    if not all(math.isfinite(v) for v in raw):
        raise InvalidSpectrum("eigenvalues must be finite")
    if cluster_tol < 0 or not math.isfinite(cluster_tol):
        raise InvalidSpectrum("cluster_tol must be a finite nonnegative number")
    raw.sort()
    # halves first so the range of a full-double spectrum does not overflow
    half_span = raw[-1] / 2 - raw[0] / 2
    threshold = 2 * cluster_tol * half_span if half_span > 0 else cluster_tol

    clusters: list[list[float]] = [[raw[0]]]
    for v in raw[1:]:
        if v - clusters[-1][-1] <= threshold:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    values = tuple(_cluster_mean(c) for c in clusters)
    mults = tuple(len(c) for c in clusters)
    return Spectrum(values, mults)


def _cluster_mean(c: list[float]) -> float:
    # offsets from the first member are small, so this neither overflows nor
    # moves exact duplicates
    if c[0] == c[-1]:
        return c[0]
    return c[0] + math.fsum(v - c[0] for v in c) / len(c)


def from_pairs(pairs: Sequence[tuple[float, int]], cluster_tol: float = 0.0) -> Spectrum:
    """Spectrum from (value, multiplicity) pairs in any order."""
    raw = []
    for value, mult in pairs:
        if int(mult) != mult or mult < 1:
            raise InvalidSpectrum(f"bad multiplicity {mult!r}")
        raw.extend([float(value)] * int(mult))
    return build_spectrum(raw, cluster_tol)


@dataclass(frozen=True)
class SpectrumKind:
    """Named spectrum family; ``param`` is the rank, exponent or constant."""

    tag: str
    param: float | None = None

    TAGS = ("projector", "number_operator", "power", "log", "constant", "uniform_grid")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise InvalidSpectrum(f"unknown spectrum kind {self.tag!r}")
        if self.tag in ("projector", "power", "constant") and self.param is None:
            raise InvalidSpectrum(f"{self.tag} needs a parameter")

    @classmethod
    def projector(cls, rank: int = 1):
        return cls("projector", rank)

    @classmethod
    def number_operator(cls):
        return cls("number_operator")

    @classmethod
    def power(cls, alpha: float):
        return cls("power", alpha)

    @classmethod
    def log(cls):
        return cls("log")

    @classmethod
    def constant(cls, value: float):
        return cls("constant", value)

    @classmethod
    def uniform_grid(cls):
        """a_k = k/d, the spacing used for the density plots."""
        return cls("uniform_grid")


def generate(kind: SpectrumKind, d: int) -> Spectrum:
    if int(d) != d or d < 1:
        raise InvalidSpectrum("dimension must be a positive integer")
    d = int(d)
    tag, p = kind.tag, kind.param
    if tag == "constant":
        return Spectrum((float(p),), (d,))
    if tag == "projector":
        r = int(p)
        if r != p or r < 0 or r > d:
            raise InvalidSpectrum(f"projector rank must be an integer in [0, {d}]")
        if r == 0:
            return Spectrum((0.0,), (d,))
        if r == d:
            return Spectrum((1.0,), (d,))
        return Spectrum((0.0, 1.0), (d - r, r))
    if tag == "number_operator":
        values = [float(k) for k in range(1, d + 1)]
    elif tag == "uniform_grid":
        values = [k / d for k in range(1, d + 1)]
    elif tag == "power":
        if not p > 0:
            raise InvalidSpectrum("power spectrum needs alpha > 0")
        values = [float(k) ** p for k in range(1, d + 1)]
    else:  # log
        values = [math.log(k) for k in range(1, d + 1)]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidSpectrum(f"{tag} eigenvalues collide numerically at d={d}")
    return Spectrum(tuple(values), (1,) * d)
