"""Haar-random pure states and goodness of fit against the exact law."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument
from .exact_law import PointMassLaw, cdf
from .moments import exact_mean_variance
from .spectrum import Spectrum

KS_CRITICAL_1PCT = 1.63
CHUNK = 1 << 14
# D_N is resolved to ~1/sqrt(N); absolute CDF accuracy far below that suffices.
KS_CDF_ATOL = 1e-12


@dataclass(frozen=True)
class SampleSet:
    spectrum: Spectrum
    seed: int
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GoFReport:
    ks_statistic: float
    n: int
    sample_mean: float
    sample_var: float
    exact_mean: float
    exact_var: float
    critical_value: float = KS_CRITICAL_1PCT

    @property
    def scaled_statistic(self) -> float:
        """sqrt(N) * D_N."""
        return math.sqrt(self.n) * self.ks_statistic

    @property
    def passed(self) -> bool:
        return self.scaled_statistic < self.critical_value

    def to_dict(self) -> dict:
        return {
            "ks_statistic": self.ks_statistic,
            "scaled_statistic": self.scaled_statistic,
            "critical_value": self.critical_value,
            "passed": self.passed,
            "n": self.n,
            "sample_mean": self.sample_mean,
            "sample_var": self.sample_var,
            "exact_mean": self.exact_mean,
            "exact_var": self.exact_var,
        }


def haar_weights(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    """|<j|psi>|^2 for ``count`` Haar-random states, shape (count, d).

    Each state is a vector of d complex standard normals, normalised.
    """
    z = rng.standard_normal((count, 2 * d))
    amp2 = z[:, :d] ** 2 + z[:, d:] ** 2
    return amp2 / amp2.sum(axis=1, keepdims=True)


def _chunk(spectrum: Spectrum, seed_seq: np.random.SeedSequence, count: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    w = haar_weights(rng, spectrum.d, count)
    starts = np.concatenate([[0], np.cumsum(spectrum.multiplicities)[:-1]])
    block = np.add.reduceat(w, starts, axis=1)
    return block @ np.array(spectrum.values)


def sample(s: Spectrum, n: int, seed: int, workers: int = 1) -> SampleSet:
    """Draw ``n`` values of <psi|A|psi>.

    The draws are split into fixed-size chunks, each with its own child seed
    and a counter-based Philox stream, so the output depends only on ``seed``
    and not on ``workers``.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument("number of samples must be a positive integer")
    n = int(n)
    n_chunks = -(-n // CHUNK)
    children = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    sizes = [min(CHUNK, n - i * CHUNK) for i in range(n_chunks)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _chunk(s, *a), zip(children, sizes)))
    else:
        parts = [_chunk(s, c, m) for c, m in zip(children, sizes)]
    values = np.clip(np.concatenate(parts), s.lower, s.upper)
    return SampleSet(s, int(seed), values)


def ks_statistic(values: np.ndarray, law) -> float:
    """sup_x |F_N(x) - F(x)| for a continuous law or a point mass."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if isinstance(law, PointMassLaw):
        below = np.count_nonzero(x < law.location) / n
        at_or_below = np.count_nonzero(x <= law.location) / n
        return max(below, 1.0 - at_or_below)
    u, counts = np.unique(x, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    policy = replace(law.policy, atol=KS_CDF_ATOL)
    f = cdf(law, u, policy if not policy.is_float else None)
    return float(max(np.max(upper - f), np.max(f - lower), 0.0))


def ks_test(samples: SampleSet, law) -> GoFReport:
    if law.spectrum is not None and law.spectrum != samples.spectrum:
        raise InvalidArgument("law and samples come from different spectra")
    mean, var = exact_mean_variance(samples.spectrum)
    values = samples.values
    return GoFReport(
        ks_statistic=ks_statistic(values, law),
        n=samples.n,
        sample_mean=float(np.mean(values)),
        sample_var=float(np.var(values, ddof=1)) if samples.n > 1 else 0.0,
        exact_mean=mean,
        exact_var=var,
    )
