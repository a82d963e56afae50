import math

import numpy as np
import pytest

from haarlaw import (InvalidArgument, SpectrumKind, compile_law, from_pairs, generate, ks_test,
                     sample)
from haarlaw.moments import exact_mean_variance
from haarlaw.montecarlo import haar_weights, ks_statistic


def test_weights_on_simplex():
    w = haar_weights(np.random.default_rng(0), 6, 1000)
    assert w.shape == (1000, 6)
    assert np.all(w >= 0)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, rtol=1e-14)


def test_constant_draws():
    s = generate(SpectrumKind.constant(2.5), 4)
    draws = sample(s, 500, seed=1)
    assert np.all(draws.values == 2.5)
    assert ks_test(draws, compile_law(s)).ks_statistic == 0.0


def test_invalid_count():
    with pytest.raises(InvalidArgument):
        sample(generate(SpectrumKind.projector(1), 3), 0, seed=1)


def test_draws_within_range_and_reproducible():
    s = from_pairs([(-1.0, 2), (0.5, 1), (3.0, 3)])
    a = sample(s, 40_000, seed=11)
    assert a.n == 40_000
    assert np.all((a.values >= s.lower) & (a.values <= s.upper))
    b = sample(s, 40_000, seed=11, workers=4)
    np.testing.assert_array_equal(a.values, b.values)
    c = sample(s, 40_000, seed=12)
    assert not np.array_equal(a.values, c.values)


def test_prefix_stable_across_n():
    s = generate(SpectrumKind.number_operator(), 5)
    short = sample(s, 20_000, seed=5).values
    long = sample(s, 50_000, seed=5).values
    np.testing.assert_array_equal(short[:16384], long[:16384])


def test_uniform_ks():
    s = generate(SpectrumKind.projector(1), 2)
    report = ks_test(sample(s, 100_000, seed=3), compile_law(s))
    assert report.passed
    assert 0 <= report.ks_statistic <= 1


@pytest.mark.parametrize("seed", [21, 22, 23])
def test_sample_mean_within_four_sigma(seed):
    s = from_pairs([(0.0, 2), (1.0, 1), (4.0, 2)])
    n = 50_000
    draws = sample(s, n, seed)
    mean, var = exact_mean_variance(s)
    assert abs(np.mean(draws.values) - mean) <= 4 * math.sqrt(var / n)


def test_permuted_blocks_same_distribution():
    a = sample(from_pairs([(0.0, 1), (1.0, 2), (2.0, 3)]), 50_000, seed=31).values
    b = sample(from_pairs([(0.0, 3), (1.0, 2), (2.0, 1)]), 50_000, seed=32).values
    # mirror image of the spectrum: 2 - A has the law of the permuted spectrum
    b = 2.0 - b
    x = np.sort(np.concatenate([a, b]))
    fa = np.searchsorted(np.sort(a), x, side="right") / len(a)
    fb = np.searchsorted(np.sort(b), x, side="right") / len(b)
    d = np.max(np.abs(fa - fb))
    assert d * math.sqrt(len(a) * len(b) / (len(a) + len(b))) < 1.63


def test_adversarial_mismatch_detected():
    draws = sample(generate(SpectrumKind.projector(1), 3), 100_000, seed=4)
    law = compile_law(generate(SpectrumKind.projector(1), 10))
    # same spectrum values, different dimension: compare by statistic only
    stat = ks_statistic(draws.values, law)
    assert math.sqrt(draws.n) * stat > 50
    with pytest.raises(InvalidArgument):
        ks_test(draws, law)


def test_ks_statistic_point_mass_and_ties():
    law = compile_law(generate(SpectrumKind.constant(1.0), 3))
    assert ks_statistic(np.array([1.0, 1.0, 2.0]), law) == pytest.approx(1 / 3)
    uni = compile_law(generate(SpectrumKind.projector(1), 2))
    assert ks_statistic(np.array([0.5, 0.5]), uni) == pytest.approx(0.5)


def test_report_fields():
    s = generate(SpectrumKind.projector(1), 4)
    report = ks_test(sample(s, 1000, seed=2), compile_law(s))
    data = report.to_dict()
    assert data["exact_mean"] == 0.25
    assert data["scaled_statistic"] == pytest.approx(math.sqrt(1000) * data["ks_statistic"])
    assert data["critical_value"] == 1.63
