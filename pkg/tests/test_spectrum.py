import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarlaw import InvalidSpectrum, Spectrum, SpectrumKind, build_spectrum, from_pairs, generate

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_duplicates_merge():
    s = build_spectrum([1, 1, 0], 0.0)
    assert s.values == (0.0, 1.0)
    assert s.multiplicities == (1, 2)
    assert s.d == 3


def test_distinct_values_kept():
    s = build_spectrum([0.0, 1.0, 2.0], 0.0)
    assert s.values == (0.0, 1.0, 2.0)
    assert s.multiplicities == (1, 1, 1)


def test_near_duplicates_cluster_to_mean():
    s = build_spectrum([0, 1e-15, 1], 1e-12)
    assert s.values == (5e-16, 1.0)
    assert s.multiplicities == (2, 1)
    assert s.d == 3


def test_zero_range_uses_absolute_tolerance():
    assert build_spectrum([2.0, 2.0, 2.0], 1e-12).multiplicities == (3,)
    # with a nonzero range the tolerance is relative, so a lone pair never merges
    assert build_spectrum([2.0, 2.0 + 1e-13], 1e-12).multiplicities == (1, 1)


@pytest.mark.parametrize("raw", [[], [0.0, math.nan], [math.inf]])
def test_rejects_empty_and_nonfinite(raw):
    with pytest.raises(InvalidSpectrum):
        build_spectrum(raw)


def test_rejects_bad_direct_construction():
    with pytest.raises(InvalidSpectrum):
        Spectrum((1.0, 0.0), (1, 1))
    with pytest.raises(InvalidSpectrum):
        Spectrum((0.0, 1.0), (1, 0))


def test_generators():
    s = generate(SpectrumKind.projector(1), 4)
    assert (s.values, s.multiplicities) == ((0.0, 1.0), (3, 1))
    s = generate(SpectrumKind.number_operator(), 3)
    assert (s.values, s.multiplicities) == ((1.0, 2.0, 3.0), (1, 1, 1))
    s = generate(SpectrumKind.constant(2.5), 5)
    assert (s.values, s.multiplicities) == ((2.5,), (5,))
    s = generate(SpectrumKind.log(), 5)
    assert s.values[0] == 0.0 and s.values[-1] == math.log(5)
    s = generate(SpectrumKind.power(0.5), 4)
    assert s.values == tuple(k ** 0.5 for k in range(1, 5))
    s = generate(SpectrumKind.uniform_grid(), 4)
    assert s.values == (0.25, 0.5, 0.75, 1.0)


def test_projector_edge_ranks_are_constant():
    assert generate(SpectrumKind.projector(0), 3).is_constant
    assert generate(SpectrumKind.projector(3), 3).values == (1.0,)
    with pytest.raises(InvalidSpectrum):
        generate(SpectrumKind.projector(4), 3)


def test_derived_quantities():
    s = from_pairs([(-2.0, 1), (1.0, 3)])
    assert s.d == 4
    assert s.trace == 1.0
    assert s.mean == 0.25
    assert s.operator_norm == 2.0
    assert s.width == 3.0
    assert s.eigenvalues() == [-2.0, 1.0, 1.0, 1.0]
    assert s.is_degenerate and not s.is_constant


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=30), st.sampled_from([0.0, 1e-12, 1e-6, 1e-2]))
def test_build_invariants(raw, tol):
    s = build_spectrum(raw, tol)
    assert sum(s.multiplicities) == s.d == len(raw)
    assert all(a < b for a, b in zip(s.values, s.values[1:]))
    assert all(n >= 1 for n in s.multiplicities)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=30), st.sampled_from([0.0, 1e-12, 1e-9]))
def test_build_idempotent(raw, tol):
    s = build_spectrum(raw, tol)
    assert build_spectrum(s.eigenvalues(), tol) == s


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=20), st.integers(-1000, 1000))
def test_shift_equivariance(raw, shift):
    # integers keep the shift exact in floating point
    s = build_spectrum(raw, 0.0)
    t = build_spectrum([v + shift for v in raw], 0.0)
    assert t.values == tuple(v + shift for v in s.values)
    assert t.multiplicities == s.multiplicities
