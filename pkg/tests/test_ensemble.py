"""Partition function, count law, and configuration-weight tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocharge import ensemble

TWO_PI = 2.0 * math.pi


# ------------------------------------------------------------- partition


def test_partition_small_system_anchors():
    # hand-reduced values of the one-dimensional integrals
    cases = [
        (1, 1.0, TWO_PI),
        (2, 1.0, 10.0 * math.pi),
        (3, 1.0, 16.0 * math.pi**2),
        (4, 0.0, 12.0 * math.pi**2),
    ]
    for n, x, z in cases:
        got = ensemble.partition(ensemble.EnsembleParams(n, x))
        assert got == pytest.approx(z, rel=1e-13)


def test_partition_zero_fugacity_double_factorial():
    # X = 0 leaves only the all-double-charge sector: (2 pi)^(N/2) (N-1)!!
    for n in range(2, 22, 2):
        dfact = 1.0
        for c in range(1, n, 2):
            dfact *= c
        got = ensemble.log_partition(ensemble.EnsembleParams(n, 0.0))
        want = 0.5 * n * math.log(TWO_PI) + math.log(dfact)
        assert got == pytest.approx(want, rel=1e-14)


def test_partition_odd_zero_fugacity_vanishes():
    params = ensemble.EnsembleParams(3, 0.0)
    assert ensemble.log_partition(params) == -math.inf
    assert ensemble.partition(params) == 0.0


def test_partition_overflow_maps_to_inf():
    assert ensemble.partition(ensemble.EnsembleParams(2000, 1.0)) == math.inf


def test_params_validation():
    with pytest.raises(ValueError):
        ensemble.EnsembleParams(0, 1.0)
    with pytest.raises(ValueError):
        ensemble.EnsembleParams(2, -0.5)
    with pytest.raises(ValueError):
        ensemble.EnsembleParams(2, math.inf)


@given(st.integers(min_value=1, max_value=60), st.floats(0.01, 20.0))
@settings(max_examples=60, deadline=None)
def test_log_partition_monotone_in_fugacity(n, x):
    a = ensemble.log_partition(ensemble.EnsembleParams(n, x))
    b = ensemble.log_partition(ensemble.EnsembleParams(n, x * 1.5))
    assert b > a


# ------------------------------------------------------------- count law


def test_count_distribution_success_probs():
    params = ensemble.EnsembleParams(6, 3.0)
    dist = ensemble.count_distribution(params)
    want = [36.0 / (36.0 + c * c) for c in (5, 3, 1)]
    assert np.allclose(dist.success_probs, want, rtol=1e-15)
    assert dist.parity == 0


def test_pmf_normalized_and_two_charge_reduction():
    params = ensemble.EnsembleParams(4, 1.5)
    dist = ensemble.count_distribution(params)
    assert float(dist.pmf().sum()) == pytest.approx(1.0, abs=1e-13)
    # at total charge 2 there is a single Bernoulli scale: P(L=2) = q
    dist2 = ensemble.count_distribution(ensemble.EnsembleParams(2, 1.5))
    q = 4.0 * 1.5**2 / (4.0 * 1.5**2 + 1.0)
    assert dist2.pmf()[1] == pytest.approx(q, rel=1e-14)


def test_moments_match_pmf():
    for n, x in [(5, 1.3), (8, 0.4), (11, 6.0), (2, 2.0)]:
        dist = ensemble.count_distribution(ensemble.EnsembleParams(n, x))
        support = np.asarray(dist.support(), dtype=float)
        pmf = dist.pmf()
        mean = float((support * pmf).sum())
        var = float(((support - mean) ** 2 * pmf).sum())
        assert dist.mean() == pytest.approx(mean, rel=1e-12)
        assert dist.variance() == pytest.approx(var, rel=1e-11, abs=1e-13)


@given(
    st.integers(min_value=1, max_value=40),
    st.floats(0.05, 8.0),
    st.floats(-3.0, 3.0),
)
@settings(max_examples=120, deadline=None)
def test_pgf_log_space_matches_product(n, x, t):
    params = ensemble.EnsembleParams(n, x)
    dist = ensemble.count_distribution(params)
    a = ensemble.count_pgf(params, t)
    b = dist.pgf(t)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-12)


def test_pgf_at_one_is_one():
    for n, x in [(3, 0.7), (10, 2.0), (4001, 1.0)]:
        assert ensemble.count_pgf(ensemble.EnsembleParams(n, x), 1.0) == pytest.approx(
            1.0, abs=1e-12
        )


def test_pgf_matches_pmf_transform():
    params = ensemble.EnsembleParams(7, 2.2)
    dist = ensemble.count_distribution(params)
    support = np.asarray(dist.support(), dtype=float)
    pmf = dist.pmf()
    for t in (0.3, -1.7, 2.5):
        direct = float((pmf * t**support).sum())
        assert ensemble.count_pgf(params, t) == pytest.approx(direct, rel=1e-11)


def test_limiting_pgf_values():
    # even parity: cosh ratio; odd parity: sinh ratio
    x, t = 1.0, 2.0
    want = math.cosh(math.pi * x * t) / math.cosh(math.pi * x)
    assert ensemble.limiting_pgf(0, x, t) == pytest.approx(want, rel=1e-14)
    want = math.sinh(math.pi * x * t) / math.sinh(math.pi * x)
    assert ensemble.limiting_pgf(1, x, t) == pytest.approx(want, rel=1e-14)
    assert ensemble.limiting_pgf(0, x, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert ensemble.limiting_pgf(1, x, 1.0) == pytest.approx(1.0, rel=1e-14)


def test_limiting_pgf_large_argument_stable():
    # log-sum form must survive arguments that overflow cosh
    got = ensemble.limiting_pgf(0, 400.0, 0.5)
    want = math.exp(math.pi * 400.0 * (0.5 - 1.0))  # leading exponential ratio
    assert got == pytest.approx(want, rel=1e-10)


def test_limiting_fractions():
    # closed forms and their extreme-rate behavior
    r = 0.5
    assert ensemble.limiting_mean_fraction(r) == pytest.approx(
        2 * r * math.atan(0.5 / r), rel=1e-15
    )
    assert ensemble.limiting_var_fraction(r) == pytest.approx(
        2 * r * math.atan(0.5 / r) - 4 * r * r / (1 + 4 * r * r), rel=1e-15
    )
    assert ensemble.limiting_mean_fraction(1e8) == pytest.approx(1.0, abs=1e-10)
    assert ensemble.limiting_mean_fraction(1e-8) == pytest.approx(
        math.pi * 1e-8, rel=1e-6
    )


def test_mean_count_plus_double_count_is_total():
    for n, x in [(9, 0.8), (16, 3.0)]:
        params = ensemble.EnsembleParams(n, x)
        mean_l = ensemble.mean_count(params)
        mean_m = (n - mean_l) / 2.0
        dist = ensemble.count_distribution(params)
        assert mean_l + 2 * mean_m == pytest.approx(n, rel=1e-14)
        assert dist.mean() == pytest.approx(mean_l, rel=1e-14)


# ------------------------------------------------------------- sampling


def test_sample_counts_matches_pmf():
    params = ensemble.EnsembleParams(6, 1.0)
    dist = ensemble.count_distribution(params)
    counts = ensemble.sample_counts(params, 200_000, rng=11)
    pmf = dict(zip([int(c) for c in dist.support()], dist.pmf()))
    tv = 0.0
    for c in range(7):
        obs = float(np.mean(counts == c))
        tv += abs(obs - pmf.get(c, 0.0))
    assert tv < 0.02
    assert set(np.unique(counts) % 2) == {0}


def test_sample_counts_deterministic():
    params = ensemble.EnsembleParams(10, 2.0)
    a = ensemble.sample_counts(params, 1000, rng=7)
    b = ensemble.sample_counts(params, 1000, rng=7)
    assert np.array_equal(a, b)


def test_standardize_counts_moments():
    n, r = 1000, 0.5
    params = ensemble.EnsembleParams(n, n * r)
    counts = ensemble.sample_counts(params, 50_000, rng=3)
    z = ensemble.standardize_counts(counts, n, r)
    assert abs(float(np.mean(z))) < 0.02
    assert abs(float(np.std(z)) - 1.0) < 0.02


# ------------------------------------------------------ weights, energy


@given(st.floats(-50.0, 50.0))
@settings(max_examples=200)
def test_wrap_angle_range(t):
    w = ensemble.wrap_angle(t)
    assert -math.pi <= w < math.pi
    assert math.isclose(
        math.sin(w), math.sin(t), abs_tol=1e-9
    ) and math.isclose(math.cos(w), math.cos(t), abs_tol=1e-9)


def test_energy_pair_values():
    d = 1.3
    config = ensemble.Configuration((0.0, d), ())
    want = -math.log(2.0 * abs(math.sin(0.5 * d)))
    assert ensemble.energy(config) == pytest.approx(want, rel=1e-14)
    # charge products scale the pair term: 1-2 pair carries factor 2
    config = ensemble.Configuration((0.0,), (d,))
    assert ensemble.energy(config) == pytest.approx(2 * want, rel=1e-14)
    config = ensemble.Configuration((), (0.0, d))
    assert ensemble.energy(config) == pytest.approx(4 * want, rel=1e-14)


def test_energy_rotation_invariant():
    config = ensemble.Configuration((0.1, 1.0), (2.0, -2.5))
    shifted = ensemble.Configuration(
        (0.1 + 0.7, 1.0 + 0.7), (2.0 + 0.7, -2.5 + 0.7)
    )
    assert ensemble.energy(shifted) == pytest.approx(
        ensemble.energy(config), rel=1e-12
    )


def test_energy_coincident_is_inf():
    assert ensemble.energy(ensemble.Configuration((0.5, 0.5), ())) == math.inf
    assert ensemble.energy(ensemble.Configuration((0.5,), (0.5,))) == math.inf


def test_log_weight_explicit():
    params = ensemble.EnsembleParams(2, 1.5)
    # single double charge: X^0 e^0 / (0! 1!) = 1
    assert ensemble.log_weight(params, ensemble.Configuration((), (0.3,))) == 0.0
    # charge-1 pair at separation d: X^2 * 2|sin(d/2)| / 2!
    d = 0.9
    config = ensemble.Configuration((0.0, d), ())
    want = 2 * math.log(1.5) + math.log(2 * abs(math.sin(0.5 * d))) - math.log(2.0)
    assert ensemble.log_weight(params, config) == pytest.approx(want, rel=1e-14)


def test_log_weight_charge_mismatch():
    params = ensemble.EnsembleParams(4, 1.0)
    with pytest.raises(ValueError):
        ensemble.log_weight(params, ensemble.Configuration((0.1,), (1.0,)))
