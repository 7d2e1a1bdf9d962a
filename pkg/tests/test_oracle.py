"""Brute-force oracle tests: weights, sector integrals, moment matrix."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from twocharge import ensemble, oracle

TWO_PI = 2.0 * math.pi

angles = st.floats(-math.pi, math.pi - 1e-6)


# ------------------------------------------------------------- weights


@given(st.lists(angles, min_size=2, max_size=4, unique=True))
@settings(max_examples=60, deadline=None)
def test_vandermonde_matches_chord_product_charge1(pts):
    w_det = oracle.vandermonde_weight(tuple(pts), ())
    w_chord = oracle.chord_product_weight(tuple(pts), ())
    assert w_det == pytest.approx(w_chord, rel=1e-8, abs=1e-12)


@given(
    st.lists(angles, min_size=1, max_size=2, unique=True),
    st.lists(angles, min_size=1, max_size=2, unique=True),
)
@settings(max_examples=60, deadline=None)
def test_vandermonde_matches_chord_product_mixed(c1, c2):
    if set(np.round(c1, 9)) & set(np.round(c2, 9)):
        return
    w_det = oracle.vandermonde_weight(tuple(c1), tuple(c2))
    w_chord = oracle.chord_product_weight(tuple(c1), tuple(c2))
    assert w_det == pytest.approx(w_chord, rel=1e-7, abs=1e-12)


def test_chord_product_equals_boltzmann_factor():
    c1, c2 = (0.3, -1.2), (2.0,)
    config = ensemble.Configuration(c1, c2)
    want = math.exp(-ensemble.energy(config))
    assert oracle.chord_product_weight(c1, c2) == pytest.approx(want, rel=1e-12)


@given(angles, angles)
@settings(max_examples=100)
def test_sgn_factorization(theta, psi):
    lhs, rhs = oracle.sgn_factorization_check(theta, psi)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


# ----------------------------------------------------- partition oracle


def test_quadrature_partition_small_systems():
    # N <= 2 sectors integrate exactly by Gauss-Legendre
    for n, x in [(1, 0.5), (1, 2.0), (2, 0.5), (2, 1.0), (2, 2.0)]:
        est, se = oracle.oracle_partition(n, x)
        exact = ensemble.partition(ensemble.EnsembleParams(n, x))
        assert est == pytest.approx(exact, rel=1e-12)
        assert se < 1e-10 * exact


def test_sobol_partition_three_charges():
    est, se = oracle.oracle_partition(3, 1.0)
    exact = 16.0 * math.pi**2
    assert abs(est - exact) <= 3.0 * se
    assert est == pytest.approx(exact, rel=1e-5)


def test_sobol_partition_four_charges():
    est, se = oracle.oracle_partition(4, 1.0)
    exact = ensemble.partition(ensemble.EnsembleParams(4, 1.0))
    assert abs(est - exact) <= 3.0 * se
    assert est == pytest.approx(exact, rel=1e-4)


def test_oracle_partition_zero_fugacity():
    est, _ = oracle.oracle_partition(2, 0.0)
    assert est == pytest.approx(TWO_PI, rel=1e-12)


def test_oracle_settings_validation():
    with pytest.raises(ValueError):
        oracle.OracleSettings(method="bogus")
    with pytest.raises(ValueError):
        oracle.OracleSettings(replicates=1)


# ------------------------------------------------------- moment matrix


def test_moment_matrix_small_cases():
    # N = 2: Pf [[0, a], [-a, 0]] = a = 8 pi X^2 + 2 pi
    x = 1.3
    want = 8.0 * math.pi * x * x + TWO_PI
    assert oracle.moment_matrix_partition(2, x) == pytest.approx(want, rel=1e-14)
    assert oracle.moment_matrix_partition(2, x) == pytest.approx(
        ensemble.partition(ensemble.EnsembleParams(2, x)), rel=1e-14
    )


def test_moment_matrix_matches_product_formula():
    for x in (0.5, 1.0, 2.0):
        for n in range(2, 61, 2):
            got = math.log(oracle.moment_matrix_partition(n, x))
            want = ensemble.log_partition(ensemble.EnsembleParams(n, x))
            assert got == pytest.approx(want, rel=1e-12), (n, x)


def test_moment_matrix_rejects_odd():
    with pytest.raises(ValueError):
        oracle.moment_matrix_partition(3, 1.0)


# ------------------------------------------------- two-charge intensities


def test_oracle_intensity_values():
    x = 1.0
    z2 = TWO_PI * (1.0 + 4.0 * x * x)
    assert oracle.oracle_intensity(x, charge1=(0.4,)) == pytest.approx(
        8.0 * x * x / z2, rel=1e-14
    )
    assert oracle.oracle_intensity(x, charge2=(1.0,)) == pytest.approx(
        1.0 / z2, rel=1e-14
    )
    d = 1.7
    assert oracle.oracle_intensity(x, charge1=(d, 0.0)) == pytest.approx(
        2.0 * x * x * abs(math.sin(0.5 * d)) / z2, rel=1e-14
    )
    # impossible occupation patterns at total charge 2
    assert oracle.oracle_intensity(x, charge1=(0.1,), charge2=(1.0,)) == 0.0
    assert oracle.oracle_intensity(x, charge2=(0.1, 1.0)) == 0.0


def test_oracle_intensity_integrates_to_counts():
    # integrating intensities over the circle recovers factorial moments
    x = 0.8
    params = ensemble.EnsembleParams(2, x)
    dist = ensemble.count_distribution(params)
    q = dist.success_probs[0]
    r10 = oracle.oracle_intensity(x, charge1=(0.0,))
    assert TWO_PI * r10 == pytest.approx(2.0 * q, rel=1e-13)  # E[L]
    r01 = oracle.oracle_intensity(x, charge2=(0.0,))
    assert TWO_PI * r01 == pytest.approx(1.0 - q, rel=1e-13)  # E[M]
    pair, _ = quad(lambda d: oracle.oracle_intensity(x, charge1=(d, 0.0)), 0, TWO_PI)
    assert TWO_PI * pair == pytest.approx(2.0 * q, rel=1e-9)  # E[L(L-1)]
