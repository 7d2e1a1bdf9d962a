"""Chain tests: backend parity, detailed balance, estimators, exact laws."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import twocharge._chain_py as chain_py
from twocharge import ensemble, sampler

TWO_PI = 2.0 * math.pi


def _run_with(core, config):
    acc = sampler.Accumulators.empty(config)
    init = sampler.initial_configuration(config)
    out = core.run_chain(
        config.total_charge,
        config.fugacity,
        config.rotate_prob,
        config.split_prob,
        config.merge_prob,
        config.sigma_rotate,
        config.sigma_split,
        config.steps,
        config.burn_in,
        config.thin,
        config.check_every,
        config.seed,
        list(init.charge1),
        list(init.charge2),
        acc.count_hist,
        acc.density1,
        acc.density2,
        acc.pair11,
        acc.pair22,
        acc.pair12,
        acc.spacing1,
        acc.spacing2,
        acc.spacing_all,
        acc.spacing_overflow,
        acc.degenerate,
        acc.proposed,
        acc.accepted,
        config.total_charge / TWO_PI,
        config.spacing_max,
    )
    return acc, out


# --------------------------------------------------------- backend parity


@pytest.mark.parametrize(
    "n,x,seed",
    [(8, 2.0, 123), (2, 1.0, 7), (5, 1.5, 99), (4, 0.0, 3)],
)
def test_backends_produce_identical_trajectories(n, x, seed):
    try:
        from twocharge import _chain as chain_cy
    except ImportError:
        pytest.skip("compiled stepping core not built")
    config = sampler.ChainConfig(
        total_charge=n, fugacity=x, steps=40_000, burn_in=500, thin=20, seed=seed
    )
    acc_py, out_py = _run_with(chain_py, config)
    acc_cy, out_cy = _run_with(chain_cy, config)
    for name in sampler.Accumulators._ARRAYS:
        assert np.array_equal(getattr(acc_py, name), getattr(acc_cy, name)), name
    assert out_py[0] == list(out_cy[0])  # final charge-1 angles, same order
    assert out_py[1] == list(out_cy[1])
    assert out_py[2] == out_cy[2]  # cached energy, bit-exact
    assert out_py[3] == out_cy[3]


def test_backend_name_reports():
    assert sampler.backend_name() in ("cython", "python")


# ----------------------------------------------------------- determinism


def test_same_seed_same_result():
    config = sampler.ChainConfig(total_charge=6, fugacity=1.0, steps=20_000, seed=42)
    a = sampler.run_chain(config)
    b = sampler.run_chain(config)
    assert a.final_config == b.final_config
    assert a.final_energy == b.final_energy
    assert np.array_equal(a.accumulators.count_hist, b.accumulators.count_hist)


def test_different_seeds_differ():
    base = sampler.ChainConfig(total_charge=6, fugacity=1.0, steps=20_000, seed=1)
    import dataclasses

    other = dataclasses.replace(base, seed=2)
    a = sampler.run_chain(base)
    b = sampler.run_chain(other)
    assert a.final_config != b.final_config


def test_derived_chain_seeds_are_distinct():
    seeds = {sampler.derive_chain_seed(1, i) for i in range(100)}
    assert len(seeds) == 100


# ------------------------------------------------------- detailed balance


def _random_config(rng, l, m):
    pts = rng.uniform(-math.pi, math.pi, size=l + m)
    return tuple(pts[:l]), tuple(pts[l:])


def test_split_merge_log_ratios_cancel():
    # a split followed by merging the two freshly created unit charges is
    # the identity; the acceptance log-ratios must cancel exactly
    rng = np.random.default_rng(2)
    config = sampler.ChainConfig(total_charge=10, fugacity=1.7, steps=10, burn_in=0)
    for _ in range(50):
        l = int(rng.integers(0, 4))
        m = int(rng.integers(1, 4))
        c1, c2 = _random_config(rng, l, m)
        j = int(rng.integers(0, m))
        delta = float(rng.uniform(1e-4, 0.5 * math.pi - 1e-4))
        fwd = sampler.split_log_ratio(1.7, c1, c2, j, delta, config)
        phi = c2[j]
        new_c1 = c1 + (phi + delta, phi - delta)
        new_c2 = tuple(t for i, t in enumerate(c2) if i != j)
        back = sampler.merge_log_ratio(1.7, new_c1, new_c2, l, l + 1, config)
        assert fwd + back == pytest.approx(0.0, abs=1e-10)


@given(
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.floats(1e-3, 1.5),
    st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=60, deadline=None)
def test_split_merge_cancel_property(l, m, delta, seed):
    rng = np.random.default_rng(seed)
    c1, c2 = _random_config(rng, l, m)
    config = sampler.ChainConfig(total_charge=2 * m + l + 2, fugacity=0.9, steps=10, burn_in=0)
    fwd = sampler.split_log_ratio(0.9, c1, c2, 0, delta, config)
    phi = c2[0]
    new_c1 = c1 + (phi + delta, phi - delta)
    back = sampler.merge_log_ratio(0.9, new_c1, c2[1:], l, l + 1, config)
    assert fwd + back == pytest.approx(0.0, abs=1e-9)


def test_merge_recovers_midpoint_across_wrap():
    # merging a pair that straddles the branch cut lands at the geodesic
    # midpoint, not the arithmetic one
    config = sampler.ChainConfig(total_charge=4, fugacity=1.0, steps=10, burn_in=0)
    c1 = (math.pi - 0.1, -math.pi + 0.1)  # geodesic midpoint at pi
    lr = sampler.merge_log_ratio(1.0, c1, (), 0, 1, config)
    assert math.isfinite(lr)


# ----------------------------------------------------- conservation laws


def test_accepted_split_merge_balance_matches_final_state():
    # each accepted split adds two unit charges, each merge removes two
    config = sampler.ChainConfig(
        total_charge=8, fugacity=2.0, steps=50_000, burn_in=0, thin=10, seed=17
    )
    result = sampler.run_chain(config)
    l_init = len(sampler.initial_configuration(config).charge1)
    l_final = len(result.final_config.charge1)
    acc = result.accumulators
    assert 2 * int(acc.accepted[1] - acc.accepted[2]) == l_final - l_init


def test_energy_cache_validates():
    config = sampler.ChainConfig(
        total_charge=8, fugacity=2.0, steps=30_000, check_every=1_000, seed=4
    )
    result = sampler.run_chain(config)
    gap = sampler.validate_energy(result)
    assert gap < 1e-9
    assert result.max_energy_drift < 1e-10


def test_total_charge_preserved():
    config = sampler.ChainConfig(total_charge=7, fugacity=1.2, steps=30_000, seed=6)
    result = sampler.run_chain(config)
    l = len(result.final_config.charge1)
    m = len(result.final_config.charge2)
    assert l + 2 * m == 7
    # odd total charge forces odd unit-charge count throughout
    hist = result.accumulators.count_hist
    assert hist[::2].sum() == 0


def test_zero_fugacity_freezes_unit_charges():
    config = sampler.ChainConfig(total_charge=6, fugacity=0.0, steps=20_000, seed=9)
    result = sampler.run_chain(config)
    hist = result.accumulators.count_hist
    assert hist[0] == hist.sum()
    assert len(result.final_config.charge1) == 0


# ------------------------------------------------------------ estimators


def test_config_validation():
    with pytest.raises(ValueError):
        sampler.ChainConfig(total_charge=0, fugacity=1.0)
    with pytest.raises(ValueError):
        sampler.ChainConfig(total_charge=3, fugacity=0.0)
    with pytest.raises(ValueError):
        sampler.ChainConfig(total_charge=4, fugacity=1.0, rotate_prob=0.5)
    with pytest.raises(ValueError):
        sampler.ChainConfig(
            total_charge=4, fugacity=1.0, split_prob=0.2, merge_prob=0.0
        )
    with pytest.raises(ValueError):
        sampler.ChainConfig(total_charge=4, fugacity=1.0, thin=0)
    with pytest.raises(ValueError):
        sampler.ChainConfig(total_charge=4, fugacity=1.0, steps=1000, burn_in=1000)


def test_default_proposal_widths():
    config = sampler.ChainConfig(total_charge=8, fugacity=1.0)
    assert config.sigma_rotate == pytest.approx(TWO_PI / 8)
    assert config.sigma_split == pytest.approx(math.pi / 16)


def test_initial_configuration_valid():
    for n in (1, 2, 7, 12):
        config = sampler.ChainConfig(total_charge=n, fugacity=1.0)
        init = sampler.initial_configuration(config)
        assert init.total_charge == n
        assert math.isfinite(ensemble.energy(init)) or init.total_charge == 1


def test_jackknife_on_known_statistic():
    config = sampler.ChainConfig(total_charge=4, fugacity=1.0, steps=20_000, seed=2)
    results = sampler.run_chains(config, 4)
    est, se = sampler.estimate_count_mean(results)
    # jackknife of the pooled mean must sit inside the chain spread
    per_chain = [
        float(
            (np.arange(5) * r.accumulators.count_hist).sum()
            / r.accumulators.recorded
        )
        for r in results
    ]
    assert min(per_chain) <= est <= max(per_chain)
    assert se > 0.0
    with pytest.raises(ValueError):
        sampler.jackknife(results[:1], lambda acc: 0.0)


def test_count_probabilities_sum_to_one():
    config = sampler.ChainConfig(total_charge=6, fugacity=1.5, steps=20_000, seed=3)
    results = sampler.run_chains(config, 2)
    total = sum(
        sampler.estimate_count_prob(results, c)[0]
        for c in range(7)
    )
    assert total == pytest.approx(1.0, abs=1e-12)


def test_merge_accumulators_counts_add():
    config = sampler.ChainConfig(total_charge=4, fugacity=1.0, steps=10_000, burn_in=500, seed=5)
    results = sampler.run_chains(config, 3)
    merged = sampler.merge_accumulators(results)
    assert merged.recorded == sum(r.accumulators.recorded for r in results)
    direct = sum(int(r.accumulators.count_hist.sum()) for r in results)
    assert int(merged.count_hist.sum()) == direct == merged.recorded


def test_two_charge_occupancy_matches_exact_law():
    # N = 2, X = 1: P(L = 2) = 4/5 exactly
    config = sampler.ChainConfig(
        total_charge=2, fugacity=1.0, steps=120_000, burn_in=2_000, thin=20, seed=11
    )
    results = sampler.run_chains(config, 4)
    est, se = sampler.estimate_count_prob(results, 2)
    assert se < 0.02
    assert abs(est - 0.8) <= 3.0 * se


def test_pair_intensity_estimator_shapes():
    config = sampler.ChainConfig(
        total_charge=6, fugacity=1.0, steps=30_000, seed=13, pair_bins=18
    )
    results = sampler.run_chains(config, 2)
    for species in ((1, 1), (2, 2), (1, 2)):
        est = sampler.estimate_pair_intensity(results, species)
        assert est.centers.shape == (18,)
        assert est.values.shape == (18,)
        assert est.errors.shape == (18,)
        assert np.all(est.centers > 0) and np.all(est.centers < math.pi)
        assert np.all(est.values >= 0)


def test_density_chisquare_uniform():
    config = sampler.ChainConfig(
        total_charge=6, fugacity=1.0, steps=200_000, seed=21, thin=40
    )
    results = sampler.run_chains(config, 2)
    stat, p = sampler.density_chisquare(results, species=1)
    assert p > 1e-4
    stat, p = sampler.density_chisquare(results, species=2)
    assert p > 1e-4


def test_spacing_tables():
    config = sampler.ChainConfig(
        total_charge=8, fugacity=2.0, steps=30_000, seed=15, spacing_bins=10
    )
    results = sampler.run_chains(config, 2)
    for which in ("charge1", "charge2", "all"):
        table = sampler.spacing_table(results, which)
        assert table.edges.shape == (11,)
        assert table.counts.shape == (10,)
        assert table.overflow >= 0
        assert table.degenerate >= 0
    pooled = sampler.spacing_table(results, "all")
    merged = sampler.merge_accumulators(results)
    # every recorded state contributes its full gap count to the pooled set
    assert pooled.counts.sum() + pooled.overflow > 0
    assert merged.recorded > 0


def test_acceptance_rates_structure():
    config = sampler.ChainConfig(total_charge=4, fugacity=1.0, steps=20_000, seed=1)
    rates = sampler.acceptance_rates([sampler.run_chain(config)])
    assert set(rates) == {"rotate", "split", "merge"}
    for v in rates.values():
        assert 0.0 <= v <= 1.0
