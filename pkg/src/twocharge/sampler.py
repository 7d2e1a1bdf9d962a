"""Trans-dimensional Metropolis sampler for the two-charge circle gas.

The chain moves on unordered configurations with stationary law
pi(C) propto X^L e^{-E(C)} at fixed total charge L + 2M = N (the species
factorials of the labeled density cancel against labeling multiplicity).
Three move types:

  rotate     move one particle by a wrapped Gaussian step,
  split      replace a double charge at phi by unit charges at phi +- d,
             d half-normal, with the reversible-jump Jacobian factor 2,
  merge      replace a unit-charge pair by a double charge at the
             geodesic midpoint of the pair.

Split displacements d >= pi/2 (and merges of antipodal pairs) are
rejected outright so split and merge stay exact inverses; with the
default widths such proposals are astronomically rare.

The stepping loop runs in a compiled core (twocharge._chain) when the
extension is importable, else in the pure-Python twin; both produce
identical trajectories for a seed.  Set TWOCHARGE_PURE=1 to force the
fallback.  Estimates come with jackknife-over-chains standard errors,
which stay honest under within-chain autocorrelation.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.stats import chisquare

from . import _chain_py
from .ensemble import Configuration, energy

if os.environ.get("TWOCHARGE_PURE") == "1":
    _core = _chain_py
    _BACKEND = "python"
else:
    try:
        from . import _chain as _core

        _BACKEND = "cython"
    except ImportError:
        _core = _chain_py
        _BACKEND = "python"

TWO_PI = 2.0 * math.pi


def backend_name() -> str:
    """Which stepping core is active: "cython" or "python"."""
    return _BACKEND


@dataclass(frozen=True)
class ChainConfig:
    """Physics, proposal, schedule, and histogram parameters of one chain."""

    total_charge: int
    fugacity: float
    steps: int = 1_000_000
    burn_in: int = 10_000
    thin: int = 100
    seed: int = 1
    rotate_prob: float = 0.8
    split_prob: float = 0.1
    merge_prob: float = 0.1
    rotate_width: float = 0.0  # 0 means the default 2*pi/N
    split_width: float = 0.0  # 0 means the default pi/(2N)
    density_bins: int = 32
    pair_bins: int = 36
    spacing_bins: int = 40
    spacing_max: float = 4.0
    check_every: int = 10_000

    def __post_init__(self) -> None:
        if self.total_charge < 1:
            raise ValueError("total_charge must be positive")
        if not math.isfinite(self.fugacity) or self.fugacity < 0.0:
            raise ValueError("fugacity must be finite and nonnegative")
        if self.fugacity == 0.0 and self.total_charge % 2:
            raise ValueError("odd total charge with zero fugacity: empty ensemble")
        probs = (self.rotate_prob, self.split_prob, self.merge_prob)
        if min(probs) < 0.0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("move probabilities must be nonnegative and sum to 1")
        if (self.split_prob > 0.0) != (self.merge_prob > 0.0):
            raise ValueError("split and merge must be enabled together")
        if self.steps < 1 or self.burn_in < 0 or self.thin < 1:
            raise ValueError("invalid chain schedule")
        if self.burn_in >= self.steps:
            raise ValueError("burn_in must be smaller than steps, else nothing records")
        if self.density_bins < 1 or self.pair_bins < 1 or self.spacing_bins < 1:
            raise ValueError("histogram bin counts must be positive")
        if not self.spacing_max > 0.0:
            raise ValueError("spacing_max must be positive")

    @property
    def sigma_rotate(self) -> float:
        return self.rotate_width if self.rotate_width > 0.0 else TWO_PI / self.total_charge

    @property
    def sigma_split(self) -> float:
        return (
            self.split_width
            if self.split_width > 0.0
            else 0.5 * math.pi / self.total_charge
        )


@dataclass
class Accumulators:
    """Histogram counters filled by the stepping core; exactly mergeable."""

    count_hist: np.ndarray
    density1: np.ndarray
    density2: np.ndarray
    pair11: np.ndarray
    pair22: np.ndarray
    pair12: np.ndarray
    spacing1: np.ndarray
    spacing2: np.ndarray
    spacing_all: np.ndarray
    spacing_overflow: np.ndarray
    degenerate: np.ndarray
    proposed: np.ndarray
    accepted: np.ndarray
    recorded: int = 0

    _ARRAYS = (
        "count_hist",
        "density1",
        "density2",
        "pair11",
        "pair22",
        "pair12",
        "spacing1",
        "spacing2",
        "spacing_all",
        "spacing_overflow",
        "degenerate",
        "proposed",
        "accepted",
    )

    @classmethod
    def empty(cls, config: ChainConfig) -> "Accumulators":
        z = lambda k: np.zeros(k, dtype=np.int64)  # noqa: E731
        return cls(
            count_hist=z(config.total_charge + 1),
            density1=z(config.density_bins),
            density2=z(config.density_bins),
            pair11=z(config.pair_bins),
            pair22=z(config.pair_bins),
            pair12=z(config.pair_bins),
            spacing1=z(config.spacing_bins),
            spacing2=z(config.spacing_bins),
            spacing_all=z(config.spacing_bins),
            spacing_overflow=z(3),
            degenerate=z(3),
            proposed=z(3),
            accepted=z(3),
        )

    def merge(self, other: "Accumulators") -> "Accumulators":
        """Counter-wise sum; integer adds, so merging is exact."""
        kw = {name: getattr(self, name) + getattr(other, name) for name in self._ARRAYS}
        return Accumulators(recorded=self.recorded + other.recorded, **kw)


@dataclass(frozen=True)
class ChainResult:
    """One chain's accumulators plus its final state and diagnostics."""

    config: ChainConfig
    accumulators: Accumulators
    final_config: Configuration
    final_energy: float
    max_energy_drift: float
    backend: str


def initial_configuration(config: ChainConfig) -> Configuration:
    """Deterministic starting state: maximal charge-2 count, equal spacing."""
    n = config.total_charge
    l0 = n % 2
    m0 = (n - l0) // 2
    pooled = np.linspace(-math.pi, math.pi, l0 + m0, endpoint=False)
    return Configuration(tuple(pooled[:l0]), tuple(pooled[l0:]))


def derive_chain_seed(seed: int, index: int) -> int:
    """Decorrelated stream seed for chain `index` under a base seed."""
    return _chain_py.derive_stream(seed, index)


def run_chain(config: ChainConfig) -> ChainResult:
    """Run one chain with the active backend and collect its accumulators."""
    acc = Accumulators.empty(config)
    init = initial_configuration(config)
    out = _core.run_chain(
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
    xi, zeta, e_final, recorded, max_drift = out
    acc.recorded = int(recorded)
    final = Configuration(tuple(xi), tuple(zeta))
    return ChainResult(
        config=config,
        accumulators=acc,
        final_config=final,
        final_energy=float(e_final),
        max_energy_drift=float(max_drift),
        backend=_BACKEND,
    )


def run_chains(config: ChainConfig, chains: int) -> list[ChainResult]:
    """Run independent chains with per-chain derived seeds."""
    if chains < 1:
        raise ValueError("need at least one chain")
    results = []
    for i in range(chains):
        cfg = dataclasses.replace(config, seed=derive_chain_seed(config.seed, i))
        results.append(run_chain(cfg))
    return results


def validate_energy(result: ChainResult, tol: float = 1e-9) -> float:
    """Recompute the final energy from scratch and compare with the cache."""
    ref = energy(result.final_config)
    gap = abs(ref - result.final_energy)
    if gap > tol:
        raise ArithmeticError(
            f"cached chain energy drifted by {gap:.3e} (allowed {tol:.1e})"
        )
    return gap


def split_log_ratio(
    fugacity: float, charge1, charge2, index: int, delta: float, config: ChainConfig
) -> float:
    """Acceptance log-ratio of splitting charge-2 particle `index` by +-delta.

    Recomputed from full configuration energies (not the incremental core
    path) so tests can cross-check the chain's detailed balance.
    """
    zeta = list(charge2)
    phi = zeta.pop(index)
    l, m = len(charge1), len(charge2)
    before = Configuration(tuple(charge1), tuple(charge2))
    after = Configuration(tuple(charge1) + (phi + delta, phi - delta), tuple(zeta))
    de = energy(after) - energy(before)
    sig = config.sigma_split
    log_g = (
        0.5 * math.log(2.0 / math.pi) - math.log(sig) - delta * delta / (2.0 * sig * sig)
    )
    log_x = math.log(fugacity) if fugacity > 0.0 else -math.inf
    return (
        2.0 * log_x
        - de
        + math.log(config.merge_prob / config.split_prob)
        + math.log(4.0 * m / ((l + 2.0) * (l + 1.0)))
        - log_g
    )


def merge_log_ratio(
    fugacity: float, charge1, charge2, first: int, second: int, config: ChainConfig
) -> float:
    """Acceptance log-ratio of merging the charge-1 pair (first, second)."""
    xi = list(charge1)
    a = xi[first]
    b = xi[second]
    d = _wrap(b - a)
    delta = 0.5 * abs(d)
    phi = a + 0.5 * d
    for idx in sorted((first, second), reverse=True):
        xi.pop(idx)
    l, m = len(charge1), len(charge2)
    before = Configuration(tuple(charge1), tuple(charge2))
    after = Configuration(tuple(xi), tuple(charge2) + (phi,))
    de = energy(after) - energy(before)
    sig = config.sigma_split
    log_g = (
        0.5 * math.log(2.0 / math.pi) - math.log(sig) - delta * delta / (2.0 * sig * sig)
    )
    log_x = math.log(fugacity) if fugacity > 0.0 else -math.inf
    return (
        -2.0 * log_x
        - de
        + math.log(config.split_prob / config.merge_prob)
        + log_g
        + math.log(l * (l - 1.0) / (4.0 * (m + 1.0)))
    )


def _wrap(t: float) -> float:
    return t - TWO_PI * math.floor((t + math.pi) / TWO_PI)


def _merge_all(accs) -> Accumulators:
    out = accs[0]
    for a in accs[1:]:
        out = out.merge(a)
    return out


def merge_accumulators(results) -> Accumulators:
    """Pool the accumulators of several ChainResults (or Accumulators)."""
    accs = [r.accumulators if isinstance(r, ChainResult) else r for r in results]
    return _merge_all(accs)


def jackknife(results, statistic):
    """Leave-one-chain-out jackknife of statistic(merged_accumulators).

    Returns (estimate, standard_error); both follow the statistic's shape
    (scalar or per-bin vector).  Needs at least two chains.
    """
    accs = [r.accumulators if isinstance(r, ChainResult) else r for r in results]
    if len(accs) < 2:
        raise ValueError("jackknife needs at least two chains")
    full = statistic(_merge_all(accs))
    loo = []
    for i in range(len(accs)):
        rest = [a for j, a in enumerate(accs) if j != i]
        loo.append(statistic(_merge_all(rest)))
    loo = np.asarray(loo, dtype=np.float64)
    c = len(accs)
    se = np.sqrt((c - 1) / c * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
    return np.asarray(full, dtype=np.float64), se


def estimate_count_mean(results):
    """(mean charge-1 count, jackknife SE)."""

    def stat(acc):
        counts = np.arange(acc.count_hist.size)
        return float((counts * acc.count_hist).sum() / acc.recorded)

    est, se = jackknife(results, stat)
    return float(est), float(se)


def estimate_count_prob(results, count: int):
    """(P(L = count), jackknife SE)."""

    def stat(acc):
        return float(acc.count_hist[count] / acc.recorded)

    est, se = jackknife(results, stat)
    return float(est), float(se)


@dataclass(frozen=True)
class PairIntensityEstimate:
    """Binned two-point intensity estimate with per-bin jackknife errors."""

    species: tuple[int, int]
    centers: np.ndarray
    values: np.ndarray
    errors: np.ndarray


def estimate_pair_intensity(results, species=(1, 1)) -> PairIntensityEstimate:
    """Binned estimate of the two-point intensity R at separations (0, pi].

    Same-species histograms count unordered pairs, cross-species ordered
    (charge1, charge2) pairs once; either way the expected bin count per
    recorded state is R * 2*pi * 2*w for bin width w, assuming R varies
    slowly across the bin.
    """
    key = {(1, 1): "pair11", (2, 2): "pair22", (1, 2): "pair12"}[tuple(species)]
    mult = 2.0 if species[0] == species[1] else 1.0
    sample = results[0].accumulators if isinstance(results[0], ChainResult) else results[0]
    nbins = getattr(sample, key).size
    width = math.pi / nbins
    centers = (np.arange(nbins) + 0.5) * width

    def stat(acc):
        return mult * getattr(acc, key) / (acc.recorded * TWO_PI * 2.0 * width)

    values, errors = jackknife(results, stat)
    return PairIntensityEstimate(tuple(species), centers, values, errors)


def density_chisquare(results, species: int = 1):
    """Chi-square uniformity test of the angular density histogram.

    Returns (statistic, p-value) against the uniform law on the circle.
    """
    acc = merge_accumulators(results)
    hist = acc.density1 if species == 1 else acc.density2
    total = hist.sum()
    if total == 0:
        raise ValueError("empty density histogram")
    stat, p = chisquare(hist)
    return float(stat), float(p)


@dataclass(frozen=True)
class SpacingTable:
    """Scaled nearest-neighbor gap histogram for one particle set."""

    edges: np.ndarray
    counts: np.ndarray
    overflow: int
    degenerate: int


def spacing_table(results, which: str = "all") -> SpacingTable:
    """Gap histogram for "charge1", "charge2", or "all" (pooled)."""
    idx = {"charge1": 0, "charge2": 1, "all": 2}[which]
    name = {"charge1": "spacing1", "charge2": "spacing2", "all": "spacing_all"}[which]
    acc = merge_accumulators(results)
    hist = getattr(acc, name)
    sample = results[0].config if isinstance(results[0], ChainResult) else None
    smax = sample.spacing_max if sample is not None else 4.0
    edges = np.linspace(0.0, smax, hist.size + 1)
    return SpacingTable(
        edges=edges,
        counts=hist.copy(),
        overflow=int(acc.spacing_overflow[idx]),
        degenerate=int(acc.degenerate[idx]),
    )


def acceptance_rates(results) -> dict[str, float]:
    """Accepted/proposed per move type over the pooled chains."""
    acc = merge_accumulators(results)
    names = ("rotate", "split", "merge")
    out = {}
    for i, name in enumerate(names):
        prop = int(acc.proposed[i])
        out[name] = float(acc.accepted[i] / prop) if prop else math.nan
    return out
