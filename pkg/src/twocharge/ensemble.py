"""Exact laws of a two-species Coulomb gas on the unit circle.

The gas mixes L unit charges with M double charges under the constraint
L + 2M = N.  A configuration has log-gas energy

    E = -sum_{pairs} q_i q_j log(2 |sin((t_i - t_j) / 2)|),

with q = 1 or 2, and grand-canonical weight X^L e^{-E} / (L! M!) against
the product of uniform (Lebesgue) angle measures.  Everything here is
closed form: the normalization is a product over the odd (even N) or even
(odd N) integers below N, and the charge-1 count L equals the parity of N
plus twice a Poisson-binomial variable.  That makes moments, generating
functions, and exact sampling cheap at any N, which is what the
verification suite leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
_LOG2 = math.log(2.0)


def wrap_angle(theta: float) -> float:
    """Map an angle to the principal branch [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class EnsembleParams:
    """Total charge N >= 1 and fugacity X >= 0 of the grand-canonical gas."""

    total_charge: int
    fugacity: float

    def __post_init__(self) -> None:
        if not isinstance(self.total_charge, int) or self.total_charge < 1:
            raise ValueError("total_charge must be a positive integer")
        if not math.isfinite(self.fugacity) or self.fugacity < 0.0:
            raise ValueError("fugacity must be finite and nonnegative")

    @property
    def parity(self) -> int:
        return self.total_charge % 2


@dataclass(frozen=True)
class Configuration:
    """Particle angles by species, wrapped to [-pi, pi) on construction."""

    charge1: tuple[float, ...]
    charge2: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "charge1", tuple(wrap_angle(float(t)) for t in self.charge1)
        )
        object.__setattr__(
            self, "charge2", tuple(wrap_angle(float(t)) for t in self.charge2)
        )

    @property
    def total_charge(self) -> int:
        return len(self.charge1) + 2 * len(self.charge2)


def _log_chord(d: float) -> float:
    """log of the chord length 2|sin(d/2)|; -inf at coincidence."""
    s = abs(math.sin(0.5 * d))
    if s == 0.0:
        return -math.inf
    return math.log(2.0 * s)


def energy(config: Configuration) -> float:
    """Log-gas energy of a configuration; +inf when two particles coincide.

    Charge products weight the pair terms: 1 within charge-1 pairs, 4
    within charge-2 pairs, 2 across species.
    """
    pts = [(t, 1) for t in config.charge1] + [(t, 2) for t in config.charge2]
    terms = []
    for i, (ti, qi) in enumerate(pts):
        for tj, qj in pts[i + 1 :]:
            lc = _log_chord(ti - tj)
            if lc == -math.inf:
                return math.inf
            terms.append(qi * qj * lc)
    return -math.fsum(terms)


def log_weight(params: EnsembleParams, config: Configuration) -> float:
    """log of X^L e^{-E} / (L! M!); -inf where the weight vanishes."""
    if config.total_charge != params.total_charge:
        raise ValueError(
            "configuration carries total charge "
            f"{config.total_charge}, parameters say {params.total_charge}"
        )
    e = energy(config)
    if e == math.inf:
        return -math.inf
    l, m = len(config.charge1), len(config.charge2)
    out = -e - math.lgamma(l + 1) - math.lgamma(m + 1)
    if l > 0:
        if params.fugacity == 0.0:
            return -math.inf
        out += l * math.log(params.fugacity)
    return out


def weight(params: EnsembleParams, config: Configuration) -> float:
    lw = log_weight(params, config)
    return math.exp(lw) if lw > -math.inf else 0.0


def log_partition(params: EnsembleParams) -> float:
    """log Z for total charge N and fugacity X, evaluated stably.

    Z = (2 pi)^ceil(N/2) * X^(N mod 2) * prod_c ((2X)^2 + c^2) / c, the
    product running over c = N-1, N-3, ..., down to 1 or 2.  Odd N with
    X = 0 has no admissible configuration, so Z = 0 and log Z = -inf.
    """
    n, x = params.total_charge, params.fugacity
    acc = [((n + 1) // 2) * math.log(TWO_PI)]
    if n % 2:
        if x == 0.0:
            return -math.inf
        acc.append(math.log(x))
    for c in range(n - 1, 0, -2):
        acc.append(math.log(4.0 * x * x + c * c) - math.log(c))
    return math.fsum(acc)


def partition(params: EnsembleParams) -> float:
    """Z itself; inf when it overflows the double range."""
    lz = log_partition(params)
    if lz == -math.inf:
        return 0.0
    try:
        return math.exp(lz)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class CountDistribution:
    """Exact law of the charge-1 count: L = parity + 2 * PoissonBinomial(q).

    success_probs holds q_k = 4X^2 / (4X^2 + c_k^2) in increasing order
    (c_k = N-1, N-3, ... descending), one per factor of the partition
    product.
    """

    total_charge: int
    fugacity: float
    success_probs: tuple[float, ...]

    @property
    def parity(self) -> int:
        return self.total_charge % 2

    def mean(self) -> float:
        return self.parity + 2.0 * math.fsum(self.success_probs)

    def variance(self) -> float:
        return 4.0 * math.fsum(q * (1.0 - q) for q in self.success_probs)

    def pgf(self, t: float) -> float:
        """E[t^L] as the plain product; see count_pgf for the log-space form."""
        out = 1.0
        for q in self.success_probs:
            out *= 1.0 - q + q * t * t
        return out * t if self.parity else out

    def support(self) -> np.ndarray:
        return self.parity + 2 * np.arange(len(self.success_probs) + 1)

    def pmf(self) -> np.ndarray:
        """P(L = parity + 2j) for j = 0..len(q), by direct convolution."""
        p = np.array([1.0])
        for q in self.success_probs:
            nxt = np.zeros(p.size + 1)
            nxt[:-1] += p * (1.0 - q)
            nxt[1:] += p * q
            p = nxt
        return p

    def sample(self, size: int, rng=None) -> np.ndarray:
        """Draw exact counts; rng is a numpy Generator or a seed."""
        rng = np.random.default_rng(rng)
        q = np.asarray(self.success_probs, dtype=np.float64)
        out = np.empty(int(size), dtype=np.int64)
        if q.size == 0:
            out[:] = 0
        else:
            # chunk so the uniform block stays modest at large N
            chunk = max(1, (1 << 24) // q.size)
            done = 0
            while done < out.size:
                k = min(chunk, out.size - done)
                u = rng.random((k, q.size))
                out[done : done + k] = (u < q).sum(axis=1)
                done += k
        return self.parity + 2 * out


def count_distribution(params: EnsembleParams) -> CountDistribution:
    n, x = params.total_charge, params.fugacity
    if n % 2 and x == 0.0:
        raise ValueError("odd total charge with zero fugacity: empty ensemble")
    d = 4.0 * x * x
    qs = tuple(d / (d + c * c) for c in range(n - 1, 0, -2))
    return CountDistribution(n, x, qs)


def mean_count(params: EnsembleParams) -> float:
    return count_distribution(params).mean()


def var_count(params: EnsembleParams) -> float:
    return count_distribution(params).variance()


def count_pgf(params: EnsembleParams, t: float) -> float:
    """E[t^L] via the log-space closed form, stable for N in the thousands.

    Each factor is (4X^2 t^2 + c^2) / (4X^2 + c^2), accumulated as
    log1p(4X^2 (t^2 - 1) / (4X^2 + c^2)).
    """
    n, x = params.total_charge, params.fugacity
    if n % 2 and x == 0.0:
        raise ValueError("odd total charge with zero fugacity: empty ensemble")
    d = 4.0 * x * x
    acc = [math.log1p(d * (t * t - 1.0) / (d + c * c)) for c in range(n - 1, 0, -2)]
    val = math.exp(math.fsum(acc))
    return val * t if n % 2 else val


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - _LOG2


def _log_abs_sinh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(-math.exp(-2.0 * ax)) - _LOG2


def limiting_pgf(parity: int, fugacity: float, t: float) -> float:
    """Large-N limit of E[t^L] at fixed fugacity.

    cosh(pi X t) / cosh(pi X) for even N, the sinh ratio for odd N;
    evaluated through log-cosh/log-sinh so large X cannot overflow.
    """
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    a = math.pi * fugacity * t
    b = math.pi * fugacity
    if parity == 0:
        return math.exp(_log_cosh(a) - _log_cosh(b))
    if fugacity == 0.0:
        raise ValueError("odd parity with zero fugacity: empty ensemble")
    if a == 0.0:
        return 0.0
    return math.copysign(math.exp(_log_abs_sinh(a) - _log_abs_sinh(b)), a)


def limiting_mean_fraction(rate: float) -> float:
    """Large-N limit of E[L]/N at fugacity X = N * rate."""
    if not rate > 0.0:
        raise ValueError("rate must be positive")
    return 2.0 * rate * math.atan(0.5 / rate)


def limiting_var_fraction(rate: float) -> float:
    """Large-N limit of Var[L]/N at fugacity X = N * rate."""
    if not rate > 0.0:
        raise ValueError("rate must be positive")
    return 2.0 * rate * math.atan(0.5 / rate) - 4.0 * rate * rate / (
        1.0 + 4.0 * rate * rate
    )


def sample_counts(params: EnsembleParams, size: int, rng=None) -> np.ndarray:
    """Exact charge-1 count samples (no Markov chain involved)."""
    return count_distribution(params).sample(size, rng)


def standardize_counts(counts, total_charge: int, rate: float) -> np.ndarray:
    """Center/scale counts by the limiting mean and standard deviation.

    Uses mu = N * limiting_mean_fraction(rate) and
    sigma = sqrt(N * limiting_var_fraction(rate)), the normalization under
    which the count satisfies a central limit theorem.
    """
    mu = total_charge * limiting_mean_fraction(rate)
    sigma = math.sqrt(total_charge * limiting_var_fraction(rate))
    return (np.asarray(counts, dtype=np.float64) - mu) / sigma
