"""Brute-force cross-checks sharing no formula paths with the analytic modules.

Everything here works from the defining integrals directly:

  * the Boltzmann factor e^{-E} both as a plain product of chord powers
    and as a confluent Vandermonde determinant modulus (value column per
    unit charge, value + derivative columns per double charge),
  * partition functions by sector-wise integration: tensor quadrature for
    small systems, scrambled Sobol quasi-Monte Carlo with replicate-based
    standard errors for total charge 3 and 4,
  * the total-charge-2 intensities by closed sector integrals,
  * the partition function once more as the Pfaffian of an antidiagonal
    moment matrix.

These are the reference values the fast closed-form and Pfaffian routes
are tested against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import qmc

from .pfaffian import AntisymmetricMatrix, pfaffian

TWO_PI = 2.0 * math.pi


def chord_product_weight(charge1, charge2) -> float:
    """e^{-E} as the direct product of chord lengths to charge-product powers."""
    pts = [(t, 1) for t in charge1] + [(t, 2) for t in charge2]
    w = 1.0
    for i, (ti, qi) in enumerate(pts):
        for tj, qj in pts[i + 1 :]:
            w *= (2.0 * abs(math.sin(0.5 * (ti - tj)))) ** (qi * qj)
    return w


def vandermonde_weight(charge1, charge2) -> float:
    """e^{-E} as |det V| of the confluent Vandermonde matrix.

    Rows are monomial powers 0..N-1; each charge-1 angle contributes the
    column (z^k), each charge-2 angle the pair (z^k, k z^(k-1)).  The
    determinant modulus is the product of |z_i - z_j| over pairs with
    multiplicities, i.e. exactly e^{-E}.
    """
    n = len(charge1) + 2 * len(charge2)
    if n == 0:
        return 1.0
    powers = np.arange(n)
    cols = []
    for t in charge1:
        z = cmath.exp(1j * t)
        cols.append(z**powers)
    for t in charge2:
        z = cmath.exp(1j * t)
        cols.append(z**powers)
        deriv = powers * z ** (powers - 1)
        deriv[0] = 0.0
        cols.append(deriv)
    v = np.stack(cols, axis=1)
    return abs(np.linalg.det(v))


def sgn_factorization_check(theta: float, psi: float) -> tuple[complex, complex]:
    """Both sides of |z - w| = -i (z - w) z^{-1/2} w^{-1/2} sgn(theta - psi).

    z = e^{i theta}, w = e^{i psi}, half-integer powers on the principal
    branch e^{-i angle/2}; valid for angles in [-pi, pi).  Returns
    (lhs, rhs) so the caller can assert closeness.
    """
    z = cmath.exp(1j * theta)
    w = cmath.exp(1j * psi)
    sgn = float((theta > psi) - (theta < psi))
    lhs = complex(abs(z - w))
    rhs = -1j * (z - w) * cmath.exp(-0.5j * theta) * cmath.exp(-0.5j * psi) * sgn
    return lhs, rhs


@dataclass(frozen=True)
class OracleSettings:
    """How hard the brute-force integrator works.

    method: "auto" picks tensor quadrature for total charge <= 2 and
    quasi-Monte Carlo above; override with "quadrature" or "qmc".
    points: Sobol points per replicate (power of two) or quadrature nodes
    per axis.  The standard error comes from the spread of `replicates`
    independently scrambled replicates.
    """

    method: str = "auto"
    points: int = 1 << 20
    replicates: int = 12
    quadrature_nodes: int = 64
    seed: int = 20260814

    def __post_init__(self) -> None:
        if self.method not in ("auto", "quadrature", "qmc"):
            raise ValueError("method must be auto, quadrature, or qmc")
        if self.points < 2 or self.replicates < 2 or self.quadrature_nodes < 2:
            raise ValueError("need at least 2 points, nodes, and replicates")


def _sectors(total_charge: int):
    """(l, m) splits of the total charge, l unit + m double charges."""
    return [(total_charge - 2 * m, m) for m in range(total_charge // 2 + 1)]


def _sector_weight(points: np.ndarray, charges) -> np.ndarray:
    """Boltzmann factor with the first particle pinned at angle 0.

    points has one row per sample and one column per free particle.
    """
    k = len(charges)
    full = np.concatenate([np.zeros((points.shape[0], 1)), points], axis=1)
    w = np.ones(points.shape[0])
    for i in range(k):
        for j in range(i + 1, k):
            c = 2.0 * np.abs(np.sin(0.5 * (full[:, i] - full[:, j])))
            p = charges[i] * charges[j]
            if p == 1:
                w *= c
            elif p == 2:
                w *= c * c
            else:
                c2 = c * c
                w *= c2 * c2
    return w


def _sector_integral_quadrature(charges, nodes: int) -> float:
    """Integral of e^{-E} over the sector, symmetry-reduced.

    Only dimensions 0 and 1 arise for total charge <= 2.  The chord has a
    kink at coincidence, so the 1-d integral is split at 0.
    """
    k = len(charges)
    if k == 1:
        return TWO_PI
    x, w = leggauss(nodes)
    # map [-1, 1] to [0, pi] and use the 2-fold symmetry of the integrand
    t = 0.5 * math.pi * (x + 1.0)
    wt = 0.5 * math.pi * w
    vals = _sector_weight(t[:, None], charges)
    return TWO_PI * 2.0 * float(np.dot(wt, vals))


def _sector_integral_sobol(charges, points: int, seed: int) -> float:
    k = len(charges)
    if k == 1:
        return TWO_PI
    d = k - 1
    sampler = qmc.Sobol(d, scramble=True, seed=seed)
    pts = sampler.random(points) * TWO_PI - math.pi
    vals = _sector_weight(pts, charges)
    return TWO_PI * (TWO_PI**d) * float(vals.mean())


def oracle_partition(
    total_charge: int, fugacity: float, settings: OracleSettings = OracleSettings()
) -> tuple[float, float]:
    """Estimate Z by summing brute-force sector integrals.

    Z = sum over sectors of X^l I_(l,m) / (l! m!), with each I either a
    tensor-quadrature value (standard error taken as the 64-vs-128-node
    difference) or a quasi-Monte Carlo mean over scrambled replicates
    (standard error from the replicate spread).

    Returns (estimate, standard_error).
    """
    if total_charge < 1:
        raise ValueError("total_charge must be positive")
    if fugacity < 0.0:
        raise ValueError("fugacity must be nonnegative")
    method = settings.method
    if method == "auto":
        method = "quadrature" if total_charge <= 2 else "qmc"

    sectors = []
    for l, m in _sectors(total_charge):
        if l > 0 and fugacity == 0.0:
            continue
        coef = (fugacity**l if l else 1.0) / (
            math.factorial(l) * math.factorial(m)
        )
        charges = [1] * l + [2] * m
        sectors.append((coef, charges))

    if method == "quadrature":
        if any(len(ch) > 2 for _, ch in sectors):
            raise ValueError("tensor quadrature only covers total charge <= 2")
        est = math.fsum(
            c * _sector_integral_quadrature(ch, settings.quadrature_nodes)
            for c, ch in sectors
        )
        ref = math.fsum(
            c * _sector_integral_quadrature(ch, 2 * settings.quadrature_nodes)
            for c, ch in sectors
        )
        se = max(abs(est - ref), 1e-13 * abs(ref))
        return ref, se

    reps = []
    for r in range(settings.replicates):
        z_r = math.fsum(
            c
            * _sector_integral_sobol(
                ch, settings.points, seed=settings.seed + 1000 * r + 7 * len(ch)
            )
            for c, ch in sectors
        )
        reps.append(z_r)
    reps = np.asarray(reps)
    est = float(reps.mean())
    se = float(reps.std(ddof=1) / math.sqrt(len(reps)))
    return est, se


def oracle_intensity(fugacity: float, charge1=(), charge2=()) -> float:
    """Exact total-charge-2 intensities by direct sector integration.

    With Z_2 = 2 pi (1 + 4 X^2):
      one charge-1:        8 X^2 / Z_2  (uniform),
      one charge-2:        1 / Z_2      (uniform),
      two charge-1:        2 X^2 |sin(D/2)| / Z_2,
      mixed or two charge-2: 0 (no such sector at total charge 2).
    """
    x = fugacity
    z2 = TWO_PI * (1.0 + 4.0 * x * x)
    lm = (len(charge1), len(charge2))
    if lm == (1, 0):
        return 8.0 * x * x / z2
    if lm == (0, 1):
        return 1.0 / z2
    if lm == (2, 0):
        d = charge1[0] - charge1[1]
        return 2.0 * x * x * abs(math.sin(0.5 * d)) / z2
    if lm in ((1, 1), (0, 2)):
        return 0.0
    raise ValueError("closed-form intensities are available at total charge 2 only")


def moment_matrix_partition(total_charge: int, fugacity: float) -> float:
    """Z for even total charge as the Pfaffian of an antidiagonal matrix.

    Upper-triangle entries a[m, N+1-m] (1-based, m <= N/2) are
    8 pi X^2 / c + 2 pi c with c = N - 2m + 1; the lower triangle is the
    negative transpose.  The Pfaffian of this matrix equals the partition
    function, which the closed-form product route must reproduce.
    """
    n = total_charge
    if n < 2 or n % 2:
        raise ValueError("moment matrix needs even total charge >= 2")
    a = np.zeros((n, n))
    for i in range(n // 2):
        c = n - 2 * i - 1
        v = 8.0 * math.pi * fugacity * fugacity / c + TWO_PI * c
        a[i, n - 1 - i] = v
        a[n - 1 - i, i] = -v
    return float(pfaffian(AntisymmetricMatrix(a)))
