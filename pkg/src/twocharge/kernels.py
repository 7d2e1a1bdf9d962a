"""Matrix kernels whose Pfaffians give the correlation intensities.

Correlations of the two-charge circle gas are Pfaffians of an
antisymmetric matrix stitched together from 2x2 blocks, one block per
pair of particle positions, indexed by the species pair (s, t) with
s, t in {1, 2}.  Each block

    K^{s,t}(a, b) = [[ DS^{s,t}(a, b),  S^{s,t}(a, b) ],
                     [ -S^{t,s}(b, a),  IS^{s,t}(a, b) ]]

carries three independent scalar entries, tagged by their role: S is the
scalar kernel, DS its derivative-type partner, IS its integral-type
partner.  S entries are real; DS and IS are purely imaginary, which is
what makes the assembled Pfaffians real.

Five gauges are exposed:

  raw       finite-N entries (even N, positive fugacity X),
  rescaled  a determinant-1 diagonal rescaling of raw at rate r = X/N
            (same Pfaffians, entries closer in size to their limits),
  scaled    the bulk scaling limit at unit density: separations measured
            in mean spacings 2 pi / N, fugacity X = N r, entries given by
            integrals over [0, 1] evaluated with a fixed 64-point
            Gauss-Legendre rule,
  coe       the r -> infinity endpoint (orthogonal symmetry class),
  cse       the r -> 0+ endpoint (symplectic symmetry class).

Finite-N entries are evaluated on the principal angle branch [-pi, pi);
they are antiperiodic, so inputs are wrapped before use.  The scaled and
endpoint kernels live on the real separation line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sici

from .ensemble import wrap_angle

TWO_PI = 2.0 * math.pi

KINDS = ("S", "DS", "IS")
SPECIES_PAIRS = ((1, 1), (2, 2), (1, 2), (2, 1))
GAUGES = ("raw", "rescaled", "scaled", "coe", "cse")

# 64-point Gauss-Legendre on [0, 1].  Accurate for the kernel integrands
# while the integrand poles at t = +-2ir stay clear of the interval;
# below r ~ 1e-3 the rule (fixed by contract) starts to lose digits.
_GL_X, _GL_W = leggauss(64)
_GL_T = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _sgn(v: float) -> float:
    v = float(v)
    return float((v > 0.0) - (v < 0.0))


def _check_species_kind(species, kind) -> None:
    if tuple(species) not in SPECIES_PAIRS:
        raise ValueError(f"species pair must be one of {SPECIES_PAIRS}")
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")


@dataclass(frozen=True)
class KernelQuery:
    """One finite-N entry request: even N, fugacity X > 0, two angles."""

    total_charge: int
    fugacity: float
    species: tuple[int, int]
    kind: str
    theta: float
    psi: float

    def __post_init__(self) -> None:
        _check_species_kind(self.species, self.kind)
        if self.total_charge < 2 or self.total_charge % 2:
            raise ValueError("finite-size kernels require even total charge >= 2")
        if not (math.isfinite(self.fugacity) and self.fugacity > 0.0):
            raise ValueError("finite-size kernels require positive finite fugacity")


@dataclass(frozen=True)
class ScaledKernelQuery:
    """One scaling-limit entry request at interpolation rate r > 0."""

    rate: float
    species: tuple[int, int]
    kind: str
    theta: float
    psi: float

    def __post_init__(self) -> None:
        _check_species_kind(self.species, self.kind)
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise ValueError("rate must be positive and finite")


def finite_entry(query: KernelQuery) -> complex:
    """Raw finite-N kernel entry.

    All entries are partial-fraction sums over the odd frequencies
    c = 1, 3, ..., N-1 with denominators (2X)^2 + c^2 and half-angle
    arguments c * (theta - psi) / 2, accumulated with math.fsum.  The IS
    entry of the (1,1) block carries the discontinuous -i*sgn(psi - theta)
    term that encodes the integrated sine kernel's jump.
    """
    n, x = query.total_charge, query.fugacity
    theta = wrap_angle(query.theta)
    psi = wrap_angle(query.psi)
    delta = theta - psi
    c = np.arange(1.0, n, 2.0)
    den = 4.0 * x * x + c * c
    ang = 0.5 * delta * c
    s, t = query.species
    kind = query.kind
    if (s, t) == (2, 1) and kind != "S":
        # off-corner entries of the (2,1) block equal the (1,2) ones as
        # functions of theta - psi (both are odd in the separation)
        s, t = 1, 2
    if kind == "S":
        if (s, t) == (1, 1):
            return complex((4.0 * x * x / math.pi) * math.fsum(np.cos(ang) / den))
        if (s, t) == (2, 2):
            return complex((0.5 / math.pi) * math.fsum(c * c * np.cos(ang) / den))
        if (s, t) == (1, 2):
            return complex((0.5 * x / math.pi) * math.fsum(c * c * np.cos(ang) / den))
        return complex((4.0 * x / math.pi) * math.fsum(np.cos(ang) / den))
    if kind == "DS":
        base = math.fsum(c * np.sin(ang) / den)
        coef = {(1, 1): x * x, (2, 2): 1.0, (1, 2): x}[(s, t)]
        return 1j * (coef / math.pi) * base
    if (s, t) == (1, 1):
        main = (16.0 * x * x / math.pi) * math.fsum(np.sin(ang) / (c * den))
        return -1j * (main + _sgn(psi - theta))
    if (s, t) == (2, 2):
        return (-0.25j / math.pi) * math.fsum(c**3 * np.sin(ang) / den)
    return -2j * (x / math.pi) * math.fsum(c * np.sin(ang) / den)


# The rescaled gauge multiplies each entry by (X/r)^e with e from this
# table.  It is the congruence by diag(sqrt(r/X), sqrt(X/r)) on charge-1
# blocks and diag(sqrt(X/r), sqrt(r/X)) on charge-2 blocks: determinant
# one per block, so Pfaffian intensities are unchanged.
_RESCALE_EXP = {
    ((1, 1), "S"): 0,
    ((1, 1), "DS"): -1,
    ((1, 1), "IS"): 1,
    ((2, 2), "S"): 0,
    ((2, 2), "DS"): 1,
    ((2, 2), "IS"): -1,
    ((1, 2), "S"): -1,
    ((1, 2), "DS"): 0,
    ((1, 2), "IS"): 0,
    ((2, 1), "S"): 1,
    ((2, 1), "DS"): 0,
    ((2, 1), "IS"): 0,
}


def rescaled_entry(query: KernelQuery, rate: float) -> complex:
    """Finite-N entry in the determinant-1 rescaled gauge at rate r.

    The congruence scales the derivative component of charge-1 rows by
    sqrt(r/X) and of charge-2 rows by sqrt(X/r) (inverses on the integral
    components), leaving every Pfaffian built from the kernel unchanged
    while keeping entries O(1) as N grows with X = N r.
    """
    if not (math.isfinite(rate) and rate > 0.0):
        raise ValueError("rate must be positive and finite")
    e = _RESCALE_EXP[(tuple(query.species), query.kind)]
    return finite_entry(query) * (query.fugacity / rate) ** e


def _quad(values: np.ndarray) -> float:
    return float(np.dot(_GL_W, values))


def scaled_entry(query: ScaledKernelQuery) -> complex:
    """Bulk scaling-limit entry; separations are in mean spacings.

    Each entry is an integral over t in [0, 1] with denominator
    4r^2 + t^2, evaluated by the fixed Gauss-Legendre rule.  The removable
    t = 0 singularity of the (1,1) IS integrand is handled through sinc.
    """
    r = query.rate
    delta = query.theta - query.psi
    t = _GL_T
    den = 4.0 * r * r + t * t
    s, sp = query.species
    kind = query.kind
    if (s, sp) == (2, 1) and kind != "S":
        s, sp = 1, 2
    if kind == "S":
        if (s, sp) == (1, 1):
            return complex(4.0 * r * r * _quad(np.cos(math.pi * delta * t) / den))
        if (s, sp) == (2, 2):
            return complex(0.5 * _quad(t * t * np.cos(math.pi * delta * t) / den))
        if (s, sp) == (1, 2):
            return complex(0.5 * r * _quad(t * t * np.cos(math.pi * delta * t) / den))
        return complex(4.0 * r * _quad(np.cos(math.pi * delta * t) / den))
    if kind == "DS":
        base = _quad(t * np.sin(math.pi * delta * t) / den)
        coef = {(1, 1): r * r, (2, 2): 1.0, (1, 2): r}[(s, sp)]
        return 1j * coef * base
    if (s, sp) == (1, 1):
        # sin(pi delta t) / t = pi * delta * sinc(delta t)
        main = 16.0 * r * r * _quad(math.pi * delta * np.sinc(delta * t) / den)
        return -1j * (main + TWO_PI * _sgn(query.psi - query.theta))
    if (s, sp) == (2, 2):
        return -0.25j * _quad(t**3 * np.sin(math.pi * delta * t) / den)
    return -2j * r * _quad(t * np.sin(math.pi * delta * t) / den)


def _sine_kernel_slope_bracket(d: float) -> float:
    """sin(pi d)/(pi d)^2 - cos(pi d)/(pi d), the integral of t*sin(pi d t).

    Series fallback near d = 0 where the two terms cancel to O(d).
    """
    a = math.pi * d
    if abs(a) < 1e-4:
        return a / 3.0 - a**3 / 30.0
    return math.sin(a) / (a * a) - math.cos(a) / a


def coe_entry(species, kind: str, theta: float, psi: float) -> complex:
    """r -> infinity endpoint: only the charge-1 block survives.

    S is the sine kernel sin(pi d)/(pi d); DS and IS are its derivative
    and integral partners from the orthogonal symmetry class.
    """
    _check_species_kind(species, kind)
    d = theta - psi
    if tuple(species) != (1, 1):
        return 0j
    if kind == "S":
        return complex(np.sinc(d))
    if kind == "DS":
        return 0.25j * _sine_kernel_slope_bracket(d)
    si = float(sici(math.pi * d)[0])
    return -1j * (4.0 * si + TWO_PI * _sgn(-d))


def cse_entry(species, kind: str, theta: float, psi: float) -> complex:
    """r -> 0+ endpoint: the charge-2 block of the symplectic class.

    The (1,1) IS entry keeps a rank-one sign term in the limit; it never
    contributes to a Pfaffian intensity (any nonzero intensity with a
    charge-1 argument vanishes as r -> 0), but it is reported for
    completeness.
    """
    _check_species_kind(species, kind)
    d = theta - psi
    if tuple(species) == (2, 2):
        if kind == "S":
            return complex(0.5 * np.sinc(d))
        if kind == "DS":
            return 1j * float(sici(math.pi * d)[0])
        return -0.25j * _sine_kernel_slope_bracket(d)
    if tuple(species) == (1, 1) and kind == "IS":
        return -1j * TWO_PI * _sgn(-d)
    return 0j


@dataclass(frozen=True)
class KernelGauge:
    """Evaluation context: which gauge, plus whichever parameters it needs."""

    name: str
    total_charge: int | None = None
    fugacity: float | None = None
    rate: float | None = None

    def __post_init__(self) -> None:
        if self.name not in GAUGES:
            raise ValueError(f"gauge must be one of {GAUGES}")
        if self.name in ("raw", "rescaled"):
            if self.total_charge is None or self.fugacity is None:
                raise ValueError(f"{self.name} gauge needs total_charge and fugacity")
            if self.total_charge < 2 or self.total_charge % 2:
                raise ValueError("total charge must be even and >= 2")
            if not (math.isfinite(self.fugacity) and self.fugacity > 0.0):
                raise ValueError("fugacity must be positive and finite")
        if self.name in ("rescaled", "scaled"):
            if self.rate is None:
                raise ValueError(f"{self.name} gauge needs a rate")
            if not (math.isfinite(self.rate) and self.rate > 0.0):
                raise ValueError("rate must be positive and finite")

    @classmethod
    def raw(cls, total_charge: int, fugacity: float) -> "KernelGauge":
        return cls("raw", total_charge=total_charge, fugacity=fugacity)

    @classmethod
    def rescaled(cls, total_charge: int, fugacity: float, rate: float) -> "KernelGauge":
        return cls("rescaled", total_charge=total_charge, fugacity=fugacity, rate=rate)

    @classmethod
    def scaled(cls, rate: float) -> "KernelGauge":
        return cls("scaled", rate=rate)

    @classmethod
    def coe(cls) -> "KernelGauge":
        return cls("coe")

    @classmethod
    def cse(cls) -> "KernelGauge":
        return cls("cse")

    @property
    def wraps_angles(self) -> bool:
        return self.name in ("raw", "rescaled")


def entry(gauge: KernelGauge, species, kind: str, theta: float, psi: float) -> complex:
    """Evaluate one entry in the given gauge."""
    if gauge.name == "raw":
        return finite_entry(
            KernelQuery(gauge.total_charge, gauge.fugacity, tuple(species), kind, theta, psi)
        )
    if gauge.name == "rescaled":
        return rescaled_entry(
            KernelQuery(gauge.total_charge, gauge.fugacity, tuple(species), kind, theta, psi),
            gauge.rate,
        )
    if gauge.name == "scaled":
        return scaled_entry(
            ScaledKernelQuery(gauge.rate, tuple(species), kind, theta, psi)
        )
    if gauge.name == "coe":
        return coe_entry(species, kind, theta, psi)
    return cse_entry(species, kind, theta, psi)


@dataclass(frozen=True, eq=False)
class MatrixKernelValue:
    """One evaluated 2x2 block [[DS, S], [-S~, IS]]."""

    species: tuple[int, int]
    theta: float
    psi: float
    block: np.ndarray

    def __post_init__(self) -> None:
        if self.block.shape != (2, 2):
            raise ValueError("kernel block must be 2x2")


def kernel_block(
    gauge: KernelGauge, species, theta: float, psi: float
) -> MatrixKernelValue:
    """Assemble the 2x2 block for one ordered pair of positions."""
    s, t = tuple(species)
    ds = entry(gauge, (s, t), "DS", theta, psi)
    sv = entry(gauge, (s, t), "S", theta, psi)
    s_swap = entry(gauge, (t, s), "S", psi, theta)
    iv = entry(gauge, (s, t), "IS", theta, psi)
    block = np.array([[ds, sv], [-s_swap, iv]], dtype=np.complex128)
    return MatrixKernelValue((s, t), theta, psi, block)
