"""Pfaffians of antisymmetric matrices and the intensities built from them.

The Pfaffian is computed by Parlett-Reid elimination (skew-symmetric
Gaussian elimination to tridiagonal form) with partial pivoting, O(n^3)
and numerically benign: the Pfaffian is read off the super-diagonal as it
forms, with a sign flip per row/column interchange.

Correlation intensities assemble one 2x2 kernel block per ordered pair of
positions into a 2(l+m)-dimensional antisymmetric matrix and take its
Pfaffian.  With the kernel phase conventions used here the result is real
up to roundoff; a residual imaginary part beyond tolerance raises instead
of being silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelGauge, kernel_block
from .ensemble import wrap_angle


class AntisymmetricMatrix:
    """Validated square matrix with A^T = -A.

    Construction tolerates floating-point asymmetry up to `tol` (relative
    to the largest entry) and stores the exactly antisymmetrized part
    (A - A^T) / 2.  Real input stays real.
    """

    def __init__(self, values, tol: float = 1e-12):
        a = np.asarray(values)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("antisymmetric matrix must be square")
        dtype = np.complex128 if np.iscomplexobj(a) else np.float64
        a = a.astype(dtype, copy=True)
        if a.size:
            scale = 1.0 + float(np.max(np.abs(a)))
            worst = float(np.max(np.abs(a + a.T)))
            if worst > tol * scale:
                raise ValueError(
                    f"matrix is not antisymmetric (defect {worst:.3e}, "
                    f"allowed {tol * scale:.3e})"
                )
        self.values = 0.5 * (a - a.T)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def pfaffian(matrix) -> float | complex:
    """Pfaffian by Parlett-Reid elimination with partial pivoting.

    Accepts an AntisymmetricMatrix or anything array-like (validated on
    the way in).  Conventions: empty matrix -> 1, odd dimension -> 0,
    Pf([[0, a], [-a, 0]]) = a.
    """
    if not isinstance(matrix, AntisymmetricMatrix):
        matrix = AntisymmetricMatrix(matrix)
    a = matrix.values.copy()
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0 if not np.iscomplexobj(a) else 0j
    pf = 1.0 + 0j if np.iscomplexobj(a) else 1.0
    for k in range(0, n - 1, 2):
        # pivot the largest entry of column k below the diagonal into k+1
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0 * pf
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(tau, col)
            a[k + 2 :, k + 2 :] -= np.outer(col, tau)
    return pf


@dataclass(frozen=True)
class CorrelationQuery:
    """Positions at which to evaluate the (l, m) intensity."""

    charge1: tuple[float, ...]
    charge2: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "charge1", tuple(float(t) for t in self.charge1))
        object.__setattr__(self, "charge2", tuple(float(t) for t in self.charge2))

    @property
    def order(self) -> tuple[int, int]:
        return (len(self.charge1), len(self.charge2))


def _prepare_positions(gauge: KernelGauge, query: CorrelationQuery):
    charge1, charge2 = query.charge1, query.charge2
    if gauge.wraps_angles:
        charge1 = tuple(wrap_angle(t) for t in charge1)
        charge2 = tuple(wrap_angle(t) for t in charge2)
    for name, pts in (("charge1", charge1), ("charge2", charge2)):
        if len(set(pts)) != len(pts):
            # the kernel diverges on the within-species diagonal; such a
            # query has no finite intensity
            raise ValueError(f"coincident {name} positions in correlation query")
    return charge1, charge2


def assemble(gauge: KernelGauge, query: CorrelationQuery) -> AntisymmetricMatrix:
    """Stack kernel blocks for all position pairs into one antisymmetric matrix.

    Row/column order: charge-1 positions first, then charge-2, two
    components per position.
    """
    charge1, charge2 = _prepare_positions(gauge, query)
    pts = [(1, t) for t in charge1] + [(2, t) for t in charge2]
    k = len(pts)
    out = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    for i, (si, ti) in enumerate(pts):
        for j, (sj, tj) in enumerate(pts):
            out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = kernel_block(
                gauge, (si, sj), ti, tj
            ).block
    return AntisymmetricMatrix(out, tol=1e-10)


def intensity(gauge: KernelGauge, query: CorrelationQuery) -> float:
    """(l, m)-point correlation intensity: Pfaffian of the assembled matrix.

    The Pfaffian must come out real; an imaginary residue above
    1e-10 * (1 + |Re|) raises ArithmeticError (it would mean the kernel
    phases are inconsistent), otherwise the real part is returned.  The
    empty query has intensity 1 by convention.
    """
    if query.order == (0, 0):
        return 1.0
    pf = pfaffian(assemble(gauge, query))
    pf = complex(pf)
    if abs(pf.imag) > 1e-10 * (1.0 + abs(pf.real)):
        raise ArithmeticError(
            f"intensity Pfaffian has imaginary residue {pf.imag:.3e}"
        )
    return pf.real
