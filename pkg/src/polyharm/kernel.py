"""Parameter validation and evaluation of the product Poisson kernels.

The admissible parameter set per axis is Re(alpha) + Re(beta) > -1 with
neither alpha nor beta a negative integer.  ``validate`` packages the two
vectors together with every derived constant the rest of the library
needs; Params is immutable and cheap to share.

Radii are guarded at 1 - 1e-12: beyond that the powers (1-r^2)^(t+1) and
|1 - z conj(zeta)|^(-t-2) are no longer trustworthy in double precision,
and callers are expected to clamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, RadiusError
from .geometry import PolyPoint, TorusPoint
from .special import gamma

RADIUS_GUARD = 1.0 - 1e-12


def _is_negative_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= -1.0 and z.real == int(z.real)


@dataclass(frozen=True)
class Params:
    """Admissible parameter vectors with derived constants.

    t_j = Re(alpha_j) + Re(beta_j); c_j is the gamma-ratio normalizer of
    axis j; mass_bound is the kernel L1 bound K; weight_product = prod |c_j|;
    majorant_norm = prod Gamma^2(t_j/2 + 1)/Gamma(t_j + 1); decay_base is
    q = 2^(-min(t_j + 1)); width_sum = sum (t_j + 2).
    """

    alpha: tuple[complex, ...]
    beta: tuple[complex, ...]
    t: tuple[float, ...]
    c: tuple[complex, ...]
    mass_bound: float
    weight_product: float
    majorant_norm: float
    decay_base: float
    width_sum: float
    # |(1-w)^-(a+1)| exceeds |1-w|^-(Re a + 1) by up to e^(pi/2 |Im a|), so
    # pointwise domination of |u| by the positive majorant carries this factor
    imag_inflation: float = 1.0

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def min_rate(self) -> float:
        """min_j (t_j + 1), the slowest boundary decay rate."""
        return min(self.t) + 1.0

    def swapped(self) -> "Params":
        """Parameters with alpha and beta exchanged (the adjoint kernel)."""
        return validate(self.beta, self.alpha)

    def axis(self, j: int) -> tuple[complex, complex]:
        return self.alpha[j], self.beta[j]


def validate(alpha: Sequence[complex], beta: Sequence[complex]) -> Params:
    """Check the admissibility conditions and compute derived constants.

    Raises ParameterError naming the violated condition and axis.
    """
    alpha = tuple(complex(a) for a in alpha)
    beta = tuple(complex(b) for b in beta)
    if len(alpha) != len(beta):
        raise ParameterError(-1, "length-mismatch",
                             f"alpha has {len(alpha)} axes, beta has {len(beta)}")
    if not alpha:
        raise ParameterError(-1, "empty", "need at least one axis")
    t, c = [], []
    for j, (a, b) in enumerate(zip(alpha, beta)):
        if _is_negative_integer(a):
            raise ParameterError(j, "negative-integer-alpha",
                                 f"axis {j}: alpha = {a} is a negative integer")
        if _is_negative_integer(b):
            raise ParameterError(j, "negative-integer-beta",
                                 f"axis {j}: beta = {b} is a negative integer")
        tj = a.real + b.real
        if tj <= -1.0:
            raise ParameterError(j, "sum-not-above-minus-one",
                                 f"axis {j}: Re(alpha)+Re(beta) = {tj} <= -1")
        t.append(tj)
        c.append(gamma(a + 1) * gamma(b + 1) / gamma(a + b + 1))
    k_ab = float(np.prod([abs(v) for v in c]))
    k_t = float(np.prod([abs(gamma(tj / 2 + 1)) ** 2 / gamma(tj + 1).real for tj in t]))
    im_sum = sum(abs(a.imag - b.imag) for a, b in zip(alpha, beta))
    mass_bound = math.exp(math.pi / 2 * im_sum) * k_ab / k_t
    decay_base = 2.0 ** (-(min(t) + 1.0))
    width_sum = sum(tj + 2.0 for tj in t)
    inflation = math.exp(math.pi / 2 * sum(abs(a.imag) + abs(b.imag)
                                           for a, b in zip(alpha, beta)))
    return Params(alpha=alpha, beta=beta, t=tuple(t), c=tuple(c),
                  mass_bound=mass_bound, weight_product=k_ab,
                  majorant_norm=k_t, decay_base=decay_base, width_sum=width_sum,
                  imag_inflation=inflation)


def _check_radii(radii) -> None:
    if np.any(np.asarray(radii) > RADIUS_GUARD):
        raise RadiusError(f"radius beyond the guard {RADIUS_GUARD!r}; clamp before calling")


def u_ab(alpha: complex, beta: complex, z: complex) -> complex:
    """One-axis kernel (1-|z|^2)^(a+b+1) / ((1-z)^(a+1) (1-conj z)^(b+1)).

    Principal branches; 1 - z has positive real part on the disc so the
    log cut is never touched.
    """
    z = complex(z)
    _check_radii(abs(z))
    s = 1.0 - abs(z) ** 2
    return s ** (alpha + beta + 1.0) / ((1.0 - z) ** (alpha + 1.0) * (1.0 - z.conjugate()) ** (beta + 1.0))


def v_ab(alpha: complex, beta: complex, c: complex, z: complex) -> complex:
    """Normalized one-axis kernel c * u_ab."""
    return c * u_ab(alpha, beta, z)


def kernel_axis_values(params: Params, j: int, zj: complex, angles: np.ndarray) -> np.ndarray:
    """Vector of c_j * u_ab(alpha_j, beta_j, z_j e^{-i angle}) over boundary angles.

    The workhorse of every tensor quadrature: the product kernel between a
    fixed interior point and a grid factorizes into these per-axis vectors.
    """
    a, b = params.alpha[j], params.beta[j]
    zj = complex(zj)
    _check_radii(abs(zj))
    w = zj * np.exp(-1j * np.asarray(angles, dtype=float))
    s = 1.0 - abs(zj) ** 2
    num = s ** (a + b + 1.0)
    den = np.exp(-(a + 1.0) * np.log(1.0 - w) - (b + 1.0) * np.log(1.0 - np.conj(w)))
    return params.c[j] * num * den


def poisson_kernel(params: Params, z: PolyPoint, zeta: TorusPoint) -> complex:
    """Product kernel P(z, zeta) = prod_j c_j u_ab(alpha_j, beta_j, z_j conj(zeta_j))."""
    zc = z.as_complex()
    zetac = zeta.as_complex()
    out = complex(1.0)
    for j in range(params.n):
        out *= v_ab(params.alpha[j], params.beta[j], params.c[j], zc[j] * np.conj(zetac[j]))
    return out


def poisson_kernel_many(params: Params, z: PolyPoint, zeta_angles: np.ndarray) -> np.ndarray:
    """Kernel values against many boundary points (rows of angle vectors)."""
    zc = z.as_complex()
    zeta_angles = np.atleast_2d(np.asarray(zeta_angles, dtype=float))
    out = np.ones(zeta_angles.shape[0], dtype=complex)
    for j in range(params.n):
        out *= kernel_axis_values(params, j, zc[j], zeta_angles[:, j])
    return out


def positive_majorant(t: Sequence[float], z: PolyPoint, zeta: TorusPoint) -> float:
    """Positive kernel prod (1-r_j^2)^(t_j+1) / |1 - z_j conj(zeta_j)|^(t_j+2)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= -1.0):
        raise ValueError("majorant exponents must exceed -1")
    _check_radii(z.radii)
    zc = z.as_complex()
    zetac = zeta.as_complex()
    r2 = np.abs(zc) ** 2
    dist = np.abs(1.0 - zc * np.conj(zetac))
    return float(np.prod((1.0 - r2) ** (t + 1.0) / dist ** (t + 2.0)))


def majorant_axis(t: float, r: float, theta: float) -> float:
    """One-axis positive kernel (1-r^2)^(t+1) / |1 - r e^{i theta}|^(t+2)."""
    _check_radii(r)
    return float((1.0 - r * r) ** (t + 1.0) / abs(1.0 - r * np.exp(1j * theta)) ** (t + 2.0))


def kernel_axis_mass(params: Params, j: int, r: float, nodes: int = 4096) -> float:
    """Quadrature of |c_j u_ab| over one boundary circle at radius r.

    Uniform rectangle rule; spectrally accurate for the smooth periodic
    integrand, with resolution set by nodes * (1 - r).
    """
    angles = 2.0 * math.pi * np.arange(nodes) / nodes - math.pi
    vals = kernel_axis_values(params, j, complex(r), angles)
    return float(np.sum(np.abs(vals)) / nodes)


def kernel_mass(params: Params, z: PolyPoint, nodes: int = 4096) -> float:
    """Quadrature of |P(z, .)| over the torus.

    Uses the exact factorization |P| = prod_j |c_j u_ab(z_j conj(zeta_j))|:
    the n-fold integral is a product of one-axis masses, so the cost stays
    linear in the number of axes.
    """
    out = 1.0
    for j in range(params.n):
        out *= kernel_axis_mass(params, j, z.radii[j], nodes)
    return out
