"""Central-difference application of the per-axis degenerate operators.

The operator acting in the j-th complex variable z = x + iy is

    L u = (1 - |z|^2) u_{z zbar} + alpha z u_z + beta zbar u_zbar - alpha beta u

with u_{z zbar} = Laplacian/4, u_z = (u_x - i u_y)/2, u_zbar = (u_x + i u_y)/2.
Stencils are second-order central differences; the residual of a function
annihilated by the operator decays like h^2.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

Sampler = Callable[[np.ndarray], complex]


def apply_axis_operator(func: Sampler, alpha: complex, beta: complex,
                        z: Sequence[complex], axis: int, h: float = 1e-3) -> complex:
    """Apply the axis operator to func at z using central differences."""
    z = np.asarray(z, dtype=complex)
    e = np.zeros_like(z)
    e[axis] = 1.0
    f0 = func(z)
    fxp = func(z + h * e)
    fxm = func(z - h * e)
    fyp = func(z + 1j * h * e)
    fym = func(z - 1j * h * e)
    ux = (fxp - fxm) / (2.0 * h)
    uy = (fyp - fym) / (2.0 * h)
    lap = (fxp + fxm + fyp + fym - 4.0 * f0) / (h * h)
    uz = 0.5 * (ux - 1j * uy)
    uzbar = 0.5 * (ux + 1j * uy)
    zj = z[axis]
    return ((1.0 - abs(zj) ** 2) * lap / 4.0
            + alpha * zj * uz + beta * np.conj(zj) * uzbar - alpha * beta * f0)


def residual(func: Sampler, alpha: Sequence[complex], beta: Sequence[complex],
             z: Sequence[complex], h: float = 1e-3) -> float:
    """Max over axes of |L_j func| at z."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    return max(abs(apply_axis_operator(func, alpha[j], beta[j], z, j, h))
               for j in range(len(alpha)))


def convergence_order(func: Sampler, alpha: Sequence[complex], beta: Sequence[complex],
                      z: Sequence[complex], h: float = 1e-3) -> tuple[float, float, float]:
    """Residuals at h and h/2 plus the measured order log2(res_h / res_{h/2}).

    Meaningful only while the coarse residual sits above the double-precision
    cancellation floor (~1e-16 / h^2 in function units).
    """
    r1 = residual(func, alpha, beta, z, h)
    r2 = residual(func, alpha, beta, z, h / 2.0)
    if r2 == 0.0:
        return r1, r2, float("inf")
    return r1, r2, float(np.log2(r1 / r2))
