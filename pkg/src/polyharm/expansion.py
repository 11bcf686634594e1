"""Series building blocks: pure indices, radial profiles and expansions.

A pure index pair (p, q) has p_j q_j = 0 on every axis and corresponds to
the integer mode m = p - q.  The elementary solutions are

    profile(p, q; |z_1|^2, ..., |z_n|^2) * z^p * conj(z)^q

where the per-axis radial profile is the Gauss function
F(p - beta_j, q - alpha_j; p + q + 1; s) evaluated at s = |z_j|^2.
Coefficients of a boundary-data expansion are plain tensor Fourier
coefficients divided by the profile values at the corner point 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import AliasingWarning
from .geometry import PolyPoint
from .kernel import Params
from .special import hyp2f1, hyp2f1_at_one_cached

ALIAS_TOL = 1e-10


@dataclass(frozen=True)
class PureIndex:
    """Non-negative index vectors p, q with p_j q_j = 0 on every axis."""

    p: tuple[int, ...]
    q: tuple[int, ...]

    def __init__(self, p: Sequence[int], q: Sequence[int]):
        p = tuple(int(v) for v in p)
        q = tuple(int(v) for v in q)
        if len(p) != len(q):
            raise ValueError("p and q must have equal length")
        if any(v < 0 for v in p + q):
            raise ValueError("pure index entries must be non-negative")
        if any(a * b != 0 for a, b in zip(p, q)):
            raise ValueError(f"index ({p}, {q}) is not pure: some p_j q_j != 0")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_mode(cls, m: Sequence[int]) -> "PureIndex":
        m = np.asarray(m, dtype=int)
        return cls(np.maximum(m, 0), np.maximum(-m, 0))

    @property
    def mode(self) -> tuple[int, ...]:
        return tuple(a - b for a, b in zip(self.p, self.q))

    @property
    def order(self) -> int:
        return sum(self.p) + sum(self.q)

    @property
    def n(self) -> int:
        return len(self.p)


def radial_profile(alpha: complex, beta: complex, p: int, q: int, s: float,
                   max_terms: int | None = None) -> complex:
    """One-axis profile F(p - beta, q - alpha; p + q + 1; s), s in [0, 1]."""
    if p * q != 0:
        raise ValueError("profile indices must be pure: p q = 0")
    kwargs = {} if max_terms is None else {"max_terms": max_terms}
    return hyp2f1(p - beta, q - alpha, p + q + 1, s, **kwargs)


@lru_cache(maxsize=65536)
def profile_at_one(alpha: complex, beta: complex, p: int, q: int) -> complex:
    """Profile value at s = 1 via the closed gamma-ratio form."""
    if p * q != 0:
        raise ValueError("profile indices must be pure: p q = 0")
    return hyp2f1_at_one_cached(p - beta, q - alpha, p + q + 1)


def profile_product(params: Params, index: PureIndex, radii: Sequence[float]) -> complex:
    """Product over axes of the radial profiles at s_j = r_j^2."""
    out = complex(1.0)
    for j in range(params.n):
        out *= radial_profile(params.alpha[j], params.beta[j],
                              index.p[j], index.q[j], float(radii[j]) ** 2)
    return out


def profile_product_at_one(params: Params, index: PureIndex) -> complex:
    out = complex(1.0)
    for j in range(params.n):
        out *= profile_at_one(params.alpha[j], params.beta[j], index.p[j], index.q[j])
    return out


def axis_multiplier(alpha: complex, beta: complex, m: int, r: float) -> complex:
    """Dilation multiplier of the integer mode m on one axis at radius r.

    r^{|m|} F(m^+ - beta, m^- - alpha; |m|+1; r^2) / (same at 1): the factor
    by which the boundary mode e^{i m theta} is damped at radius r.
    """
    p, q = max(m, 0), max(-m, 0)
    if r == 0.0:
        return complex(1.0) if m == 0 else complex(0.0)
    num = radial_profile(alpha, beta, p, q, r * r, max_terms=400_000)
    return r ** abs(m) * num / profile_at_one(alpha, beta, p, q)


def mode_multipliers(params: Params, j: int, modes: np.ndarray, r: float) -> np.ndarray:
    """axis_multiplier over an array of modes (used by spectral dilation)."""
    return np.array([axis_multiplier(params.alpha[j], params.beta[j], int(m), r)
                     for m in modes], dtype=complex)


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Finitely supported coefficient map over pure indices.

    ``dropped_mass`` is the summed magnitude of boundary Fourier mass above
    the stored order; times the kernel mass bound it bounds any dropped
    synthesis term.
    """

    max_order: int
    table: dict[PureIndex, complex] = field(default_factory=dict)
    dropped_mass: float = 0.0

    def items_ordered(self):
        """Deterministic order: total order ascending, then lexicographic."""
        return sorted(self.table.items(), key=lambda kv: (kv[0].order, kv[0].p, kv[0].q))

    def to_json_obj(self) -> list[dict]:
        return [{"p": list(k.p), "q": list(k.q), "re": v.real, "im": v.imag}
                for k, v in self.items_ordered()]

    @classmethod
    def from_json_obj(cls, obj: list[dict], max_order: int | None = None) -> "ExpansionCoeffs":
        table = {PureIndex(d["p"], d["q"]): complex(d["re"], d["im"]) for d in obj}
        order = max((k.order for k in table), default=0)
        return cls(max_order=max_order if max_order is not None else order, table=table)


def _mode_grids(sizes: Sequence[int]) -> list[np.ndarray]:
    return [np.fft.fftfreq(nk, 1.0 / nk).astype(int) for nk in sizes]


def grid_fourier(values: np.ndarray) -> np.ndarray:
    """Tensor Fourier coefficients of samples on the centered angle grid.

    Grid angles start at -pi, so the raw FFT picks up a (-1)^{sum m_j}
    phase that is undone here.  Output is indexed in numpy fft order.
    """
    sizes = values.shape
    coeffs = np.fft.fftn(values) / math.prod(sizes)
    modes = _mode_grids(sizes)
    for ax, m in enumerate(modes):
        shape = [1] * len(sizes)
        shape[ax] = len(m)
        coeffs = coeffs * np.power(-1.0, np.abs(m)).reshape(shape)
    return coeffs


def homogeneous_component(sampler: Callable[[np.ndarray], np.ndarray],
                          m: Sequence[int], radii: Sequence[float],
                          fft_sizes: Sequence[int]) -> complex:
    """Phase-Fourier coefficient of u along the torus orbit of fixed radii.

    Evaluates the sampler on the tensor phase grid z_j = r_j e^{i theta_k}
    and reads off the m-th FFT coefficient; exact for phase-band-limited
    samplers below the grid Nyquist order.  ``sampler`` must accept an
    array of shape (..., n) of complex coordinates.
    """
    m = np.asarray(m, dtype=int)
    sizes = tuple(int(s) for s in fft_sizes)
    if any(sz < 2 * abs(int(mm)) + 2 for sz, mm in zip(sizes, m)):
        raise ValueError("fft sizes must exceed 2|m_j| + 1")
    axes = [np.exp(2j * math.pi * np.arange(sz) / sz) for sz in sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    z = np.stack([float(r) * g for r, g in zip(radii, mesh)], axis=-1)
    vals = np.asarray(sampler(z), dtype=complex)
    coeffs = np.fft.fftn(vals) / math.prod(sizes)
    # energy at the Nyquist band signals phase content beyond the grid
    band = np.zeros(sizes, dtype=bool)
    for ax, sz in enumerate(sizes):
        idx = [slice(None)] * len(sizes)
        idx[ax] = sz // 2
        band[tuple(idx)] = True
    if np.max(np.abs(coeffs[band])) > ALIAS_TOL:
        warnings.warn("phase spectrum reaches the grid Nyquist order",
                      AliasingWarning, stacklevel=2)
    return complex(coeffs[tuple(int(mm) % sz for mm, sz in zip(m, sizes))])


def extract_coeffs(params: Params, values: np.ndarray, max_order: int,
                   floor: float = 1e-14) -> ExpansionCoeffs:
    """Expansion coefficients of the extension of grid boundary data.

    c_{p,q} = fourier(data)(p - q) / profile_product_at_one(p, q); modes of
    total order above ``max_order`` are dropped into ``dropped_mass``, and
    Fourier mass below ``floor`` (relative to the largest coefficient) is
    treated as sampling roundoff.  Warns when the data has detectable energy
    at the grid Nyquist order.
    """
    values = np.asarray(values, dtype=complex)
    coeffs = grid_fourier(values)
    modes = _mode_grids(values.shape)
    if any(np.max(np.abs(np.take(coeffs, [sz // 2], axis=ax))) > ALIAS_TOL
           for ax, sz in enumerate(values.shape)):
        warnings.warn("boundary data reaches the grid Nyquist order",
                      AliasingWarning, stacklevel=2)
    cutoff = floor * max(1e-300, float(np.abs(coeffs).max()))
    table: dict[PureIndex, complex] = {}
    dropped = 0.0
    for flat_idx in np.ndindex(values.shape):
        c = complex(coeffs[flat_idx])
        if abs(c) <= cutoff:
            continue
        m = tuple(int(modes[ax][flat_idx[ax]]) for ax in range(values.ndim))
        if sum(abs(v) for v in m) > max_order:
            dropped += abs(c)
            continue
        idx = PureIndex.from_mode(m)
        table[idx] = c / profile_product_at_one(params, idx)
    return ExpansionCoeffs(max_order=max_order, table=table, dropped_mass=dropped)


def synthesize(params: Params, coeffs: ExpansionCoeffs, z: PolyPoint) -> complex:
    """Evaluate the stored expansion at an interior point.

    Terms are accumulated in the deterministic (order, lex) order.
    """
    zc = z.as_complex()
    total = complex(0.0)
    for idx, c in coeffs.items_ordered():
        mono = complex(np.prod(zc ** np.asarray(idx.p)) * np.prod(np.conj(zc) ** np.asarray(idx.q)))
        total += c * profile_product(params, idx, z.radii) * mono
    return total


def synthesize_with_bound(params: Params, coeffs: ExpansionCoeffs,
                          z: PolyPoint) -> tuple[complex, float]:
    """Synthesis value plus an upper bound on any dropped term.

    Each normalized elementary solution is bounded by the kernel mass
    bound, so dropped boundary mass times that bound caps the omission.
    """
    return synthesize(params, coeffs, z), params.mass_bound * coeffs.dropped_mass
