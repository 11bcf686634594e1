"""Restricted non-tangential limit estimation at the distinguished boundary.

A limit scan follows several admissible approach paths into a restricted
cone, reads the extension along a terminal window, and reports the mean
terminal value together with the worst spread over nested windows.  The
spread sequence over shrinking windows is non-increasing by construction;
its last entry is the oscillation proxy used for the convergence flag.

Extensions of grid data are evaluated through the exact band-limited
multipliers (the kernel quadrature cannot resolve radii like 1 - 1e-6);
atomic measures are summed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expansion import axis_multiplier
from .geometry import PathProfile, PolyPoint, StolzCone, TorusGrid, TorusPoint, \
    approach_path, wrap_angle
from .kernel import Params, kernel_axis_values
from .poisson import AtomicMeasure, GridFunction, poisson_of_measure
from .expansion import _mode_grids, grid_fourier

TERMINAL_FRACTION = 0.25


def default_profiles(n: int, restriction: float, paths: int) -> list[PathProfile]:
    """Deterministic family of admissible path shapes, radial first."""
    if paths < 1:
        raise ValueError("need at least one path")
    shapes = [PathProfile([0.0] * n, [1.0] * n)]
    i = 1
    while len(shapes) < paths:
        frac = i / max(paths - 1, 1)
        c = [((-1) ** (i + j)) * min(1.0, frac) for j in range(n)]
        dmax = min(restriction, 1.0 + frac * (restriction - 1.0)) if math.isfinite(restriction) else 1.0
        d = [1.0 + (dmax - 1.0) * ((j + i) % n) / max(n - 1, 1) if n > 1 else 1.0
             for j in range(n)]
        shapes.append(PathProfile(c, d))
        i += 1
    return shapes[:paths]


class _GridEvaluator:
    """Evaluate the extension of grid data at arbitrary interior points.

    Exact for the band-limited data the grid represents: per-axis mode
    multipliers at the point radius times boundary phases.
    """

    def __init__(self, params: Params, f: GridFunction):
        self.params = params
        self.modes = _mode_grids(f.grid.sizes)
        self.coeffs = grid_fourier(f.values)
        self._mult_cache: dict[tuple[int, float], np.ndarray] = {}

    def _multipliers(self, j: int, r: float) -> np.ndarray:
        key = (j, float(r))
        if key not in self._mult_cache:
            self._mult_cache[key] = np.array(
                [axis_multiplier(self.params.alpha[j], self.params.beta[j], int(m), float(r))
                 for m in self.modes[j]], dtype=complex)
        return self._mult_cache[key]

    def at(self, z: PolyPoint) -> complex:
        out = self.coeffs
        for j in range(self.params.n):
            vec = self._multipliers(j, z.radii[j]) * np.exp(1j * self.modes[j] * z.angles[j])
            out = np.tensordot(vec, out, axes=(0, 0))
        return complex(out)

    def on_vertex_grid(self, grid: TorusGrid, radii: Sequence[float],
                       offsets: Sequence[float]) -> np.ndarray:
        """Values at z_j = r_j e^{i(psi_j + offset_j)} for every grid vertex psi.

        One inverse FFT per call: the vertex only rotates boundary phases.
        """
        spec = np.zeros(grid.sizes, dtype=complex)
        floor = 1e-13 * max(1.0, float(np.abs(self.coeffs).max()))
        for idx in np.ndindex(self.coeffs.shape):
            c = complex(self.coeffs[idx])
            if abs(c) < floor:
                continue
            m = tuple(int(self.modes[ax][idx[ax]]) for ax in range(grid.n))
            if any(abs(mm) > grid.sizes[ax] // 2 for ax, mm in enumerate(m)):
                raise ValueError("vertex grid coarser than the data band")
            w = c
            for ax, mm in enumerate(m):
                w *= self._multipliers(ax, radii[ax])[mm % len(self.modes[ax])] \
                    * np.exp(1j * mm * offsets[ax]) * (-1.0) ** abs(mm)
            spec[tuple(mm % grid.sizes[ax] for ax, mm in enumerate(m))] += w
        return np.fft.ifftn(spec) * grid.node_count


@dataclass(frozen=True)
class RntEstimate:
    """Terminal estimate of a restricted non-tangential limit scan."""

    estimate: complex
    oscillation: float
    converged: bool
    oscillation_sequence: tuple[float, ...]
    terminal_values: tuple[complex, ...]


def _path_values(params: Params, data, vertex: TorusPoint, aperture: float,
                 restriction: float, paths: int, steps: int,
                 end_gap: float = 1e-6):
    cone = StolzCone(vertex, aperture, restriction)
    profiles = default_profiles(vertex.n, restriction, paths)
    if isinstance(data, GridFunction):
        evaluator = _GridEvaluator(params, data).at
    elif isinstance(data, AtomicMeasure):
        evaluator = lambda z: poisson_of_measure(params, data, z)
    else:
        evaluator = data  # already a callable on PolyPoint
    values = []
    gap_ladders = []
    for prof in profiles:
        pts = approach_path(cone, steps, prof, end_gap=end_gap)
        values.append(np.array([evaluator(z) for z in pts]))
        gap_ladders.append(np.array([1.0 - max(z.radii) for z in pts]))
    return np.asarray(values), np.asarray(gap_ladders)


def rnt_limit(params: Params, data, vertex: TorusPoint, aperture: float,
              restriction: float, paths: int = 8, steps: int = 48,
              tol: float = 1e-6, end_gap: float = 1e-6) -> RntEstimate:
    """Estimate the limit of P[data] into the cone at the vertex.

    The estimate is the mean over the terminal window (last quarter of the
    steps) of all path values; the oscillation is the max pairwise spread
    there.  The non-convergence flag is raised when that spread exceeds
    ``tol`` at the tightest window.
    """
    values, _ = _path_values(params, data, vertex, aperture, restriction,
                             paths, steps, end_gap)
    window = max(2, int(TERMINAL_FRACTION * steps))

    def spread(tail: np.ndarray) -> float:
        flat = tail.reshape(-1)
        return float(np.abs(flat[:, None] - flat[None, :]).max())

    osc_sequence = [spread(values[:, -w:]) for w in range(window, 1, -1)]
    tail = values[:, -window:]
    estimate = complex(np.mean(tail))
    oscillation = osc_sequence[-1]
    return RntEstimate(estimate=estimate, oscillation=oscillation,
                       converged=bool(oscillation <= tol),
                       oscillation_sequence=tuple(osc_sequence),
                       terminal_values=tuple(values[:, -1]))


def singular_decay_fit(params: Params, mu: AtomicMeasure, vertex: TorusPoint,
                       steps: int = 40, fit_window: tuple[float, float] = (1e-6, 1e-2)
                       ) -> tuple[float, np.ndarray, np.ndarray]:
    """Log-log slope of |P[d mu]| along the radial path into the vertex.

    Returns (slope, gaps, magnitudes).  For a vertex away from every atom
    the magnitude scales like prod_j (1 - r_j)^(t_j + 1).
    """
    values, gaps = _path_values(params, mu, vertex, aperture=1.0, restriction=1.0,
                                paths=1, steps=steps)
    mags = np.abs(values[0])
    g = gaps[0]
    mask = (g >= fit_window[0]) & (g <= fit_window[1]) & (mags > 0.0)
    if mask.sum() < 2:
        raise ValueError("not enough ladder points inside the fit window")
    slope = float(np.polyfit(np.log(g[mask]), np.log(mags[mask]), 1)[0])
    return slope, g, mags


@dataclass(frozen=True)
class SweepSummary:
    """Vertex-grid scan of restricted non-tangential estimates."""

    fraction: float
    checked: int
    excluded: int
    tol: float
    failures: tuple[dict, ...] = field(default_factory=tuple)
    estimates: np.ndarray | None = None
    targets: np.ndarray | None = None


def fatou_sweep(params: Params, data, vertex_grid: TorusGrid, aperture: float,
                restriction: float, tol: float = 1e-3, paths: int = 4,
                steps: int = 32, end_gap: float = 1e-6,
                exclude: Callable[[np.ndarray], bool] | None = None,
                exclusion_radius: float = 0.5) -> SweepSummary:
    """Fraction of grid vertices whose scan estimate matches the boundary data.

    ``data`` is a GridFunction or a pair (GridFunction, AtomicMeasure); with
    an atomic part present, vertices within ``exclusion_radius`` (max angle
    gap) of an atom are excluded, as is anything the ``exclude`` predicate
    marks.  Exclusions are counted, never silent.
    """
    if isinstance(data, tuple):
        f, mu = data
    else:
        f, mu = data, None
    evaluator = _GridEvaluator(params, f)
    profiles = default_profiles(vertex_grid.n, restriction, paths)
    window = max(2, int(TERMINAL_FRACTION * steps))
    gaps = np.geomspace(0.5, end_gap, steps)[-window:]

    acc: list[np.ndarray] = []
    for prof in profiles:
        d = np.asarray(prof.d)
        c = np.asarray(prof.c)
        start = 0.5 / d.max()
        prof_gaps = np.geomspace(start, end_gap, steps)[-window:]
        for g in prof_gaps:
            radii = 1.0 - d * g
            offsets = c * aperture * d * g
            vals = evaluator.on_vertex_grid(vertex_grid, radii, offsets)
            if mu is not None:
                vals = vals + _measure_on_vertex_grid(params, mu, vertex_grid,
                                                      radii, offsets)
            acc.append(vals)
    stack = np.stack(acc)
    estimates = stack.mean(axis=0)
    targets = evaluator.on_vertex_grid(vertex_grid, [1.0 - 1e-14] * vertex_grid.n,
                                       [0.0] * vertex_grid.n)

    centers = np.asarray([list(pt.angles) for pt in vertex_grid.points()])
    keep = np.ones(len(centers), dtype=bool)
    if mu is not None:
        atom_angles = mu.angles_array()
        for i, ang in enumerate(centers):
            gapmax = np.min(np.max(np.abs(wrap_angle(atom_angles - ang)), axis=1))
            if gapmax < exclusion_radius:
                keep[i] = False
    if exclude is not None:
        for i, ang in enumerate(centers):
            if exclude(ang):
                keep[i] = False

    est_flat = estimates.reshape(-1)
    tgt_flat = targets.reshape(-1)
    errs = np.abs(est_flat - tgt_flat)
    checked = int(keep.sum())
    ok = (errs <= tol) | ~keep
    failures = tuple({"angles": centers[i].tolist(), "estimate": complex(est_flat[i]),
                      "target": complex(tgt_flat[i]), "error": float(errs[i])}
                     for i in np.nonzero(keep & (errs > tol))[0][:32])
    fraction = float(np.mean(errs[keep] <= tol)) if checked else 1.0
    return SweepSummary(fraction=fraction, checked=checked,
                        excluded=int((~keep).sum()), tol=tol, failures=failures,
                        estimates=estimates, targets=targets)


def _measure_on_vertex_grid(params: Params, mu: AtomicMeasure, grid: TorusGrid,
                            radii: Sequence[float], offsets: Sequence[float]) -> np.ndarray:
    """P[d mu] at z_j = r_j e^{i(psi_j + offset_j)} for every grid vertex psi."""
    out = np.zeros(grid.sizes, dtype=complex)
    for pt, w in mu.atoms:
        term = None
        for j in range(grid.n):
            vec = kernel_axis_values(params, j, complex(radii[j]),
                                     pt.angles[j] - grid.axis_angles(j) - offsets[j])
            term = vec if term is None else np.multiply.outer(term, vec)
        out += w * term
    return out
