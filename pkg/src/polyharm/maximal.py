"""Box maximal functions, their weighted sum, and level-set experiments.

For an atomic measure the supremum over centered boxes of one ratio family
is attained at finitely many scales: an atom at angular offsets delta
enters the box of shape exponents gamma once the scale passes
max_l 2 |delta_l| 2^(-gamma_l), and between entries the ratio decreases.
Scanning those entry scales therefore computes the maximal function
exactly; the default scale grid is exactly that set.

Two families with shape exponents differing by a constant shift contain
the same boxes, so the weighted sum over all shapes folds analytically
into a sum over normalized shapes (min component 0) times 1/(1 - q^n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .geometry import GammaBox, PolyPoint, StolzCone, TorusGrid, TorusPoint, \
    DyadicPartition, wrap_angle
from .kernel import Params
from .poisson import AtomicMeasure, GridFunction, PoissonExtension, dilate, \
    poisson_of_measure

TWO_PI = 2.0 * math.pi

ATOM_AT_CENTER_CAP = 1e15


def _box_measures(scales: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Normalized measure of the gamma-shaped box at each scale (arcs cap at 2 pi)."""
    lengths = np.minimum(scales[..., None] * np.exp2(gamma), TWO_PI)
    return np.prod(lengths / TWO_PI, axis=-1)


def m_gamma(mu: AtomicMeasure, gamma: Sequence[int], center: TorusPoint,
            scale_grid: Sequence[float] | None = None,
            atom_cap: float = ATOM_AT_CENTER_CAP) -> float:
    """Maximal ratio |mu|(Q)/m_n(Q) over boxes of shape gamma centered at center.

    With the default ``scale_grid=None`` the sup is computed exactly from
    the atom entry scales.  An atom sitting exactly at the center makes the
    true sup infinite; the configured cap is returned instead.
    """
    vals = m_gamma_grid(mu, gamma, np.asarray([center.angles], dtype=float),
                        scale_grid=scale_grid, atom_cap=atom_cap)
    return float(vals[0])


def m_gamma_grid(mu: AtomicMeasure, gamma: Sequence[int], centers: np.ndarray,
                 scale_grid: Sequence[float] | None = None,
                 atom_cap: float = ATOM_AT_CENTER_CAP) -> np.ndarray:
    """Vectorized m_gamma over an array of center angle rows (C, n)."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("shape exponents must be non-negative")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    n_centers = centers.shape[0]
    if not mu.atoms:
        return np.zeros(n_centers)
    angles = mu.angles_array()          # (K, n)
    weights = np.abs(mu.weights_array())
    offsets = np.abs(wrap_angle(angles[None, :, :] - centers[:, None, :]))  # (C,K,n)
    entry = np.max(2.0 * offsets * np.exp2(-gamma), axis=-1)                # (C,K)
    s_hi = TWO_PI * 2.0 ** (-gamma.min())

    if scale_grid is not None:
        scales = np.asarray(sorted(set(float(s) for s in scale_grid)))
        if np.any(scales <= 0.0):
            raise ValueError("scales must be positive")
        scales = scales[scales <= s_hi * (1.0 + 1e-15)]
        if scales.size == 0:
            return np.zeros(n_centers)
        captured = entry[:, :, None] <= scales[None, None, :] * (1.0 + 1e-15)
        mass = np.einsum("k,cks->cs", weights, captured)
        ratios = mass / _box_measures(scales, gamma)[None, :]
        return np.max(ratios, axis=1)

    out = np.empty(n_centers)
    order = np.argsort(entry, axis=1)
    sorted_entry = np.take_along_axis(entry, order, axis=1)
    sorted_mass = np.cumsum(np.take_along_axis(
        np.broadcast_to(weights, entry.shape), order, axis=1), axis=1)
    measures = _box_measures(sorted_entry, gamma)
    with np.errstate(divide="ignore"):
        ratios = np.where(measures > 0.0, sorted_mass / np.where(measures > 0, measures, 1.0),
                          np.inf)
    best = np.max(ratios, axis=1)
    at_center = sorted_entry[:, 0] == 0.0
    out[:] = np.where(at_center, atom_cap, best)
    return out


def normalized_shapes(n: int, cap: int):
    """All shape exponent vectors in {0..cap}^n with min component 0."""
    for g in product(range(cap + 1), repeat=n):
        if min(g) == 0:
            yield g


def m_q(mu: AtomicMeasure, q: float, center: TorusPoint, gamma_cap: int = 12,
        atom_cap: float = ATOM_AT_CENTER_CAP) -> float:
    """Weighted sum over box shapes sum_gamma q^|gamma| M_gamma mu(center).

    Computed as the analytically folded sum over normalized shapes with
    infinity-norm at most ``gamma_cap``; see m_q_with_tail for the
    truncation diagnostics.
    """
    return m_q_with_tail(mu, q, center, gamma_cap, atom_cap)[0]


def m_q_with_tail(mu: AtomicMeasure, q: float, center: TorusPoint,
                  gamma_cap: int = 12,
                  atom_cap: float = ATOM_AT_CENTER_CAP) -> tuple[float, float, bool]:
    """(value, tail_bound, tail_exact) for the shape-weighted maximal sum.

    Shapes sharing a ratio family are folded exactly; only families more
    eccentric than the cap are missing.  When no atom is capturable on the
    cap ring the missing families all vanish and the tail bound 0 is exact;
    otherwise a geometric estimate (valid for 2q < 1, n <= 2) is reported.
    """
    vals = m_q_grid(mu, q, np.asarray([center.angles]), gamma_cap, atom_cap,
                    with_tail=True)
    value, tail, exact = vals
    return float(value[0]), float(tail[0]), bool(exact[0])


def m_q_grid(mu: AtomicMeasure, q: float, centers: np.ndarray, gamma_cap: int = 12,
             atom_cap: float = ATOM_AT_CENTER_CAP, with_tail: bool = False):
    """Vectorized m_q over center angle rows; optionally with tail diagnostics."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if not mu.atoms:
        zero = np.zeros(centers.shape[0])
        return (zero, zero.copy(), np.ones_like(zero, dtype=bool)) if with_tail else zero
    n = mu.n
    fold = 1.0 / (1.0 - q**n)
    total = np.zeros(centers.shape[0])
    ring = np.zeros(centers.shape[0])
    for g in normalized_shapes(n, gamma_cap):
        vals = m_gamma_grid(mu, g, centers, atom_cap=atom_cap)
        total += q ** sum(g) * vals * fold
        if max(g) == gamma_cap:
            ring += q ** sum(g) * vals * fold
    if not with_tail:
        return total
    exact = ring == 0.0
    if 2.0 * q < 1.0 and n <= 2:
        tail = ring * (2.0 * q) / (1.0 - 2.0 * q)
    else:
        tail = np.where(exact, 0.0, np.inf)
    return total, tail, exact


def nt_maximal(params: Params, mu: AtomicMeasure, cone: StolzCone,
               sample_budget: int = 256) -> float:
    """Lower bound for sup |P[d mu]| over the restricted cone.

    Scans a deterministic low-discrepancy sample of the cone (van der
    Corput sequences in depth, eccentricity and angular offset), radii
    clamped to 1 - 1e-10.
    """
    if not math.isfinite(cone.restriction):
        raise ValueError("nt_maximal needs a finite restriction B")
    if sample_budget < 1:
        raise ValueError("sample budget must be >= 1")
    n = params.n
    psi = np.asarray(cone.vertex.angles)
    best = 0.0
    for i in range(sample_budget):
        u_depth = _van_der_corput(i, 2)
        gap = 10.0 ** (-1.0 - 9.0 * u_depth)          # 1e-1 .. 1e-10
        d = np.array([cone.restriction ** _van_der_corput(i, _PRIMES[1 + j])
                      for j in range(n)])
        d /= d.min()
        c = np.array([2.0 * _van_der_corput(i, _PRIMES[1 + n + j]) - 1.0
                      for j in range(n)])
        radii = np.minimum(1.0 - d * gap, 1.0 - 1e-10)
        angles = psi + c * cone.aperture * d * gap
        val = abs(poisson_of_measure(params, mu, PolyPoint(radii, angles)))
        best = max(best, val)
    return best


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def _van_der_corput(i: int, base: int) -> float:
    out, denom = 0.0, 1.0
    i += 1
    while i > 0:
        i, digit = divmod(i, base)
        denom *= base
        out += digit / denom
    return out


def radial_maximal(params: Params, data: GridFunction | AtomicMeasure,
                   center_grid: TorusGrid, ladder: Sequence[float]) -> GridFunction:
    """Pointwise max over the radius ladder of |u(r zeta)| on the center grid."""
    ext = PoissonExtension(params, data)
    out = np.zeros(center_grid.sizes)
    for r in ladder:
        ur = dilate(ext, r, grid=center_grid)
        out = np.maximum(out, np.abs(ur.values))
    return GridFunction(center_grid, out.astype(complex))


@dataclass(frozen=True)
class MaximalReport:
    """Worst-case level-set measurements against the theoretical bound curve."""

    kind: str
    lambda_grid: tuple[float, ...]
    level_set_measures: tuple[float, ...]
    bound_curve: tuple[float, ...]
    trials: int
    witnesses: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def violations(self) -> int:
        return len(self.witnesses)

    def rows(self):
        return list(zip(self.lambda_grid, self.level_set_measures, self.bound_curve))

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "trials": self.trials,
            "violations": self.violations,
            "rows": [{"lambda": l, "measured": m, "bound": b} for l, m, b in self.rows()],
            "witnesses": list(self.witnesses),
        }


def weak11_experiment(kind: str, mu_generator: Callable, lambda_grid: Sequence[float],
                      trials: int, center_grid: TorusGrid, rng: np.random.Generator,
                      gamma: Sequence[int] | None = None, q: float | None = None,
                      gamma_cap: int = 8) -> MaximalReport:
    """Measure level-set fractions of a maximal function against its weak bound.

    kind "gamma" uses the box family of the given shape with bound
    3^n ||mu|| / lambda; kind "mq" uses the shape-weighted sum with bound
    3^n (1 - sqrt(q))^(-2n) ||mu|| / lambda.  Every generated measure is
    scanned over the center grid; any (measure, lambda) pair whose measured
    fraction exceeds its bound is recorded as a witness.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    lambdas = [float(l) for l in lambda_grid]
    n = center_grid.n
    centers = np.asarray([list(pt.angles) for pt in center_grid.points()])
    worst_measured = [0.0] * len(lambdas)
    worst_bound = [math.inf] * len(lambdas)
    witnesses: list[dict] = []
    for trial in range(trials):
        mu = mu_generator(rng)
        norm = mu.total_variation
        if kind == "gamma":
            if gamma is None:
                raise ValueError("kind 'gamma' needs a shape vector")
            vals = m_gamma_grid(mu, gamma, centers)
            bound_const = 3.0**n * norm
        elif kind == "mq":
            if q is None:
                raise ValueError("kind 'mq' needs q")
            vals = m_q_grid(mu, q, centers, gamma_cap=gamma_cap)
            bound_const = 3.0**n / (1.0 - math.sqrt(q)) ** (2 * n) * norm
        else:
            raise ValueError(f"unknown experiment kind {kind!r}")
        for i, lam in enumerate(lambdas):
            measured = float(np.mean(vals > lam))
            bound = bound_const / lam
            if measured > worst_measured[i]:
                worst_measured[i] = measured
                worst_bound[i] = bound
            if measured > bound:
                witnesses.append({"trial": trial, "lambda": lam,
                                  "measured": measured, "bound": bound})
    return MaximalReport(kind=kind, lambda_grid=tuple(lambdas),
                         level_set_measures=tuple(worst_measured),
                         bound_curve=tuple(worst_bound), trials=trials,
                         witnesses=tuple(witnesses))


def partition_mass_check(partition: DyadicPartition, mu: AtomicMeasure) -> list[dict]:
    """Per-box comparison of |mu|(Q(eps, j)) with its maximal-function bound.

    Bound: (2B)^(n-1) 2^(sum j) prod_k (1-r_k) kappa_k / pi times the
    depth-shaped maximal function at the partition vertex.
    """
    n = partition.n
    bfac = (2.0 * partition.bound) ** (n - 1)
    geom = np.prod([(1.0 - ax.rho) * ax.kappa / math.pi for ax in partition.axes])
    box_mass: dict[tuple, float] = {}
    for pt, w in mu.atoms:
        key = partition.locate(pt)
        box_mass[key] = box_mass.get(key, 0.0) + abs(w)
    out = []
    mvals: dict[tuple, float] = {}
    for (eps, j), mass in sorted(box_mass.items()):
        if j not in mvals:
            mvals[j] = m_gamma(mu, j, partition.vertex)
        bound = bfac * 2.0 ** sum(j) * geom * mvals[j]
        out.append({"eps": eps, "j": j, "mass": mass, "bound": float(bound)})
    return out
