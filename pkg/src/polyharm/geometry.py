"""Points, grids, cones, boxes and the radius-adapted dyadic partitions.

Angles are always stored normalized to [-pi, pi).  Arcs and boxes are
half-open, [a, b), so that partitions tile the torus with no overlap.
All objects are immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import InvalidProfileError, RestrictionError

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Reduce angles mod 2*pi into [-pi, pi)."""
    return (np.asarray(theta) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class TorusPoint:
    """A point of the n-torus, stored as normalized angles."""

    angles: tuple[float, ...]

    def __init__(self, angles: Sequence[float]):
        object.__setattr__(self, "angles", tuple(float(a) for a in wrap_angle(np.asarray(angles, dtype=float))))

    @property
    def n(self) -> int:
        return len(self.angles)

    def as_complex(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.angles))


@dataclass(frozen=True)
class PolyPoint:
    """A point of the open unit polydisc in polar per-axis form."""

    radii: tuple[float, ...]
    angles: tuple[float, ...]

    def __init__(self, radii: Sequence[float], angles: Sequence[float]):
        radii = tuple(float(r) for r in radii)
        if len(radii) != len(angles):
            raise ValueError("radii and angles must have equal length")
        if any(not 0.0 <= r < 1.0 for r in radii):
            raise ValueError("radii must lie in [0, 1)")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "angles", tuple(float(a) for a in wrap_angle(np.asarray(angles, dtype=float))))

    @property
    def n(self) -> int:
        return len(self.radii)

    def as_complex(self) -> np.ndarray:
        return np.asarray(self.radii) * np.exp(1j * np.asarray(self.angles))

    @classmethod
    def from_complex(cls, z: Sequence[complex]) -> "PolyPoint":
        z = np.asarray(z, dtype=complex)
        return cls(np.abs(z), np.angle(z))


@dataclass(frozen=True)
class TorusGrid:
    """Uniform tensor grid on the torus; node (k_1..k_n) has angles 2 pi k_j / N_j - pi."""

    sizes: tuple[int, ...]

    def __init__(self, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if any(s < 2 for s in sizes):
            raise ValueError("grid sizes must be >= 2")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def node_count(self) -> int:
        return math.prod(self.sizes)

    @property
    def cell_measure(self) -> float:
        return 1.0 / self.node_count

    def axis_angles(self, j: int) -> np.ndarray:
        nj = self.sizes[j]
        return TWO_PI * np.arange(nj) / nj - math.pi

    def angle_mesh(self) -> list[np.ndarray]:
        """Meshgrid (ij indexing) of angles, one array per axis."""
        return list(np.meshgrid(*[self.axis_angles(j) for j in range(self.n)], indexing="ij"))

    def points(self) -> Iterator[TorusPoint]:
        axes = [self.axis_angles(j) for j in range(self.n)]
        for idx in product(*[range(s) for s in self.sizes]):
            yield TorusPoint([axes[j][idx[j]] for j in range(self.n)])

    def sample(self, func: Callable[..., np.ndarray]) -> np.ndarray:
        """Evaluate func(theta_1, ..., theta_n) on the angle meshes."""
        return np.asarray(func(*self.angle_mesh()), dtype=complex)


@dataclass(frozen=True)
class StolzCone:
    """Non-tangential approach region at a torus vertex.

    Membership: |theta_j - psi_j| <= A (1 - r_j) on every axis, and, when
    the restriction B is finite, max_{j,k} (1-r_j)/(1-r_k) <= B.
    B = inf encodes the unrestricted full cone.
    """

    vertex: TorusPoint
    aperture: float
    restriction: float = math.inf

    def __post_init__(self):
        if not self.aperture > 0.0:
            raise ValueError("aperture A must be positive")
        if not self.restriction >= 1.0:
            raise ValueError("restriction B must be >= 1 (or inf)")

    def contains(self, z: PolyPoint, slack: float = 1e-12) -> bool:
        # recovering 1 - r loses ~1 ulp of 1.0, so boundary comparisons get
        # an absolute cushion of a few ulps on top of the relative slack
        cushion = 8.0 * np.finfo(float).eps
        psi = np.asarray(self.vertex.angles)
        dth = np.abs(wrap_angle(np.asarray(z.angles) - psi))
        gaps = 1.0 - np.asarray(z.radii)
        if np.any(dth > self.aperture * gaps * (1.0 + slack) + self.aperture * cushion):
            return False
        if math.isfinite(self.restriction):
            if gaps.max() > self.restriction * (gaps.min() * (1.0 + slack) + cushion):
                return False
        return True


def stolz_membership(cone: StolzCone, z: PolyPoint) -> bool:
    return cone.contains(z)


@dataclass(frozen=True)
class PathProfile:
    """Approach-path shape inside a cone.

    Angular offsets theta_j(s) = psi_j + c_j * A * (1 - r_j(s)) with
    |c_j| <= 1, and radii 1 - r_j(s) = d_j * (1 - s) with d-ratios <= B.
    """

    c: tuple[float, ...]
    d: tuple[float, ...]

    def __init__(self, c: Sequence[float], d: Sequence[float]):
        object.__setattr__(self, "c", tuple(float(v) for v in c))
        object.__setattr__(self, "d", tuple(float(v) for v in d))


def approach_path(cone: StolzCone, steps: int, profile: PathProfile,
                  end_gap: float = 1e-6) -> list[PolyPoint]:
    """Sample a path approaching the cone vertex.

    Step s runs over a geometric ladder with 1 - s shrinking from 0.5/max(d)
    down to end_gap; every returned point is a cone member and radii
    increase strictly toward 1.
    """
    if steps < 2:
        raise ValueError("need at least 2 steps")
    c = np.asarray(profile.c, dtype=float)
    d = np.asarray(profile.d, dtype=float)
    if len(c) != cone.vertex.n or len(d) != cone.vertex.n:
        raise InvalidProfileError("profile dimension does not match the cone")
    if np.any(np.abs(c) > 1.0 + 1e-12):
        raise InvalidProfileError(f"|c| must be <= 1, got {c}")
    if np.any(d <= 0.0):
        raise InvalidProfileError("d components must be positive")
    ratio = d.max() / d.min()
    if math.isfinite(cone.restriction) and ratio > cone.restriction * (1.0 + 1e-12):
        raise InvalidProfileError(
            f"d-ratio {ratio:.3g} exceeds the cone restriction B = {cone.restriction}")
    start_gap = 0.5 / d.max()
    gaps = np.geomspace(start_gap, end_gap, steps)
    gaps[-1] = end_gap  # exp/log round trip can miss the endpoint by ~1e-11
    psi = np.asarray(cone.vertex.angles)
    points = []
    for g in gaps:
        radii = 1.0 - d * g
        angles = psi + c * cone.aperture * d * g
        points.append(PolyPoint(radii, angles))
    return points


@dataclass(frozen=True)
class GammaBox:
    """Product of half-open arcs with lengths in ratio (2^g_1, ..., 2^g_n).

    Arc j has length min(scale * 2^g_j, 2*pi); an axis that caps at the
    full circle is degenerate (contains every angle).
    """

    gamma: tuple[int, ...]
    center: TorusPoint
    scale: float

    def __init__(self, gamma: Sequence[int], center: TorusPoint, scale: float):
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "gamma", tuple(int(g) for g in gamma))
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "scale", float(scale))

    @property
    def lengths(self) -> np.ndarray:
        raw = self.scale * np.exp2(np.asarray(self.gamma, dtype=float))
        return np.minimum(raw, TWO_PI)

    @property
    def measure(self) -> float:
        return float(np.prod(self.lengths / TWO_PI))

    def contains(self, point: TorusPoint) -> bool:
        half = self.lengths / 2.0
        off = wrap_angle(np.asarray(point.angles) - np.asarray(self.center.angles))
        full = half >= math.pi  # capped axis covers the circle
        return bool(np.all(full | ((-half <= off) & (off < half))))


def _kappa_p(rho: float) -> tuple[float, int]:
    """The unique kappa in [1, 2) and p in N_0 with pi / ((1-rho) kappa) = 2^p."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("radius must lie in [0, 1)")
    gap = 1.0 - rho
    p = math.floor(math.log2(math.pi / gap))
    kappa = math.pi / (gap * 2.0**p)
    # float ties: force kappa into the half-open [1, 2)
    while kappa >= 2.0:
        p += 1
        kappa = math.pi / (gap * 2.0**p)
    while kappa < 1.0:
        p -= 1
        kappa = math.pi / (gap * 2.0**p)
    if p < 0:
        raise ValueError(f"radius {rho} too small for a dyadic partition")
    return kappa, p


@dataclass(frozen=True)
class AxisPartition:
    """Dyadic breakpoints 0 = x_0 < x_1 < ... < x_{p+1} = pi for one axis."""

    rho: float
    kappa: float
    p: int
    x: tuple[float, ...]

    @classmethod
    def build(cls, rho: float) -> "AxisPartition":
        kappa, p = _kappa_p(rho)
        x = [0.0]
        for j in range(1, p + 2):
            x.append(2.0 ** (j - 1) * (1.0 - rho) * kappa)
        assert abs(x[-1] - math.pi) < 1e-12 * math.pi
        x[-1] = math.pi
        return cls(rho=rho, kappa=kappa, p=p, x=tuple(x))

    def locate(self, theta: float) -> tuple[int, int]:
        """Return (sign, j) with sign +1 for [x_j, x_{j+1}), -1 for [-x_{j+1}, -x_j)."""
        theta = float(wrap_angle(theta))
        sign = 1 if theta >= 0.0 else -1
        a = theta if sign > 0 else -theta
        # positive side: x_j <= a < x_{j+1}; negative: x_j < a <= x_{j+1}
        for j in range(self.p + 1):
            if sign > 0 and self.x[j] <= a < self.x[j + 1]:
                return sign, j
            if sign < 0 and self.x[j] < a <= self.x[j + 1]:
                return sign, j
        return sign, self.p if sign > 0 else 0  # theta == pi wraps to -pi: j = p on the - side
    # NB: theta = -pi lies in [-x_{p+1}, -x_p), i.e. j = p on the negative side.

    def interval(self, sign: int, j: int) -> tuple[float, float]:
        if sign > 0:
            return self.x[j], self.x[j + 1]
        return -self.x[j + 1], -self.x[j]

    def length(self, j: int) -> float:
        return self.x[j + 1] - self.x[j]


@dataclass(frozen=True)
class DyadicPartition:
    """Tensor partition of the torus adapted to a radius vector.

    Axes are sorted internally so the stored radii increase (the least
    refined axis first); ``order`` maps stored axis -> caller axis.  Boxes
    Q(eps, j) are indexed by a sign vector eps in {+1, -1}^n and depths
    0 <= j_k <= p_k.  The partition is centered at ``vertex`` (default 1).
    """

    rvec: tuple[float, ...]
    bound: float
    b: int
    axes: tuple[AxisPartition, ...]
    order: tuple[int, ...]
    vertex: TorusPoint

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def p(self) -> tuple[int, ...]:
        return tuple(ax.p for ax in self.axes)

    def box_count(self) -> int:
        return math.prod(2 * (ax.p + 1) for ax in self.axes)

    def box_indices(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        signs = product(*[(1, -1)] * self.n)
        for eps in signs:
            for j in product(*[range(ax.p + 1) for ax in self.axes]):
                yield eps, j

    def box_measure(self, j: Sequence[int]) -> float:
        out = 1.0
        for ax, jk in zip(self.axes, j):
            out *= ax.length(jk) / TWO_PI
        return out

    def box_measure_dyadic(self, j: Sequence[int]) -> float:
        """Closed dyadic form 4^{-n} prod 2^{j_k - p_k}; exact for j_k >= 1,
        understates the true measure by 2 per axis with j_k = 0."""
        out = 1.0
        for ax, jk in zip(self.axes, j):
            out *= 0.25 * 2.0 ** (jk - ax.p)
        return out

    def box_interval(self, axis: int, sign: int, j: int) -> tuple[float, float]:
        return self.axes[axis].interval(sign, j)

    def locate(self, point: TorusPoint) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Box (eps, j) containing the point, in stored axis order."""
        rel = wrap_angle(np.asarray(point.angles)[list(self.order)] -
                         np.asarray(self.vertex.angles)[list(self.order)])
        eps, j = [], []
        for ax, th in zip(self.axes, rel):
            s, jj = ax.locate(float(th))
            eps.append(s)
            j.append(jj)
        return tuple(eps), tuple(j)

    def enclosing_measure(self, j: Sequence[int]) -> float:
        """Measure of R(j), the vertex-centered box with half-widths x_{j_k+1}."""
        out = 1.0
        for ax, jk in zip(self.axes, j):
            out *= 2.0 * ax.x[jk + 1] / TWO_PI
        return out

    def designation(self, j: Sequence[int]) -> tuple[int, ...]:
        """Normalized integer exponents of the arc-length ratios of Q(eps, j)."""
        expo = []
        for ax, jk in zip(self.axes, j):
            jhat = max(jk - 1, 0)
            expo.append(jhat - ax.p)
        base = min(expo)
        return tuple(e - base for e in expo)

    def enclosing_designation(self, j: Sequence[int]) -> tuple[int, ...]:
        """Normalized ratio exponents of R(j); R is homothetic to Q up to the j=0 axes."""
        expo = [jk - ax.p for ax, jk in zip(self.axes, j)]
        base = min(expo)
        return tuple(e - base for e in expo)


def build_partition(rvec: Sequence[float], bound: float = 1.0,
                    vertex: TorusPoint | None = None) -> DyadicPartition:
    """Build the dyadic partition adapted to the radii, vertex-centered.

    Requires max(1 - r) <= bound * min(1 - r); raises RestrictionError
    otherwise.
    """
    r = np.asarray(rvec, dtype=float)
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise ValueError("radii must lie in [0, 1)")
    if bound < 1.0:
        raise ValueError("bound B must be >= 1")
    gaps = 1.0 - r
    if gaps.max() > bound * gaps.min() * (1.0 + 1e-12):
        raise RestrictionError(
            f"max(1-r) = {gaps.max():.6g} exceeds B * min(1-r) = {bound * gaps.min():.6g}")
    order = tuple(int(i) for i in np.argsort(r, kind="stable"))
    axes = tuple(AxisPartition.build(float(r[i])) for i in order)
    b = 0
    while 2.0**b < bound:
        b += 1
    if vertex is None:
        vertex = TorusPoint([0.0] * len(axes))
    return DyadicPartition(rvec=tuple(float(v) for v in r), bound=float(bound),
                           b=b, axes=axes, order=order, vertex=vertex)
