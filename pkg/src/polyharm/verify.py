"""Self-check suites behind the ``verify`` command.

Each suite is a pure function of (tolerances, seed) returning a result
dict {suite, cases, passes, worst_error, tolerance}.  Suites own their
random streams, seeded from the run seed and the suite name, so results
do not depend on scheduling or worker count.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from . import expansion, fatou, kernel, maximal, operators, poisson, special
from .geometry import PolyPoint, TorusGrid, TorusPoint, build_partition

PARAM_SETS = (
    ((0.0 + 0.0j,), (0.0 + 0.0j,)),
    ((0.3 + 0.0j,), (0.3 + 0.0j,)),
    ((0.5 + 2.0j,), (0.5 - 1.0j,)),
    ((0.0 + 0.0j, 0.3 + 0.0j), (0.0 + 0.0j, 0.3 + 0.0j)),
    ((0.5 + 2.0j, 0.3 + 0.0j), (0.5 - 1.0j, 0.3 + 0.0j)),
)

DEFAULT_TOLERANCES = {
    "gamma": 1e-12,
    "hyp": 1e-10,
    "partition": 1e-12,
    "mass": 1e-6,
    "pde": 1e-5,
    "quadrature": 1e-8,
    "duality": 1e-10,
    "roundtrip": 1e-8,
    "weak11": 0.0,
    "fatou": 1e-3,
}


def _rng(seed: int, name: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def _result(name: str, errors: list[float], tol: float) -> dict:
    worst = max(errors) if errors else 0.0
    passes = sum(1 for e in errors if e <= tol)
    return {"suite": name, "cases": len(errors), "passes": passes,
            "worst_error": worst, "tolerance": tol}


def suite_special_gamma(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "special_gamma")
    errors = [abs(special.gamma(1.0) - 1.0),
              abs(special.gamma(0.5) - math.sqrt(math.pi)) / math.sqrt(math.pi)]
    for _ in range(200):
        z = complex(rng.uniform(-5, 10), rng.uniform(-10, 10))
        if min(abs(z - k) for k in range(-6, 1)) < 0.1 or abs(z) < 0.1:
            continue
        lhs = special.gamma(z + 1)
        rhs = z * special.gamma(z)
        errors.append(abs(lhs - rhs) / abs(lhs))
    return _result("special_gamma", errors, tol["gamma"])


def suite_special_hyp2f1(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "special_hyp2f1")
    errors = [abs(special.hyp2f1(0.7, -0.2, 1.5, 0.0) - 1.0),
              abs(special.hyp2f1(1, 1, 2, 0.5) - 2.0 * math.log(2.0)) / (2 * math.log(2))]
    for _ in range(50):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = complex(rng.uniform(0.5, 3), rng.uniform(-1, 1))
        x = rng.uniform(0.0, 0.9)
        f0 = special.hyp2f1(a, b, c, x)
        fm = special.hyp2f1(a - 1, b, c, x)
        fp = special.hyp2f1(a + 1, b, c, x)
        resid = (c - a) * fm + (2 * a - c + (b - a) * x) * f0 + a * (x - 1) * fp
        scale = max(abs(f0), abs(fm), abs(fp), 1.0)
        errors.append(abs(resid) / scale)
        swap = special.hyp2f1(b, a, c, x)
        errors.append(abs(swap - f0))
    return _result("special_hyp2f1", errors, tol["hyp"])


def suite_geometry_partition(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "geometry_partition")
    errors = []
    part = build_partition([1.0 - math.pi / 8.0])
    ax = part.axes[0]
    errors.append(abs(ax.kappa - 1.0))
    errors.append(abs(ax.p - 3))
    errors.append(max(abs(x - y) for x, y in zip(
        ax.x, (0.0, math.pi / 8, math.pi / 4, math.pi / 2, math.pi))))
    part0 = build_partition([0.0])
    errors.append(abs(part0.axes[0].kappa - math.pi / 2))
    errors.append(abs(part0.axes[0].p - 1))
    for _ in range(5):
        r = rng.uniform(0.0, 0.99, size=2)
        spread = (1 - r).max() / (1 - r).min()
        part2 = build_partition(r, bound=max(2.0, spread * 1.01))
        total = sum(part2.box_measure(j) for _, j in part2.box_indices())
        errors.append(abs(total - 1.0))
        pt = TorusPoint(rng.uniform(-math.pi, math.pi, size=2))
        eps, j = part2.locate(pt)
        errors.append(0.0 if all(jk <= ax.p for jk, ax in zip(j, part2.axes)) else 1.0)
    return _result("geometry_partition", errors, tol["partition"])


def suite_kernel_mass(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "kernel_mass")
    errors = []
    for alpha, beta in PARAM_SETS:
        params = kernel.validate(alpha, beta)
        for _ in range(4):
            radii = rng.uniform(0.0, 0.97, size=params.n)
            z = PolyPoint(radii, rng.uniform(-math.pi, math.pi, size=params.n))
            mass = kernel.kernel_mass(params, z, nodes=512)
            errors.append(max(0.0, mass / params.mass_bound - 1.0))
    return _result("kernel_mass", errors, tol["mass"])


def suite_kernel_pde(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "kernel_pde")
    errors = []
    for alpha, beta in PARAM_SETS[:3]:
        params = kernel.validate(alpha, beta)
        zeta = TorusPoint(rng.uniform(-math.pi, math.pi, size=params.n))

        def func(zv, params=params, zeta=zeta):
            return kernel.poisson_kernel(params, PolyPoint.from_complex(zv), zeta)

        for _ in range(4):
            z = rng.uniform(0.1, 0.35, size=params.n) * np.exp(
                1j * rng.uniform(-math.pi, math.pi, size=params.n))
            errors.append(operators.residual(func, params.alpha, params.beta, z, h=1e-3))
    return _result("kernel_pde", errors, tol["pde"])


def suite_poisson_identity(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "poisson_identity")
    errors = []
    grid = TorusGrid([256])
    for alpha, beta in PARAM_SETS[:3]:
        params = kernel.validate(alpha, beta)
        for m in (0, 1, -2):
            idx = expansion.PureIndex.from_mode([m])
            f = poisson.GridFunction.sample(grid, lambda th: np.exp(1j * m * th))
            for _ in range(3):
                z = PolyPoint([rng.uniform(0.0, 0.8)], [rng.uniform(-math.pi, math.pi)])
                got = poisson.poisson_of_function(params, f, z)
                want = poisson.extension_of_pure_mode(params, idx, z)
                errors.append(abs(got - want))
    ones = poisson.GridFunction.sample(grid, lambda th: np.ones_like(th))
    p0 = kernel.validate([0.0], [0.0])
    z = PolyPoint([0.5], [1.0])
    errors.append(abs(poisson.poisson_of_function(p0, ones, z) - 1.0))
    return _result("poisson_identity", errors, tol["quadrature"])


def suite_poisson_duality(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "poisson_duality")
    errors = []
    params = kernel.validate((0.5 + 2.0j, 0.3), (0.5 - 1.0j, 0.3))
    for _ in range(20):
        mu = _random_measure(rng, 2, 4)
        nu = _random_measure(rng, 2, 4)
        rvec = rng.uniform(0.0, 0.9, size=2)
        errors.append(poisson.duality_check(params, mu, nu, rvec))
    return _result("poisson_duality", errors, tol["duality"])


def suite_expansion_roundtrip(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "expansion_roundtrip")
    errors = []
    grid = TorusGrid([64, 64])
    for alpha, beta in (PARAM_SETS[3], PARAM_SETS[4]):
        params = kernel.validate(alpha, beta)
        values = _random_trig(rng, grid, degree=4)
        f = poisson.GridFunction(grid, values)
        coeffs = expansion.extract_coeffs(params, f.values, max_order=8)
        for _ in range(5):
            z = PolyPoint(rng.uniform(0.0, 0.7, size=2),
                          rng.uniform(-math.pi, math.pi, size=2))
            direct = poisson.poisson_of_function(params, f, z)
            series = expansion.synthesize(params, coeffs, z)
            errors.append(abs(direct - series))
    return _result("expansion_roundtrip", errors, tol["roundtrip"])


def suite_maximal_weak11(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "maximal_weak11")
    grid = TorusGrid([256])
    report_g = maximal.weak11_experiment(
        "gamma", lambda r: _random_measure(r, 1, 6), np.geomspace(0.1, 100.0, 7),
        trials=10, center_grid=grid, rng=rng, gamma=[0])
    report_q = maximal.weak11_experiment(
        "mq", lambda r: _random_measure(r, 1, 6), np.geomspace(0.1, 100.0, 7),
        trials=5, center_grid=grid, rng=rng, q=0.5, gamma_cap=6)
    errors = [float(report_g.violations), float(report_q.violations)]
    # single-atom closed form: M_0 at center angle theta equals pi/|theta|
    delta = poisson.AtomicMeasure([(TorusPoint([0.0]), 1.0)])
    for theta in (0.3, -1.2, 2.9):
        got = maximal.m_gamma(delta, [0], TorusPoint([theta]))
        errors.append(abs(got - math.pi / abs(theta)) / (math.pi / abs(theta)))
    return _result("maximal_weak11", errors, max(tol["weak11"], 1e-12))


def suite_fatou_smooth(tol: dict, seed: int) -> dict:
    rng = _rng(seed, "fatou_smooth")
    errors = []
    grid = TorusGrid([16])
    params = kernel.validate([0.3], [0.3])
    f = poisson.GridFunction.sample(
        grid, lambda th: 1.0 + 0.4 * np.cos(th) + 0.2 * np.sin(2 * th))
    summary = fatou.fatou_sweep(params, f, TorusGrid([32]), aperture=2.0,
                                restriction=2.0, tol=tol["fatou"], paths=4, steps=24)
    errors.append(1.0 - summary.fraction)
    return _result("fatou_smooth", errors, 0.0)


def _random_measure(rng: np.random.Generator, n: int, max_atoms: int) -> poisson.AtomicMeasure:
    count = int(rng.integers(1, max_atoms + 1))
    atoms = []
    for _ in range(count):
        angles = rng.uniform(-math.pi, math.pi, size=n)
        w = complex(rng.normal(), rng.normal())
        atoms.append((TorusPoint(angles), w))
    return poisson.AtomicMeasure(atoms)


def _random_trig(rng: np.random.Generator, grid: TorusGrid, degree: int) -> np.ndarray:
    mesh = grid.angle_mesh()
    values = np.zeros(grid.sizes, dtype=complex)
    for _ in range(6):
        m = rng.integers(-degree, degree + 1, size=grid.n)
        c = complex(rng.normal(), rng.normal()) / 3.0
        phase = np.zeros(grid.sizes)
        for ax in range(grid.n):
            phase = phase + m[ax] * mesh[ax]
        values += c * np.exp(1j * phase)
    return values


SUITES = (
    suite_special_gamma,
    suite_special_hyp2f1,
    suite_geometry_partition,
    suite_kernel_mass,
    suite_kernel_pde,
    suite_poisson_identity,
    suite_poisson_duality,
    suite_expansion_roundtrip,
    suite_maximal_weak11,
    suite_fatou_smooth,
)


def run_suites(tolerances: dict, seed: int, workers: int = 1) -> list[dict]:
    """Run every suite; results come back in registry order regardless of workers."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    if workers <= 1:
        return [fn(tol, seed) for fn in SUITES]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, tol, seed) for fn in SUITES]
        return [f.result() for f in futures]
