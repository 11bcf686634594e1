import math

import numpy as np
import pytest

from polyharm import (GridCoarseWarning, PolyPoint, TorusGrid, TorusPoint,
                      boundary_convergence, dilate, dirichlet_solve,
                      duality_check, poisson_of_function, poisson_of_measure,
                      slice_extension, validate)
from polyharm.expansion import PureIndex
from polyharm.poisson import (AtomicMeasure, GridFunction, PoissonExtension,
                              dirichlet_residual, extension_of_pure_mode)
from polyharm import operators

from conftest import params_1d, random_measure, random_trig, trig_eval

PI = math.pi


# ------------------------------------------------------------- grid data

def test_gridfunction_norms():
    grid = TorusGrid([8])
    f = GridFunction(grid, np.full(8, 2.0 + 0.0j))
    assert f.lp_norm(1) == pytest.approx(2.0)
    assert f.lp_norm(2) == pytest.approx(2.0)
    assert f.lp_norm(math.inf) == pytest.approx(2.0)


def test_gridfunction_serialization_roundtrip(rng):
    grid = TorusGrid([4, 6])
    f = GridFunction(grid, rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6)))
    back = GridFunction.from_json_obj(f.to_json_obj())
    assert back.grid.sizes == f.grid.sizes
    assert np.array_equal(back.values, f.values)


def test_gridfunction_trig_interpolation(rng):
    grid = TorusGrid([32])
    f, modes = random_trig(rng, grid, degree=5)
    for _ in range(10):
        th = rng.uniform(-PI, PI)
        assert f.evaluate(TorusPoint([th])) == pytest.approx(
            trig_eval(modes, [th]), abs=1e-12)


def test_atomic_measure_merges_duplicates():
    pt = TorusPoint([0.3])
    mu = AtomicMeasure([(pt, 1.0), (pt, 2.0 + 1.0j), (TorusPoint([1.0]), -1.0)])
    assert len(mu.atoms) == 2
    assert mu.total_variation == pytest.approx(abs(3.0 + 1.0j) + 1.0)


# --------------------------------------------------------- basic values

def test_constant_data_classical_mean_value(rng):
    # alias floor of the rectangle rule is ~2 r^N: N = 512 keeps it below 1e-12
    p = validate([0.0], [0.0])
    grid = TorusGrid([512])
    ones = GridFunction(grid, np.ones(512, dtype=complex))
    for _ in range(5):
        z = PolyPoint([rng.uniform(0, 0.9)], [rng.uniform(-PI, PI)])
        assert poisson_of_function(p, ones, z) == pytest.approx(1.0, abs=1e-12)


def test_constant_data_general_params_profile_ratio(rng):
    # quadrature oracle at N = 1024 against the closed profile ratio
    from polyharm.special import hyp2f1, hyp2f1_at_one
    a, b = 0.5 + 2.0j, 0.5 - 1.0j
    p = validate([a], [b])
    grid = TorusGrid([1024])
    ones = GridFunction(grid, np.ones(1024, dtype=complex))
    for r in (0.0, 0.3, 0.8):
        z = PolyPoint([r], [1.1])
        got = poisson_of_function(p, ones, z)
        want = hyp2f1(-b, -a, 1.0, r * r) / hyp2f1_at_one(-b, -a, 1.0)
        assert abs(got - want) < 1e-8


def test_pure_mode_closed_form_two_axes(rng):
    p = validate([0.5 + 2j, 0.3], [0.5 - 1j, 0.3])
    grid = TorusGrid([128, 128])
    idx = PureIndex([1, 0], [0, 2])
    f = GridFunction.sample(grid, lambda t1, t2: np.exp(1j * t1) * np.exp(-2j * t2))
    for _ in range(5):
        z = PolyPoint(rng.uniform(0, 0.8, 2), rng.uniform(-PI, PI, 2))
        got = poisson_of_function(p, f, z)
        want = extension_of_pure_mode(p, idx, z)
        assert abs(got - want) < 1e-8


def test_poisson_of_measure_single_atom(rng):
    from polyharm import poisson_kernel
    p = validate([0.3, 0.0], [0.3, 0.0])
    mu = AtomicMeasure([(TorusPoint([0.0, 0.0]), 1.0)])
    for _ in range(5):
        z = PolyPoint(rng.uniform(0, 0.9, 2), rng.uniform(-PI, PI, 2))
        assert poisson_of_measure(p, mu, z) == pytest.approx(
            poisson_kernel(p, z, TorusPoint([0.0, 0.0])), rel=1e-14)


def test_poisson_of_measure_empty():
    p = validate([0.0], [0.0])
    mu = AtomicMeasure([])
    assert poisson_of_measure(p, mu, PolyPoint([0.5], [0.0])) == 0.0


def test_linearity(rng):
    p = validate([0.3], [0.3])
    grid = TorusGrid([64])
    f, _ = random_trig(rng, grid, 4)
    g, _ = random_trig(rng, grid, 4)
    a, b = 1.7 - 0.3j, -0.4 + 2.2j
    z = PolyPoint([0.6], [0.9])
    lhs = poisson_of_function(p, a * f + b * g, z)
    rhs = a * poisson_of_function(p, f, z) + b * poisson_of_function(p, g, z)
    assert abs(lhs - rhs) < 1e-13 * max(1.0, abs(lhs))


def test_coarse_grid_warning():
    p = validate([0.0], [0.0])
    grid = TorusGrid([16])
    ones = GridFunction(grid, np.ones(16, dtype=complex))
    with pytest.warns(GridCoarseWarning):
        poisson_of_function(p, ones, PolyPoint([0.9], [0.0]))


# --------------------------------------------------------------- dilate

def test_dilate_zero_radius_gives_center_value(rng):
    p = validate([0.3, 0.3], [0.3, 0.3])
    grid = TorusGrid([16, 16])
    f, _ = random_trig(rng, grid, 3)
    ext = PoissonExtension(p, f)
    u0 = dilate(ext, 0.0)
    center = poisson_of_function(p, f, PolyPoint([0.0, 0.0], [0.0, 0.0]))
    assert np.allclose(u0.values, center, atol=1e-12)


def test_dilate_classical_cosine():
    p = validate([0.0], [0.0])
    grid = TorusGrid([64])
    f = GridFunction.sample(grid, lambda th: np.cos(th).astype(complex))
    ext = PoissonExtension(p, f)
    for r in (0.2, 0.5, 0.9):
        ur = dilate(ext, r)
        want = r * np.cos(grid.axis_angles(0))
        assert np.allclose(ur.values, want, atol=1e-12)


def test_dilate_methods_agree(rng):
    p = validate([0.5 + 2j], [0.5 - 1j])
    grid = TorusGrid([128])
    f, _ = random_trig(rng, grid, 6)
    ext = PoissonExtension(p, f)
    for r in (0.3, 0.7):
        a = dilate(ext, r, method="conv")
        b = dilate(ext, r, method="spectral")
        assert np.abs(a.values - b.values).max() < 1e-11


def test_dilate_norm_contraction(rng):
    # ||u_r||_p <= K ||f||_p for p in {1, 2, inf}
    for kind in ("classical", "real", "complex"):
        p = params_1d(kind)
        grid = TorusGrid([128])
        f, _ = random_trig(rng, grid, 8)
        ext = PoissonExtension(p, f)
        for r in (0.2, 0.8, 0.97):
            ur = dilate(ext, r)
            for norm in (1, 2, math.inf):
                assert ur.lp_norm(norm) <= p.mass_bound * f.lp_norm(norm) * (1 + 1e-10)


def test_dilate_measure_l1_bound(rng):
    # ||u_r||_1 <= K ||mu||
    p = validate([0.5 + 2j, 0.3], [0.5 - 1j, 0.3])
    grid = TorusGrid([64, 64])
    for _ in range(5):
        mu = random_measure(rng, 2, 5)
        ext = PoissonExtension(p, mu)
        ur = dilate(ext, rng.uniform(0.0, 0.9, size=2), grid=grid)
        assert ur.lp_norm(1) <= p.mass_bound * mu.total_variation * (1 + 1e-8)


# -------------------------------------------------------------- duality

def test_duality_single_atoms():
    p = validate([0.5 + 2j, 0.3], [0.5 - 1j, 0.3])
    mu = AtomicMeasure([(TorusPoint([0.4, -1.0]), 1.0)])
    nu = AtomicMeasure([(TorusPoint([-2.2, 0.8]), 1.0)])
    assert duality_check(p, mu, nu, [0.7, 0.5]) < 1e-12


def test_duality_random_pairs(rng):
    p = validate([0.5 + 2j, 0.3], [0.5 - 1j, 0.3])
    for _ in range(50):
        mu = random_measure(rng, 2, 5)
        nu = random_measure(rng, 2, 5)
        assert duality_check(p, mu, nu, rng.uniform(0, 0.9, 2)) < 1e-10


def test_duality_uniform_discretization_matches_quadrature(rng):
    # nu = uniform 64-atom discretization of the circle measure: the atom-sum
    # side reproduces the quadrature of u_r against the grid to 1e-8
    p = validate([0.3], [0.3])
    mu = random_measure(rng, 1, 3)
    grid = TorusGrid([64])
    nu = AtomicMeasure([(TorusPoint([th]), 1.0 / 64) for th in grid.axis_angles(0)])
    r = [0.6]
    lhs = sum(w * poisson_of_measure(p, mu, PolyPoint(r, pt.angles))
              for pt, w in nu.atoms)
    ur = dilate(PoissonExtension(p, mu), r, grid=grid)
    quad = np.mean(ur.values)
    assert abs(lhs - quad) < 1e-8


# ------------------------------------------------------------- dirichlet

def test_dirichlet_classical_cosine():
    p = validate([0.0], [0.0])
    grid = TorusGrid([64])
    f = GridFunction.sample(grid, lambda th: np.cos(th).astype(complex))
    vals = dirichlet_solve(p, f, [PolyPoint([0.5], [0.0])])
    assert vals[0] == pytest.approx(0.5, abs=1e-12)


def test_dirichlet_pure_mode_closed_form(rng):
    p = validate([0.3, 0.3], [0.3, 0.3])
    grid = TorusGrid([64, 64])
    idx = PureIndex([2, 0], [0, 1])
    f = GridFunction.sample(grid, lambda t1, t2: np.exp(2j * t1) * np.exp(-1j * t2))
    queries = [PolyPoint(rng.uniform(0, 0.7, 2), rng.uniform(-PI, PI, 2))
               for _ in range(5)]
    vals = dirichlet_solve(p, f, queries)
    for z, got in zip(queries, vals):
        assert abs(got - extension_of_pure_mode(p, idx, z)) < 1e-8


def test_dirichlet_residual_order(rng):
    p = validate([0.3], [0.3])
    grid = TorusGrid([64])
    f, _ = random_trig(rng, grid, 3)
    ext = PoissonExtension(p, f)

    def scalar(zv):
        return ext.at(PolyPoint.from_complex(zv))

    z = [0.3 * np.exp(0.8j)]
    r1, r2, order = operators.convergence_order(scalar, p.alpha, p.beta, z, h=1e-3)
    assert 1.7 <= order <= 2.3 or max(r1, r2) < 1e-9
    assert dirichlet_residual(p, f, PolyPoint([0.3], [0.8])) < 1e-5


# ------------------------------------------------- boundary convergence

def test_boundary_convergence_decreasing(rng):
    p = validate([0.3, 0.3], [0.3, 0.3])
    grid = TorusGrid([32, 32])
    f, _ = random_trig(rng, grid, 3, scale=0.3)
    for norm in (1, 2, math.inf):
        seq = boundary_convergence(p, f, norm, [0.5, 0.9, 0.99])
        assert seq[0] > seq[1] > seq[2]


def test_boundary_convergence_constant_data():
    from polyharm.special import hyp2f1, hyp2f1_at_one
    a, b = 0.3, 0.3
    p = validate([a], [b])
    grid = TorusGrid([32])
    ones = GridFunction(grid, np.ones(32, dtype=complex))
    ladder = [0.5, 0.9, 0.99]
    seq = boundary_convergence(p, ones, math.inf, ladder)
    for r, err in zip(ladder, seq):
        want = abs(hyp2f1(-b, -a, 1.0, r * r) / hyp2f1_at_one(-b, -a, 1.0) - 1.0)
        assert err == pytest.approx(want, rel=1e-8, abs=1e-12)
    assert seq[-1] < 1e-2


def test_weak_star_convergence_spot(rng):
    # <u_r, phi dm> -> <phi, d mu>.  Through the (independently tested)
    # pairing identity <u_r, phi dm> = sum_k w_k (P_swap[phi])(r xi_k), with
    # the swapped extension evaluated exactly on its band: the sequence shows
    # the true weak* gap with no quadrature floor.
    from polyharm.fatou import _GridEvaluator
    p = validate([0.3], [0.3])
    mu = random_measure(rng, 1, 4)
    grid = TorusGrid([64])
    phi, modes = random_trig(rng, grid, 3)
    target = sum(w * trig_eval(modes, pt.angles) for pt, w in mu.atoms)
    ev = _GridEvaluator(p.swapped(), phi)
    errs = []
    for r in (0.9, 0.99, 0.999, 0.9999):
        pairing = sum(w * ev.at(PolyPoint([r], pt.angles)) for pt, w in mu.atoms)
        errs.append(abs(pairing - target))
    assert errs[0] > errs[1] > errs[2] > errs[3]
    assert errs[-1] < 1e-2 * max(1.0, abs(target))
    # quadrature cross-check of the pairing at moderate radius
    big = TorusGrid([4096])
    phi_big = GridFunction.sample(big, lambda th: sum(
        c * np.exp(1j * m[0] * th) for m, c in modes.items()))
    ur = dilate(PoissonExtension(p, mu), [0.9], grid=big)
    quad = np.mean(ur.values * phi_big.values)
    pairing = sum(w * ev.at(PolyPoint([0.9], pt.angles)) for pt, w in mu.atoms)
    assert abs(quad - pairing) < 1e-8


def test_reproducing_limit_diagnostic(rng):
    # |P[u_r](z) - u(z)| decreases ~ linearly in 1-r for generic data
    p = validate([0.3], [0.3])
    grid = TorusGrid([64])
    f, _ = random_trig(rng, grid, 3)
    ext = PoissonExtension(p, f)
    z = PolyPoint([0.4], [0.7])
    u_z = ext.at(z)
    errs = []
    for r in (0.9, 0.99, 0.999):
        ur = dilate(ext, r, method="spectral")
        errs.append(abs(poisson_of_function(p, ur, z) - u_z))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_local_continuity_at_good_point():
    # data vanishing and continuous at 1, with a jump elsewhere: u -> 0 at 1
    p = validate([0.5 + 2j], [0.5 - 1j])
    grid = TorusGrid([8192])
    f = GridFunction.sample(grid, lambda th: (np.abs(th) / PI).astype(complex))
    vals = []
    for k in (3, 5, 7, 8):
        r = 1.0 - 2.0**-k
        z = PolyPoint([r], [0.5 * (1 - r)])
        vals.append(abs(poisson_of_function(p, f, z)))
    assert vals[-1] < vals[0]
    assert vals[-1] < 0.05


# ---------------------------------------------------------------- slices

def test_slice_interior_center_matches_average(rng):
    # fixing z_2 = 0 leaves the 1-D extension of the weighted zeta_2-average
    p = validate([0.3, 0.5], [0.3, 0.1])
    grid = TorusGrid([32, 32])
    f, _ = random_trig(rng, grid, 3)
    sliced = slice_extension(p, f, {1: 0.0})
    sub = validate([0.3], [0.3])
    avg = f.values.mean(axis=1) * p.c[1]
    want = GridFunction(TorusGrid([32]), avg)
    assert np.abs(sliced.data.values - want.values).max() < 1e-12
    z1 = PolyPoint([0.5], [0.3])
    direct = poisson_of_function(p, f, PolyPoint([0.5, 0.0], [0.3, 0.0]))
    assert abs(sliced.at(z1) - direct) < 1e-10


def test_slice_boundary_product_data():
    # product data phi(z1) psi(z2) with zeta_2 fixed on the boundary:
    # the slice extension is psi(zeta_2) times the 1-D extension of phi
    p = validate([0.3, 0.3], [0.3, 0.3])
    grid = TorusGrid([32, 32])
    f = GridFunction.sample(
        grid, lambda t1, t2: (1 + 0.5 * np.exp(1j * t1)) * (2 + np.exp(-1j * t2)))
    theta2 = 0.0
    sliced = slice_extension(p, f, {1: np.exp(1j * theta2)})
    psi_at = 2 + np.exp(-1j * theta2)
    sub = validate([0.3], [0.3])
    phi_grid = GridFunction.sample(TorusGrid([32]),
                                   lambda t1: 1 + 0.5 * np.exp(1j * t1))
    for r, th in [(0.0, 0.0), (0.5, 1.0), (0.8, -2.0)]:
        z = PolyPoint([r], [th])
        want = psi_at * poisson_of_function(sub, phi_grid, z)
        assert abs(sliced.at(z) - want) < 1e-10


def test_slice_measure_interior():
    p = validate([0.3, 0.3], [0.3, 0.3])
    mu = AtomicMeasure([(TorusPoint([0.5, -1.0]), 2.0), (TorusPoint([-2.0, 0.3]), 1j)])
    sliced = slice_extension(p, mu, {1: 0.4 + 0.1j})
    z1 = PolyPoint([0.6], [0.2])
    direct = poisson_of_measure(p, mu, PolyPoint.from_complex([0.6 * np.exp(0.2j), 0.4 + 0.1j]))
    assert abs(sliced.at(z1) - direct) < 1e-12


def test_slice_pde_residual(rng):
    p = validate([0.3, 0.5], [0.3, 0.1])
    grid = TorusGrid([32, 32])
    f, _ = random_trig(rng, grid, 3)
    sliced = slice_extension(p, f, {1: 0.3 + 0.2j})

    def scalar(zv):
        return sliced.at(PolyPoint.from_complex(zv))

    sub = sliced.params
    r1, r2, order = operators.convergence_order(scalar, sub.alpha, sub.beta,
                                                [0.35 * np.exp(0.4j)], h=1e-3)
    assert 1.7 <= order <= 2.3 or max(r1, r2) < 1e-9
