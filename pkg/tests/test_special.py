import cmath
import math

import numpy as np
import pytest

from polyharm import DivergenceError, PoleError, SlowConvergenceError
from polyharm.special import (gamma, hyp2f1, hyp2f1_at_one, pochhammer)

# ---------------------------------------------------------------- oracles

_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
              -691.0 / 2730, 7.0 / 6, -3617.0 / 510)


def gamma_stirling(z: complex) -> complex:
    """Independent gamma oracle: recurrence shift + Stirling asymptotic series."""
    z = complex(z)
    shift = 0
    while (z + shift).real < 24.0:
        shift += 1
    w = z + shift
    series = (w - 0.5) * cmath.log(w) - w + 0.5 * math.log(2.0 * math.pi)
    for n, b2n in enumerate(_BERNOULLI, start=1):
        series += b2n / ((2 * n) * (2 * n - 1) * w ** (2 * n - 1))
    val = cmath.exp(series)
    for k in range(shift):
        val /= z + k
    return val


def hyp_series_direct(a, b, c, x, terms):
    """Plain term-by-term summation; every term rebuilt from scratch."""
    total = 0.0 + 0.0j
    for k in range(terms):
        term = 1.0 + 0.0j
        for i in range(k):
            term *= (a + i) * (b + i) * x / ((c + i) * (i + 1))
        total += term
    return total


def hyp_series_at_one_chunked(a, b, c, terms):
    """Partial sum of the series at x = 1 via vectorized ratio products."""
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    done = 0
    while done < terms:
        n = min(200_000, terms - done)
        k = np.arange(done, done + n, dtype=float)
        ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        chunk = term * np.cumprod(ratios)
        total += chunk.sum()
        term = chunk[-1]
        done += n
    return total


# ----------------------------------------------------------------- gamma

def test_gamma_known_values():
    assert gamma(1.0) == pytest.approx(1.0, abs=1e-14)
    assert gamma(0.5).real == pytest.approx(1.7724538509055159, rel=1e-13)
    assert gamma(5.0).real == pytest.approx(24.0, rel=1e-13)


def test_gamma_complex_against_stirling_oracle():
    want = gamma_stirling(2 + 3j)
    got = gamma(2 + 3j)
    assert abs(got - want) / abs(want) < 1e-11


def test_gamma_matches_oracle_on_strip(rng):
    for _ in range(100):
        z = complex(rng.uniform(-4, 8), rng.uniform(-10, 10))
        if abs(z.imag) < 0.2 and z.real < 0.5:
            continue  # stay clear of the pole line for the oracle comparison
        want = gamma_stirling(z)
        assert abs(gamma(z) - want) / abs(want) < 1e-11


def test_gamma_recurrence_property(rng):
    worst = 0.0
    count = 0
    while count < 1000:
        z = complex(rng.uniform(-5, 15), rng.uniform(-10, 10))
        if min(abs(z - k) for k in range(-6, 1)) < 0.05:
            continue
        count += 1
        lhs = gamma(z + 1)
        worst = max(worst, abs(lhs - z * gamma(z)) / abs(lhs))
    assert worst < 1e-12


def test_gamma_pole_raises():
    for z in (0.0, -1.0, -2.0, -17.0):
        with pytest.raises(PoleError):
            gamma(z)


def test_gamma_reflection_region():
    # Re z < 0.5 goes through the reflection formula
    z = -1.5 + 0.5j
    want = gamma_stirling(z)
    assert abs(gamma(z) - want) / abs(want) < 1e-11


# ------------------------------------------------------------- pochhammer

def test_pochhammer_basics():
    assert pochhammer(2.5 + 1j, 0) == 1.0
    assert pochhammer(1.0, 5) == 120.0
    assert pochhammer(-2.0, 3) == 0.0
    a = 0.3 - 0.7j
    assert pochhammer(a, 3) == pytest.approx(a * (a + 1) * (a + 2), rel=1e-15)


# ---------------------------------------------------------------- hyp2f1

def test_hyp2f1_at_zero_is_one_exactly(rng):
    for _ in range(20):
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        c = complex(rng.uniform(0.5, 3.0), rng.normal())
        assert hyp2f1(a, b, c, 0.0) == 1.0 + 0.0j


def test_hyp2f1_log_identity():
    # F(1, 1; 2; x) = -log(1-x)/x; frozen value at x = 1/2 is 2 log 2
    got = hyp2f1(1.0, 1.0, 2.0, 0.5)
    assert got.real == pytest.approx(1.3862943611198906, rel=1e-14)
    oracle = hyp_series_direct(1.0, 1.0, 2.0, 0.5, 200)
    assert abs(got - oracle) < 5e-15


def test_hyp2f1_swap_symmetry_bitwise(rng):
    for _ in range(50):
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        c = complex(rng.uniform(0.5, 3.0), rng.normal())
        x = rng.uniform(0.0, 0.95)
        assert hyp2f1(a, b, c, x) == hyp2f1(b, a, c, x)


def test_hyp2f1_gauss_summation_vs_long_series():
    # alpha = beta = 0.3: F(-0.3, -0.3; 1; 1) by the gamma formula against a
    # two-million-term direct partial sum (tail ~ K^{-1.6} is far below 1e-10)
    closed = hyp2f1_at_one(-0.3, -0.3, 1.0)
    partial = hyp_series_at_one_chunked(-0.3, -0.3, 1.0, 2_000_000)
    assert abs(closed - partial) < 1e-10
    want = gamma(1.0) * gamma(1.6) / (gamma(1.3) * gamma(1.3))
    assert abs(closed - want) < 1e-14


def test_hyp2f1_at_one_requires_convergence():
    with pytest.raises(DivergenceError):
        hyp2f1(1.0, 1.0, 1.5, 1.0)  # Re(a+b-c) = 0.5 >= 0


def test_hyp2f1_invalid_c():
    with pytest.raises(PoleError):
        hyp2f1(0.5, 0.5, -2.0, 0.3)


def test_hyp2f1_argument_range():
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, 1.2)
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, -0.1)


def test_hyp2f1_terminating_polynomial():
    # b = -2 terminates: F = 1 - 2*a*x/c + a(a+1)x^2/(c(c+1))  (two steps)
    a, c, x = 0.7, 1.9, 0.83
    want = 1.0 + (a * -2.0 / c) * x + (a * (a + 1) * (-2) * (-1) / (c * (c + 1)) / 2.0) * x**2
    assert hyp2f1(a, -2.0, c, x).real == pytest.approx(want, rel=1e-14)


def test_hyp2f1_slow_convergence_cap():
    with pytest.raises(SlowConvergenceError):
        # nonterminating, Re(c-a-b) < 1 so the near-one expansion cannot rescue it
        hyp2f1(0.45, 0.45, 1.0, 1.0 - 1e-9, max_terms=1000)


def test_hyp2f1_near_one_branch_matches_series():
    # crossover consistency: expansion around 1 against the long series;
    # the Taylor remainder is O((1-x)^1.6) so the two agree to ~1e-9 here
    a, b, c = 0.7, -0.3, 2.0
    x = 1.0 - 2e-6
    via_series = hyp2f1(a, b, c, x, max_terms=30_000_000)
    via_taylor = hyp2f1(a, b, c, x, max_terms=1000)
    assert abs(via_series - via_taylor) < 2e-9


def test_hyp2f1_contiguous_relation(rng):
    # (c-a) F(a-1) + (2a - c + (b-a)x) F(a) + a (x-1) F(a+1) = 0
    worst = 0.0
    for _ in range(100):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = complex(rng.uniform(0.5, 3.0), rng.uniform(-1, 1))
        x = rng.uniform(0.0, 0.9)
        f0 = hyp2f1(a, b, c, x)
        fm = hyp2f1(a - 1, b, c, x)
        fp = hyp2f1(a + 1, b, c, x)
        resid = (c - a) * fm + (2 * a - c + (b - a) * x) * f0 + a * (x - 1) * fp
        worst = max(worst, abs(resid) / max(1.0, abs(f0), abs(fm), abs(fp)))
    assert worst < 1e-10
