import math

import numpy as np
import pytest

from polyharm import AtomicMeasure, GridFunction, TorusGrid, TorusPoint, validate

# parameter sets used across the suite: classical, real positive, complex
PARAM_TRIPLE = {
    "classical": ([0.0], [0.0]),
    "real": ([0.3], [0.3]),
    "complex": ([0.5 + 2.0j], [0.5 - 1.0j]),
}


def params_1d(kind: str):
    a, b = PARAM_TRIPLE[kind]
    return validate(a, b)


def params_nd(kind: str, n: int):
    a, b = PARAM_TRIPLE[kind]
    return validate(a * n, b * n)


def random_measure(rng, n, max_atoms=8, unit=False):
    count = int(rng.integers(1, max_atoms + 1))
    atoms = []
    for _ in range(count):
        angles = rng.uniform(-math.pi, math.pi, size=n)
        w = complex(rng.normal(), rng.normal())
        atoms.append((TorusPoint(angles), w))
    mu = AtomicMeasure(atoms)
    if unit:
        mu = mu.scaled(1.0 / mu.total_variation)
    return mu


def random_trig(rng, grid: TorusGrid, degree: int, terms: int = 6, scale: float = 0.5):
    """Random trigonometric polynomial sampled on the grid; returns (GridFunction, modes)."""
    mesh = grid.angle_mesh()
    values = np.zeros(grid.sizes, dtype=complex)
    used = {}
    for _ in range(terms):
        m = tuple(int(v) for v in rng.integers(-degree, degree + 1, size=grid.n))
        c = complex(rng.normal(), rng.normal()) * scale / terms
        used[m] = used.get(m, 0.0) + c
        phase = np.zeros(grid.sizes)
        for ax in range(grid.n):
            phase = phase + m[ax] * mesh[ax]
        values += c * np.exp(1j * phase)
    return GridFunction(grid, values), used


def trig_eval(modes: dict, angles) -> complex:
    angles = np.asarray(angles, dtype=float)
    return complex(sum(c * np.exp(1j * float(np.dot(m, angles))) for m, c in modes.items()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
