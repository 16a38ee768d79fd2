"""Shared fixtures: small grids, default problem data, random smooth functions."""

from __future__ import annotations

import math

import numpy as np
import pytest

from neharipde.config import RunConfig, build_spec
from neharipde.grid import GridFunction, ProblemSpec, RadialGrid, pairing, v_norm_sq
from neharipde.nonlinearity import default_params


@pytest.fixture(scope="session")
def params():
    return default_params()


@pytest.fixture(scope="session")
def small_grid():
    return RadialGrid(3, 12.0, 300)


@pytest.fixture(scope="session")
def med_grid():
    return RadialGrid(3, 20.0, 800)


@pytest.fixture(scope="session")
def med_cfg():
    return RunConfig(R_max=20.0, M=800)


@pytest.fixture(scope="session")
def med_spec(med_cfg) -> ProblemSpec:
    """Default Gaussian well and small Gaussian forcing on the medium grid."""
    return build_spec(med_cfg)


@pytest.fixture(scope="session")
def free_spec(med_grid, params) -> ProblemSpec:
    zero = med_grid.zeros()
    return ProblemSpec(params, zero, zero)


def smooth_functions(grid: RadialGrid, n: int, seed: int, bumps: int = 4,
                     amplitude: float = 1.0) -> list[GridFunction]:
    """Deterministic random sums of Gaussian bumps, for property tests."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        vals = np.zeros_like(grid.nodes)
        for _ in range(bumps):
            center = rng.uniform(0.0, grid.R_max * 0.6)
            width = rng.uniform(0.3, 3.0)
            amp = rng.uniform(-amplitude, amplitude)
            vals += amp * np.exp(-((grid.nodes - center) / width) ** 2)
        out.append(grid.function(vals))
    return out


def unit_direction(u: GridFunction, spec: ProblemSpec) -> GridFunction:
    return (1.0 / math.sqrt(v_norm_sq(u, spec))) * u


def forced_pairing_cases(grid: RadialGrid, spec: ProblemSpec, n: int,
                         seed: int) -> list[tuple[GridFunction, GridFunction, int]]:
    """(u, g, sign) triples with the sign of <g, u> forced to -1, 0, +1."""
    us = smooth_functions(grid, n, seed=seed)
    gs = smooth_functions(grid, n, seed=seed + 1000, amplitude=0.05)
    out = []
    for i, (u, g_raw) in enumerate(zip(us, gs)):
        want = (-1, 0, 1)[i % 3]
        pair = pairing(g_raw, u)
        if want == 0:
            shift = pair / pairing(u, u)
            g = g_raw + (-shift) * u
        elif pair == 0.0:
            g = g_raw + 0.01 * want * u
        else:
            g = g_raw if (pair > 0) == (want > 0) else (-1.0) * g_raw
        out.append((u, g, want))
    return out
