"""Acceptance gate: the seven headline criteria at their stated tolerances.

Each criterion is one test, so a verbose run prints one pass/fail line per
criterion; every test additionally prints a [PASS]/[FAIL] summary with the
measured numbers (shown with -s, or automatically on failure).  Everything
here runs at the full default scale (R_max = 30, M = 3000); wall-clock
budgets are enforced with time.perf_counter.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from conftest import forced_pairing_cases, smooth_functions
from neharipde.cli import DEFAULT_LAMBDAS, run_sweep
from neharipde.config import RunConfig, build_spec, default_config
from neharipde.fibering import fiber_profile, find_T
from neharipde.grid import (
    RadialGrid,
    energy,
    energy_gradient,
    lp_norm,
    pairing,
    v_norm_sq,
)
from neharipde.nonlinearity import default_params, verify_hypotheses
from neharipde.solver import (
    homogeneous_ground_state,
    small_branch_norm_bound,
    solve_minus,
    solve_plus,
)


def check(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def cfg0() -> RunConfig:
    return default_config()


@pytest.fixture(scope="module")
def spec0(cfg0):
    spec = build_spec(cfg0)
    spec.validate(require_negative_V=True)
    return spec


@pytest.fixture(scope="module")
def timed_reports(spec0):
    """The four reference solves at default scale, each individually timed."""
    out = {}
    for name, call in (
        ("free", lambda: homogeneous_ground_state(spec0.free())),
        ("hom", lambda: homogeneous_ground_state(spec0.homogeneous())),
        ("plus", lambda: solve_plus(spec0)),
    ):
        t0 = time.perf_counter()
        out[name] = call()
        out[name + "_time"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    out["minus"] = solve_minus(spec0, seed_direction=out["hom"].solution)
    # Charge the seed preparation to the minus solve: it is part of the cost.
    out["minus_time"] = time.perf_counter() - t0 + out["hom_time"]
    return out


def test_criterion_1_hypothesis_suite():
    t0 = time.perf_counter()
    report = verify_hypotheses(default_params(), s_grid=np.geomspace(1e-6, 1e6, 1000))
    elapsed = time.perf_counter() - t0
    c = report.coefficients
    ident = abs(c.A + c.B + c.C + c.D - 5.5 * 4.5 * 3.5) / (5.5 * 4.5 * 3.5)
    min_margin = min(report.margins.values())
    ok = (report.passed and report.checked_points == 1000
          and min_margin > 0.0 and ident <= 1e-12 and elapsed < 1.0)
    check("hypothesis suite", ok,
          f"1000 points, min margin {min_margin:.3e}, "
          f"identity defect {ident:.2e}, {elapsed:.2f}s")


def test_criterion_2_gradient_oracle(spec0):
    t0 = time.perf_counter()
    grid = spec0.grid
    us = smooth_functions(grid, 50, seed=5, amplitude=0.5)
    vs = smooth_functions(grid, 50, seed=6, amplitude=0.5)
    worst = 0.0
    for u, v in zip(us, vs):
        lhs = pairing(energy_gradient(u, spec0), v)
        eps = 1e-6 * (1.0 + u.max_abs()) / (1.0 + v.max_abs())
        fd = (energy(u + eps * v, spec0) - energy(u + (-eps) * v, spec0)) / (2.0 * eps)
        worst = max(worst, abs(lhs - fd) / max(abs(fd), 1e-10))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10.0
    check("gradient oracle", ok,
          f"50 pairs at M={grid.M}, max relative error {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_fibering_trichotomy():
    from oracles import dense_scan_roots, make_dphi_scan

    t0 = time.perf_counter()
    cfg = RunConfig(R_max=20.0, M=320)
    spec = build_spec(cfg)
    grid = spec.grid
    p, q = spec.params.p, spec.params.q
    worst = 0.0
    two_root = 0
    for u, g, _ in forced_pairing_cases(grid, spec, 300, seed=97):
        case_spec = spec.with_g(g)
        prof = fiber_profile(u, case_spec)
        dphi = make_dphi_scan(p, q, u.values, grid.weights,
                              v_norm_sq(u, case_spec), pairing(g, u))
        roots = dense_scan_roots(dphi)
        ours = sorted(t for t in (prof.t2, prof.t1) if t is not None)
        assert len(roots) == len(ours), f"root count {len(ours)} vs scan {len(roots)}"
        for mine, scan in zip(ours, roots):
            worst = max(worst, abs(mine - scan) / scan)
        if prof.t2 is not None:
            two_root += 1
            T = find_T(u, case_spec)
            assert prof.t2 < T < prof.t1 < prof.t0
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and two_root > 0 and elapsed < 30.0
    check("fibering trichotomy", ok,
          f"300 cases ({two_root} two-root), max root deviation {worst:.2e}, "
          f"{elapsed:.1f}s")


def test_criterion_4_two_solution_reproduction(spec0, timed_reports):
    plus, minus = timed_reports["plus"], timed_reports["minus"]
    tol = 1e-8 * (1.0 + spec0.g.max_abs())
    min_plus = float(np.min(plus.solution.values))
    min_minus = float(np.min(minus.solution.values))
    ok = (plus.residual <= tol and minus.residual <= tol
          and plus.energy < 0.0 < minus.energy
          and min_plus >= -1e-8 and min_minus >= -1e-8
          and timed_reports["plus_time"] < 60.0
          and timed_reports["minus_time"] < 60.0)
    check("two-solution reproduction", ok,
          f"residuals {plus.residual:.2e}/{minus.residual:.2e} (tol {tol:.2e}), "
          f"energies {plus.energy:.4f}/{minus.energy:.4f}, "
          f"min values {min_plus:.1e}/{min_minus:.1e}, "
          f"{timed_reports['plus_time']:.1f}s/{timed_reports['minus_time']:.1f}s")


def test_criterion_5_level_ordering(cfg0, timed_reports):
    m_V = timed_reports["hom"].energy
    m_0 = timed_reports["free"].energy
    m_g = timed_reports["plus"].energy
    m_1g = timed_reports["minus"].energy
    gap = m_0 - m_V
    spec2 = build_spec(cfg0, grid_refine=2)
    gap2 = (homogeneous_ground_state(spec2.free()).energy
            - homogeneous_ground_state(spec2.homogeneous()).energy)
    drift = abs(gap2 - gap) / gap
    ok = (0.0 < m_V < m_0 and gap > 0.0 and drift <= 0.02 and m_1g < m_g + m_0)
    check("level ordering", ok,
          f"m_V={m_V:.6f} < m_0={m_0:.6f}, gap drift under M->2M {drift:.2e}, "
          f"m_1g={m_1g:.6f} < m_g+m_0={m_g + m_0:.6f}")


def test_criterion_6_limits_sweep(cfg0, spec0, timed_reports, tmp_path):
    t0 = time.perf_counter()
    records = run_sweep(cfg0, tmp_path, lambdas=DEFAULT_LAMBDAS)
    elapsed = time.perf_counter() - t0
    N = cfg0.N
    bound_M = small_branch_norm_bound(spec0)
    g0_norm = lp_norm(spec0.g, 2.0 * N / (N + 2.0))
    m_V = timed_reports["hom"].energy
    norm_ok = all(r.u_plus_norm <= bound_M * r.lam * g0_norm for r in records)
    devs = [abs(r.m_1g - m_V) for r in records]
    decreasing = all(a > b for a, b in zip(devs, devs[1:]))
    final_ok = devs[-1] <= 1e-3 * m_V
    ok = norm_ok and decreasing and final_ok and elapsed < 900.0
    check("limits sweep", ok,
          f"11 scales, norm bound M={bound_M:.3f} held: {norm_ok}, "
          f"|m_1g - m_V| decreasing: {decreasing}, "
          f"final {devs[-1]:.3e} <= {1e-3 * m_V:.3e}, {elapsed:.0f}s")


def test_criterion_7_uniqueness_probe(spec0):
    starts = [None] + smooth_functions(spec0.grid, 9, seed=13, amplitude=0.05)
    solutions = [solve_plus(spec0, u0=u0).solution for u0 in starts]
    worst = max(
        math.sqrt(v_norm_sq(a + (-1.0) * b, spec0))
        for a, b in itertools.combinations(solutions, 2))
    ok = worst <= 1e-6
    check("uniqueness probe", ok,
          f"10 starts, max pairwise V-norm distance {worst:.2e}")
