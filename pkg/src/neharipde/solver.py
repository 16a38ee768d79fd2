"""Two-branch solver for  -Lap u + V u = f'(u) + g  on the radial grid.

The forced problem has two distinguished solutions when the forcing is
small: a small one u_g on the convex branch of the Nehari set (a
perturbation of zero, negative energy) and a large one u_{1,g} on the
concave branch (a perturbation of the unforced ground state, positive
energy).  They are computed by different routes:

  solve_plus   damped fixed-point iteration u <- (-Lap + V)^{-1} (f'(u)+g)
               starting from zero, finished by Newton steps.  The inverse
               operator has nonnegative kernel, so for g >= 0 every
               iterate stays nonnegative.

  solve_minus  descent over unit directions w of the reduced functional
               w -> E(t1(w) w), where t1 re-projects the ray onto the
               concave branch at every step; the descent is preconditioned
               by (-Lap + V)^{-1} and finished by Newton steps.

  homogeneous_ground_state
               the same reduced descent with g = 0, used for the unforced
               levels (with and without potential) that calibrate the
               forced ones.

Newton polishing acts on the raw PDE residual, so a converged report
certifies the equation itself, not just stationarity of the reduced
descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import solve_banded

from .fibering import FiberingError, fiber_profile, phi
from .grid import (
    GridFunction,
    ProblemSpec,
    energy,
    energy_gradient,
    invert_linear,
    stiffness_banded,
    v_inner,
    v_norm_sq,
)
from .nonlinearity import eval_f

__all__ = [
    "SolveReport",
    "SolverError",
    "solve_plus",
    "solve_minus",
    "homogeneous_ground_state",
    "mass_escape_diagnostic",
    "small_branch_norm_bound",
]

RESIDUAL_TOL = 1e-8
ITERATION_CAP = 100_000


class SolverError(RuntimeError):
    """Iteration failed to converge or converged to an inadmissible state."""


@dataclass(frozen=True)
class SolveReport:
    """Converged solution with its certificates.

    residual is the max-norm of the nodewise PDE residual.  nehari_defect
    is |<E'(u), u>| (zero on the manifold).  second_variation_along_ray is
    the second t-derivative of the ray energy at t = 1: positive on the
    convex branch, negative on the concave one.  mass_escape is the
    fraction of the Dirichlet integral beyond half the domain radius, a
    cheap indicator of solutions pressing against the artificial boundary.
    """

    solution: GridFunction
    energy: float
    branch: Literal["plus", "minus", "homogeneous"]
    residual: float
    nehari_defect: float
    second_variation_along_ray: float
    iterations: int
    mass_escape: float
    norm_V: float


def mass_escape_diagnostic(u: GridFunction, rho: float | None = None) -> float:
    """Fraction of int |grad u|^2 carried by faces beyond radius rho.

    Defaults to rho = R_max / 2.  Returns 0 for the zero function.
    """
    g = u.grid
    if rho is None:
        rho = 0.5 * g.R_max
    du = np.diff(u.values)
    contrib = g.face_areas[1:-1] * du * du / g.h
    boundary = g.face_areas[-1] * 2.0 * u.values[-1] ** 2 / g.h
    total = float(np.sum(contrib)) + boundary
    if total <= 0.0:
        return 0.0
    outside = float(np.sum(contrib[g.faces[1:-1] > rho]))
    if g.faces[-1] > rho:
        outside += boundary
    return float(min(max(outside / total, 0.0), 1.0))


def small_branch_norm_bound(spec: ProblemSpec) -> float:
    """Constant M in the a-priori bound ||u_g||_V <= M ||g||_{2N/(N+2)}.

    Chains the superquadraticity constant mu1 with the certified Sobolev
    embedding and the V-norm equivalence:
        (1/2 - 1/mu1) ||u||_V^2 < (1 - 1/mu1) int g u
    and int g u <= ||g||_{2N/(N+2)} ||u||_{2*} <= C ||g|| ||u||_V.
    """
    from .grid import norm_equivalence_ratio, sobolev_constant

    mu1 = spec.params.mu1
    S = sobolev_constant(spec.grid)
    ratio = norm_equivalence_ratio(spec)
    if ratio >= 1.0:
        raise SolverError("norm equivalence fails: ||V||_{N/2} >= S")
    embed = (S * (1.0 - ratio)) ** -0.5
    return (1.0 - 1.0 / mu1) / (0.5 - 1.0 / mu1) * embed


def _scale(spec: ProblemSpec) -> float:
    return 1.0 + spec.g.max_abs()


def _residual(u: GridFunction, spec: ProblemSpec) -> tuple[GridFunction, float]:
    r = energy_gradient(u, spec)
    return r, r.max_abs()


def _newton_polish(u: GridFunction, spec: ProblemSpec, tol: float,
                   max_iter: int = 80) -> tuple[GridFunction, int, float]:
    """Damped Newton on the PDE residual; returns (u, steps, final max residual)."""
    g = u.grid
    main, off = stiffness_banded(g)
    w = g.weights
    res, rmax = _residual(u, spec)
    for k in range(max_iter):
        if rmax <= tol:
            return u, k, rmax
        curv = eval_f(spec.params, u.values, 2)
        ab = np.zeros((3, g.M))
        ab[0, 1:] = off
        ab[1, :] = main + w * (spec.V.values - curv)
        ab[2, :-1] = off
        try:
            delta = solve_banded((1, 1), ab, w * res.values)
        except np.linalg.LinAlgError as exc:
            raise SolverError("Newton system is singular") from exc
        l2 = math.sqrt(float(w @ res.values**2))
        eta = 1.0
        while eta >= 1e-10:
            u_try = GridFunction(g, u.values - eta * delta)
            res_try, rmax_try = _residual(u_try, spec)
            l2_try = math.sqrt(float(w @ res_try.values**2))
            if l2_try < l2 * (1.0 - 0.25 * eta) or rmax_try <= tol:
                u, res, rmax = u_try, res_try, rmax_try
                break
            eta *= 0.5
        else:
            raise SolverError(
                f"Newton stalled at residual {rmax:.3e} (tolerance {tol:.3e})")
    if rmax > tol:
        raise SolverError(f"Newton did not reach tolerance: {rmax:.3e} > {tol:.3e}")
    return u, max_iter, rmax


def _normalize(w: GridFunction, spec: ProblemSpec) -> GridFunction:
    n = math.sqrt(v_norm_sq(w, spec))
    if n == 0.0 or not math.isfinite(n):
        raise SolverError("cannot normalize a degenerate direction")
    return (1.0 / n) * w


def _minus_time(w: GridFunction, spec: ProblemSpec) -> float:
    prof = fiber_profile(w, spec)
    if prof.t1 is None:
        raise FiberingError(f"concave branch missing along this ray ({prof.case})")
    return prof.t1


def _reduced_descent(spec: ProblemSpec, w: GridFunction, tol_descent: float,
                     max_steps: int, keep_nonnegative: bool,
                     on_accept=None) -> tuple[GridFunction, int]:
    """Minimize E(t1(w) w) over unit directions w.

    Steps move against the (-Lap+V)^{-1}-preconditioned energy gradient,
    projected tangent to the unit sphere of the V-norm, with an Armijo
    backtracking line search on the reduced energy.  If the forcing is
    nonnegative and the direction picks up sign changes, the absolute
    value is tried as a replacement whenever it does not increase the
    reduced energy (rays through |w| reach at least as low).

    on_accept, when given, is called with each accepted constrained
    iterate (including the initial projection); it exists for descent
    diagnostics and owes the caller nothing about convergence.
    """
    w = _normalize(w, spec)
    t = _minus_time(w, spec)
    u = t * w
    J = energy(u, spec)
    if on_accept is not None:
        on_accept(u)
    alpha = 1.0
    steps = 0
    for steps in range(1, max_steps + 1):
        res, rmax = _residual(u, spec)
        if rmax <= tol_descent:
            break
        G = invert_linear(res, spec)
        coeff = v_inner(G, w, spec)
        d = G - coeff * w
        dn2 = v_inner(d, d, spec)
        if dn2 <= 0.0:
            break
        accepted = False
        while alpha >= 1e-12:
            try:
                w_try = _normalize(w - alpha * d, spec)
                t_try = _minus_time(w_try, spec)
            except (FiberingError, SolverError):
                alpha *= 0.5
                continue
            u_try = t_try * w_try
            J_try = energy(u_try, spec)
            if J_try <= J - 1e-4 * alpha * dn2:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        w, u, J = w_try, u_try, J_try
        alpha = min(alpha * 2.0, 1.0)
        if keep_nonnegative and float(np.min(w.values)) < 0.0:
            try:
                w_abs = _normalize(w.abs(), spec)
                t_abs = _minus_time(w_abs, spec)
                u_abs = t_abs * w_abs
                J_abs = energy(u_abs, spec)
                if J_abs <= J:
                    w, u, J = w_abs, u_abs, J_abs
            except (FiberingError, SolverError):
                pass
        if on_accept is not None:
            on_accept(u)
    return u, steps


def _default_seed_direction(spec: ProblemSpec) -> GridFunction:
    r = spec.grid.nodes
    return spec.grid.function(np.exp(-0.5 * r * r))


def _finish(u: GridFunction, spec: ProblemSpec,
            branch: Literal["plus", "minus", "homogeneous"],
            iters: int, tol: float) -> SolveReport:
    res, rmax = _residual(u, spec)
    defect = abs(float(u.grid.weights @ (res.values * u.values)))
    report = SolveReport(
        solution=u,
        energy=energy(u, spec),
        branch=branch,
        residual=rmax,
        nehari_defect=defect,
        second_variation_along_ray=phi(u, spec, 1.0, 2),
        iterations=iters,
        mass_escape=mass_escape_diagnostic(u),
        norm_V=math.sqrt(v_norm_sq(u, spec)),
    )
    if rmax > tol:
        raise SolverError(f"converged report failed its own tolerance: {rmax:.3e}")
    return report


def homogeneous_ground_state(spec: ProblemSpec,
                             seed_direction: GridFunction | None = None,
                             tol: float = RESIDUAL_TOL,
                             on_accept=None) -> SolveReport:
    """Ground state of the unforced equation -Lap u + V u = f'(u).

    The forcing of `spec` must vanish identically; pass spec.homogeneous()
    or spec.free().  The state is the minimizer of the energy over its
    Nehari set, found by reduced descent plus Newton.
    """
    if spec.g.max_abs() != 0.0:
        raise ValueError("homogeneous solve requires g identically zero")
    w0 = seed_direction if seed_direction is not None else _default_seed_direction(spec)
    u, steps = _reduced_descent(spec, w0, tol_descent=max(1e-5, 10.0 * tol),
                                max_steps=400, keep_nonnegative=True,
                                on_accept=on_accept)
    u, newton_steps, _ = _newton_polish(u, spec, tol)
    if float(np.min(u.values)) < 0.0:
        u = GridFunction(u.grid, np.abs(u.values))
        u, extra, _ = _newton_polish(u, spec, tol)
        newton_steps += extra
    report = _finish(u, spec, "homogeneous", steps + newton_steps, tol)
    if report.energy <= 0.0:
        raise SolverError(f"unforced ground level must be positive, got {report.energy:g}")
    return report


def solve_minus(spec: ProblemSpec,
                seed_direction: GridFunction | None = None,
                tol_rel: float = RESIDUAL_TOL,
                on_accept=None) -> SolveReport:
    """Large solution on the concave Nehari branch.

    seed_direction defaults to a centered bump; passing the unforced
    ground state (which the sweep reuses across forcing amplitudes) costs
    one homogeneous solve and starts the descent next to the answer.
    """
    spec.validate()
    tol = tol_rel * _scale(spec)
    g_nonneg = float(np.min(spec.g.values)) >= 0.0
    if seed_direction is None:
        seed = homogeneous_ground_state(spec.homogeneous()).solution
    else:
        seed = seed_direction
    u, steps = _reduced_descent(spec, seed, tol_descent=max(1e-5, 10.0 * tol),
                                max_steps=400, keep_nonnegative=g_nonneg,
                                on_accept=on_accept)
    u, newton_steps, _ = _newton_polish(u, spec, tol)
    report = _finish(u, spec, "minus", steps + newton_steps, tol)
    if report.second_variation_along_ray >= 0.0:
        raise SolverError("minus-branch solve landed on the convex branch")
    if report.energy <= 0.0:
        raise SolverError(f"concave-branch energy must be positive, got {report.energy:g}")
    if g_nonneg and float(np.min(u.values)) < -1e-8:
        raise SolverError("nonnegativity lost on the concave branch")
    return report


def solve_plus(spec: ProblemSpec,
               u0: GridFunction | None = None,
               tol_rel: float = RESIDUAL_TOL) -> SolveReport:
    """Small solution on the convex Nehari branch, by damped fixed point.

    Iterates u <- (-Lap + V)^{-1}(f'(u) + g) from zero (or a supplied
    admissible start), halving the update whenever the residual fails to
    decrease, then polishes with Newton.  Divergence of the iteration, or
    convergence to a state off the convex branch, raises SolverError: both
    signal a forcing too large for the small-branch theory.
    """
    spec.validate()
    if spec.g.max_abs() == 0.0:
        raise ValueError("the small branch requires a nonzero forcing")
    tol = tol_rel * _scale(spec)
    u = u0 if u0 is not None else spec.grid.zeros()
    res, rmax = _residual(u, spec)
    iters = 0
    while rmax > 100.0 * tol and iters < ITERATION_CAP:
        iters += 1
        rhs = GridFunction(u.grid, eval_f(spec.params, u.values, 1) + spec.g.values)
        u_fix = invert_linear(rhs, spec)
        step = u_fix - u
        s = 1.0
        while s >= 1e-6:
            u_try = u + s * step
            res_try, rmax_try = _residual(u_try, spec)
            if rmax_try < rmax:
                u, res, rmax = u_try, res_try, rmax_try
                break
            s *= 0.5
        else:
            raise SolverError(
                f"fixed-point iteration stalled at residual {rmax:.3e}; "
                "the forcing is too large for the small branch")
    u, newton_steps, _ = _newton_polish(u, spec, tol)
    report = _finish(u, spec, "plus", iters + newton_steps, tol)
    if report.second_variation_along_ray <= 0.0:
        raise SolverError("fixed point left the convex branch; forcing too large")
    if report.energy >= 0.0:
        raise SolverError(f"convex-branch energy must be negative, got {report.energy:g}")
    if float(np.min(spec.g.values)) >= 0.0 and float(np.min(u.values)) < -1e-8:
        raise SolverError("nonnegativity lost on the convex branch")
    return report
