"""Two solutions of -Lap u + V(x) u = f'(u) + g(x) on a radial grid.

The nonlinearity f is a double-power quotient that is supercritical near
zero and subcritical at infinity (zero mass regime).  For small forcing g
the constrained energy landscape carries two natural critical points: a
small negative-energy solution where the ray energy is convex, and a
mountain-pass type solution where it is concave.  This package computes
both, together with the unforced levels they perturb, and checks every
hypothesis and ordering the construction relies on.

Layout:
    nonlinearity   f and derivatives, closed-form coefficients, hypothesis sweep
    grid           radial discretization, quadrature, energy, linear solves
    orlicz         sum-space norm bounds and dual norms
    fibering       ray energy phi(t), extremal times, case classification
    solver         the two branch solvers and the unforced ground states
    config         flat key-value run configuration
    cli            command line entry point
"""

from .config import RunConfig, default_config, make_profile, parse_config
from .fibering import FiberingError, FiberingProfile, fiber_profile, find_T, phi, project_nehari
from .grid import (
    GridFunction,
    IndefiniteOperatorError,
    InvalidProblemError,
    ProblemSpec,
    RadialGrid,
    energy,
    energy_gradient,
    integrate,
    lp_norm,
    pairing,
    sobolev_constant,
    v_norm,
    v_norm_sq,
)
from .nonlinearity import (
    DoublePowerParams,
    HypothesisReport,
    ThirdDerivativeCoefficients,
    default_params,
    eval_f,
    third_derivative_coefficients,
    verify_hypotheses,
)
from .orlicz import OrliczBounds, dual_norm, gamma_measure, orlicz_norm_bounds
from .solver import (
    SolveReport,
    SolverError,
    homogeneous_ground_state,
    mass_escape_diagnostic,
    small_branch_norm_bound,
    solve_minus,
    solve_plus,
)

__version__ = "0.1.0"

__all__ = [
    "DoublePowerParams",
    "FiberingError",
    "FiberingProfile",
    "GridFunction",
    "HypothesisReport",
    "IndefiniteOperatorError",
    "InvalidProblemError",
    "OrliczBounds",
    "ProblemSpec",
    "RadialGrid",
    "RunConfig",
    "SolveReport",
    "SolverError",
    "ThirdDerivativeCoefficients",
    "default_config",
    "default_params",
    "dual_norm",
    "energy",
    "energy_gradient",
    "eval_f",
    "fiber_profile",
    "find_T",
    "gamma_measure",
    "homogeneous_ground_state",
    "integrate",
    "lp_norm",
    "make_profile",
    "mass_escape_diagnostic",
    "orlicz_norm_bounds",
    "pairing",
    "parse_config",
    "phi",
    "project_nehari",
    "small_branch_norm_bound",
    "sobolev_constant",
    "solve_minus",
    "solve_plus",
    "third_derivative_coefficients",
    "v_norm",
    "v_norm_sq",
    "verify_hypotheses",
]
