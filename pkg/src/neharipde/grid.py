"""Radial grid, quadrature, and the conservative diffusion operator.

Radially symmetric functions on R^N are reduced to profiles on [0, R_max].
Nodes sit at cell midpoints r_i = (i + 1/2) h, so the origin needs no
special casing, and the quadrature weight of node i is the shell volume
omega_{N-1} r_i^{N-1} h.

The Laplacian is discretized in flux form on the cell faces R_j = j h.
The face at the origin carries zero area (R_0^{N-1} = 0), which encodes
the Neumann condition there; the outer boundary is a homogeneous
Dirichlet condition imposed through a ghost value at R_max.  Because the
operator is assembled from the face gradients themselves, the discrete
integration-by-parts identity

    <-Lap u, v>_w  =  sum over faces of  w_face * u' v'

holds exactly (it is the definition), which the variational machinery
downstream relies on: energy differences, fibering derivatives and the
PDE residual are all consistent to machine precision rather than to
discretization order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import solveh_banded

from .nonlinearity import DoublePowerParams, eval_f

__all__ = [
    "RadialGrid",
    "GridFunction",
    "ProblemSpec",
    "InvalidProblemError",
    "IndefiniteOperatorError",
    "integrate",
    "lp_norm",
    "d12_inner",
    "d12_norm_sq",
    "v_inner",
    "v_norm_sq",
    "energy",
    "energy_gradient",
    "residual_max",
    "invert_linear",
    "neg_laplacian",
    "stiffness_banded",
    "sobolev_constant",
    "norm_equivalence_ratio",
]


class InvalidProblemError(ValueError):
    """Problem data violates a structural requirement."""


class IndefiniteOperatorError(RuntimeError):
    """The quadratic form -Lap + V lost positive definiteness."""


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform midpoint grid on [0, R_max] with N-dimensional shell weights."""

    N: int
    R_max: float
    M: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    faces: np.ndarray = field(init=False, repr=False)
    face_areas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"dimension N must be an integer >= 3, got {self.N}")
        if self.R_max <= 0.0:
            raise ValueError(f"R_max must be positive, got {self.R_max}")
        if self.M < 4:
            raise ValueError(f"need at least 4 cells, got M={self.M}")
        h = self.R_max / self.M
        omega = sphere_area(self.N)
        nodes = (np.arange(self.M) + 0.5) * h
        faces = np.arange(self.M + 1) * h
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "weights", _frozen(omega * nodes ** (self.N - 1) * h))
        object.__setattr__(self, "faces", _frozen(faces))
        object.__setattr__(self, "face_areas", _frozen(omega * faces ** (self.N - 1)))

    def key(self) -> tuple[int, float, int]:
        return (self.N, self.R_max, self.M)

    def ball_volume(self) -> float:
        return sphere_area(self.N) * self.R_max**self.N / self.N

    def function(self, values) -> "GridFunction":
        return GridFunction(self, np.asarray(values, dtype=float))

    def from_profile(self, profile: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return self.function(profile(self.nodes))

    def zeros(self) -> "GridFunction":
        return self.function(np.zeros(self.M))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Immutable nodal values tied to a grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.M,):
            raise ValueError(f"expected {self.grid.M} nodal values, got shape {v.shape}")
        object.__setattr__(self, "values", _frozen(v.copy()))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)

    def abs(self) -> "GridFunction":
        return GridFunction(self.grid, np.abs(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def _same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.grid is not v.grid and u.grid.key() != v.grid.key():
        raise ValueError(f"grid mismatch: {u.grid.key()} vs {v.grid.key()}")


def integrate(u: GridFunction) -> float:
    """Quadrature of u over R^N (shell-weighted midpoint rule)."""
    return float(u.grid.weights @ u.values)


def pairing(u: GridFunction, v: GridFunction) -> float:
    """Quadrature of u * v."""
    _same_grid(u, v)
    return float(u.grid.weights @ (u.values * v.values))


def lp_norm(u: GridFunction, p: float) -> float:
    if p <= 0:
        raise ValueError(f"Lebesgue exponent must be positive, got {p}")
    return float((u.grid.weights @ np.abs(u.values) ** p) ** (1.0 / p))


def d12_inner(u: GridFunction, v: GridFunction) -> float:
    """Dirichlet form int grad(u).grad(v), discretized on faces.

    Interior faces use the two adjacent nodes; the outer face uses the
    Dirichlet ghost (profile hits zero at R_max over the half cell h/2).
    """
    _same_grid(u, v)
    g = u.grid
    du = np.diff(u.values)
    dv = np.diff(v.values)
    inner = float(g.face_areas[1:-1] @ (du * dv)) / g.h
    boundary = float(g.face_areas[-1] * 2.0 * u.values[-1] * v.values[-1]) / g.h
    return inner + boundary


def d12_norm_sq(u: GridFunction) -> float:
    """Squared seminorm int |grad u|^2."""
    return d12_inner(u, u)


def stiffness_banded(grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """Banded arrays (main, off) of the symmetric form matrix K.

    K is defined by  u^T K v = d12_inner(u, v); the nodewise operator is
    (-Lap u)_i = (K u)_i / w_i.  off[i] couples nodes i and i+1.
    """
    fa = grid.face_areas
    main = (fa[:-1] + fa[1:]) / grid.h
    main = main.copy()
    main[-1] = (fa[-2] + 2.0 * fa[-1]) / grid.h
    off = -fa[1:-1] / grid.h
    return main, off


def _apply_stiffness(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    main, off = stiffness_banded(grid)
    out = main * values
    out[:-1] += off * values[1:]
    out[1:] += off * values[:-1]
    return out


def neg_laplacian(u: GridFunction) -> GridFunction:
    """Nodewise -Lap u (flux form, Neumann at 0, Dirichlet at R_max)."""
    return GridFunction(u.grid, _apply_stiffness(u.grid, u.values) / u.grid.weights)


@lru_cache(maxsize=32)
def _sobolev_constant_cached(N: int, R_max: float, M: int) -> float:
    grid = RadialGrid(N, R_max, M)
    r = grid.nodes
    profile = (1.0 + r * r) ** (-(N - 2.0) / 2.0)
    shift = (1.0 + R_max * R_max) ** (-(N - 2.0) / 2.0)
    u = grid.function(profile - shift)
    two_star = 2.0 * N / (N - 2.0)
    return d12_norm_sq(u) / lp_norm(u, two_star) ** 2


def sobolev_constant(grid: RadialGrid) -> float:
    """Certified Sobolev constant for this grid.

    Rayleigh quotient |grad U|_2^2 / |U|_{2*}^2 of the extremal bubble
    profile (1 + r^2)^{-(N-2)/2}, shifted to meet the Dirichlet boundary.
    Every admissibility check of the potential is made against this
    number, so the certificate and the discrete inequalities it feeds are
    evaluated with the same quadrature.
    """
    return _sobolev_constant_cached(grid.N, grid.R_max, grid.M)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Full problem data: nonlinearity parameters, potential and forcing.

    exponent_t and exponent_s pick the Lebesgue spaces whose norms are
    reported for V and g diagnostics; they must satisfy t > N/2 and
    s > 2N/(N+2) so the associated integrals control the quadratic and
    linear energy terms.
    """

    params: DoublePowerParams
    V: GridFunction
    g: GridFunction
    exponent_t: float | None = None
    exponent_s: float | None = None

    def __post_init__(self) -> None:
        _same_grid(self.V, self.g)
        N = self.grid.N
        if self.params.N != N:
            raise InvalidProblemError(
                f"parameter dimension N={self.params.N} does not match grid N={N}")
        t = float(N) if self.exponent_t is None else self.exponent_t
        s = 2.0 if self.exponent_s is None else self.exponent_s
        object.__setattr__(self, "exponent_t", t)
        object.__setattr__(self, "exponent_s", s)
        if not t > N / 2.0:
            raise InvalidProblemError(f"exponent_t must exceed N/2 = {N / 2.0}, got {t}")
        if not s > 2.0 * N / (N + 2.0):
            raise InvalidProblemError(
                f"exponent_s must exceed 2N/(N+2) = {2.0 * N / (N + 2.0)}, got {s}")

    @property
    def grid(self) -> RadialGrid:
        return self.V.grid

    def validate(self, require_negative_V: bool = False) -> dict[str, float]:
        """Check the admissibility of (V, g); returns the certified numbers.

        Raises InvalidProblemError when V is positive somewhere, when the
        potential is strong enough to destroy coercivity of the quadratic
        form (measured against the certified Sobolev constant), or, if
        requested, when V vanishes identically (the two-level separation
        argument needs V < 0 on a set of positive measure).
        """
        problems: list[str] = []
        if not np.all(np.isfinite(self.V.values)) or not np.all(np.isfinite(self.g.values)):
            problems.append("V and g must be finite everywhere")
        if np.any(self.V.values > 0.0):
            worst = float(np.max(self.V.values))
            problems.append(f"V must be <= 0 pointwise; found max V = {worst:g}")
        N = self.grid.N
        S = sobolev_constant(self.grid)
        v_norm = lp_norm(self.V, N / 2.0)
        if not v_norm < S:
            problems.append(
                f"potential too strong: ||V||_(N/2) = {v_norm:g} must stay below the "
                f"certified Sobolev constant S = {S:g} to keep the quadratic form coercive")
        if require_negative_V:
            neg = float(self.grid.weights @ (self.V.values < 0.0))
            if neg <= 0.0:
                problems.append("V must be strictly negative on a set of positive measure")
        if problems:
            raise InvalidProblemError("; ".join(problems))
        return {"sobolev_constant": S, "V_norm_N_half": v_norm}

    def with_g(self, g: GridFunction) -> "ProblemSpec":
        return ProblemSpec(self.params, self.V, g, self.exponent_t, self.exponent_s)

    def homogeneous(self) -> "ProblemSpec":
        """Same potential, zero forcing."""
        return self.with_g(self.grid.zeros())

    def free(self) -> "ProblemSpec":
        """Zero potential, zero forcing (translation-invariant limit)."""
        z = self.grid.zeros()
        return ProblemSpec(self.params, z, z, self.exponent_t, self.exponent_s)


def norm_equivalence_ratio(spec: ProblemSpec) -> float:
    """||V||_{N/2} / S; below 1 exactly when the V-norm is equivalent."""
    return lp_norm(spec.V, spec.grid.N / 2.0) / sobolev_constant(spec.grid)


def v_inner(u: GridFunction, v: GridFunction, spec: ProblemSpec) -> float:
    """Bilinear form int grad(u).grad(v) + V u v."""
    _same_grid(u, spec.V)
    return d12_inner(u, v) + float(spec.V.grid.weights @ (spec.V.values * u.values * v.values))

def v_norm_sq(u: GridFunction, spec: ProblemSpec) -> float:
    """Squared problem norm int |grad u|^2 + V u^2.

    Raises IndefiniteOperatorError if the value fails to be positive for a
    nonzero u, which means V violates the coercivity condition.
    """
    val = v_inner(u, u, spec)
    if val <= 0.0 and float(np.max(np.abs(u.values))) > 0.0:
        raise IndefiniteOperatorError(
            f"quadratic form is not positive definite: got {val:g} for a nonzero function")
    return val


def v_norm(u: GridFunction, spec: ProblemSpec) -> float:
    return math.sqrt(max(v_norm_sq(u, spec), 0.0))


def energy(u: GridFunction, spec: ProblemSpec) -> float:
    """E(u) = 1/2 ||u||_V^2 - int f(u) - int g u."""
    _same_grid(u, spec.V)
    w = u.grid.weights
    quad = 0.5 * v_inner(u, u, spec)
    nonlin = float(w @ eval_f(spec.params, u.values, 0))
    force = float(w @ (spec.g.values * u.values))
    return quad - nonlin - force


def energy_gradient(u: GridFunction, spec: ProblemSpec) -> GridFunction:
    """Nodewise gradient -Lap u + V u - f'(u) - g.

    This is the Riesz representative of dE(u) in the weighted L^2 pairing:
    <energy_gradient(u), v>_w equals the directional derivative of the
    energy at u along v, exactly, by the flux-form construction.
    """
    _same_grid(u, spec.V)
    vals = (_apply_stiffness(u.grid, u.values) / u.grid.weights
            + spec.V.values * u.values
            - eval_f(spec.params, u.values, 1)
            - spec.g.values)
    return GridFunction(u.grid, vals)


def residual_max(u: GridFunction, spec: ProblemSpec) -> float:
    """Max-norm of the nodewise PDE residual."""
    return energy_gradient(u, spec).max_abs()


def invert_linear(rhs: GridFunction, spec: ProblemSpec) -> GridFunction:
    """Solve (-Lap + V) u = rhs with the boundary conditions of the grid.

    The symmetric banded system (K + diag(w V)) u = w rhs is solved by a
    Cholesky factorization; loss of positive definiteness (V too strong)
    raises IndefiniteOperatorError instead of returning garbage.
    """
    _same_grid(rhs, spec.V)
    g = rhs.grid
    main, off = stiffness_banded(g)
    ab = np.zeros((2, g.M))
    ab[0, 1:] = off
    ab[1, :] = main + g.weights * spec.V.values
    try:
        sol = solveh_banded(ab, g.weights * rhs.values, lower=False)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteOperatorError(
            "Cholesky failed: -Lap + V is not positive definite") from exc
    return GridFunction(g, sol)
