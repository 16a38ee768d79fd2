"""Ray geometry of the energy: fibering maps and manifold projections.

For a fixed direction u != 0 the energy along the ray t -> t u is

    phi(t) = t^2/2 ||u||_V^2 - int f(t u) - t int g u,

and the Nehari constraint <E'(tu), tu> = 0 is exactly phi'(t) = 0.  The
structure that makes the two-solution picture work is third-order:
phi'''(t) = -int f'''(tu) u^3 t^0 < 0 for t > 0, so phi' is strictly
concave, its derivative phi'' starts positive at t = 0 and crosses zero
at a unique time T, and phi' itself has a single interior maximum there.
Consequently the horizontal line at height int g u cuts the graph of the
homogeneous slope t -> phi_0'(t) in at most two points:

    int g u <= 0   one crossing t1 beyond T      (the minus branch)
    int g u  > 0   two crossings t2 < T < t1, if the line stays below
                   the peak phi_0'(T); none otherwise.

`fiber_profile` reports this classification with certified brackets, and
`project_nehari` rescales a direction onto the requested branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .grid import GridFunction, ProblemSpec, v_norm_sq
from .nonlinearity import eval_f

__all__ = [
    "FiberingProfile",
    "FiberingError",
    "phi",
    "find_T",
    "fiber_profile",
    "project_nehari",
]

Case = Literal[
    "negative_pairing",
    "zero_pairing",
    "positive_pairing_two_roots",
    "positive_pairing_no_roots",
]

_BRACKET_GROWTH_LIMIT = 400


class FiberingError(RuntimeError):
    """A requested ray feature does not exist."""


class _Ray:
    """Precomputed data for one direction: norms, pairing, f evaluations."""

    def __init__(self, u: GridFunction, spec: ProblemSpec):
        if u.max_abs() == 0.0:
            raise ValueError("fibering requires a nonzero direction")
        self.u = u
        self.spec = spec
        self.w = u.grid.weights
        self.vals = u.values
        self.norm_sq = v_norm_sq(u, spec)
        self.g_pair = float(self.w @ (spec.g.values * u.values))
        # Pairing scale for deciding when int g u is numerically zero.
        gl2 = math.sqrt(float(self.w @ spec.g.values**2))
        ul2 = math.sqrt(float(self.w @ u.values**2))
        self.pair_scale = gl2 * ul2

    def nonlin(self, t: float, order: int) -> float:
        """int f^(order)(t u) u^order."""
        fv = eval_f(self.spec.params, t * self.vals, order)
        return float(self.w @ (fv * self.vals**order))

    def value(self, t: float, order: int, homogeneous: bool = False) -> float:
        g_pair = 0.0 if homogeneous else self.g_pair
        if order == 0:
            return 0.5 * t * t * self.norm_sq - self.nonlin(t, 0) - t * g_pair
        if order == 1:
            return t * self.norm_sq - self.nonlin(t, 1) - g_pair
        if order == 2:
            return self.norm_sq - self.nonlin(t, 2)
        if order == 3:
            return -self.nonlin(t, 3)
        raise ValueError(f"order must be 0, 1, 2 or 3, got {order}")


def phi(u: GridFunction, spec: ProblemSpec, t: float, order: int = 0) -> float:
    """Energy along the ray, E(t u), or its order-th t-derivative."""
    return _Ray(u, spec).value(float(t), order)


def _expand_up(fn, start: float) -> tuple[float, float]:
    """Grow t until fn goes negative; returns a sign-changing bracket."""
    lo, hi = 0.0, start
    val = fn(hi)
    steps = 0
    while val > 0.0:
        lo, hi = hi, hi * 2.0
        with np.errstate(over="ignore"):
            val = fn(hi)
        steps += 1
        if steps > _BRACKET_GROWTH_LIMIT:
            raise FiberingError("failed to bracket a ray feature; direction may be degenerate")
    return lo, hi


def _polish(fn, dfn, t: float, lo: float, hi: float) -> float:
    # One or two guarded Newton corrections on top of the bracketed root.
    for _ in range(2):
        slope = dfn(t)
        if slope == 0.0:
            break
        step = fn(t) / slope
        t_new = t - step
        if not (lo < t_new < hi) or not math.isfinite(t_new):
            break
        t = t_new
    return t


def find_T(u: GridFunction, spec: ProblemSpec) -> float:
    """Unique time where phi'' crosses zero (the peak of the slope map).

    phi'' is strictly decreasing, positive at 0; the crossing always
    exists because int f''(tu) u^2 grows superquadratically in t.
    """
    ray = _Ray(u, spec)
    return _find_T(ray)


def _find_T(ray: _Ray) -> float:
    phi2 = lambda t: ray.value(t, 2)
    start = 1.0
    # A direction with large amplitude crosses before t = 1.
    while phi2(start) <= 0.0:
        start *= 0.5
        if start < 1e-280:
            raise FiberingError("could not locate the second-derivative crossing")
    lo, hi = _expand_up(phi2, start)
    T = brentq(phi2, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
    return _polish(phi2, lambda t: ray.value(t, 3), T, 0.0, hi)


@dataclass(frozen=True)
class FiberingProfile:
    """Classification of one ray: crossing times and the feasibility margin.

    T is the peak of the homogeneous slope map, t0 its zero (the manifold
    time with g removed), margin = phi_0'(T) - int g u the height by which
    the peak clears the pairing.  t1/t2 are the minus/plus branch times,
    present according to case.
    """

    direction_norm: float
    g_pairing: float
    T: float
    t0: float
    margin: float
    case: Case
    t1: float | None
    t2: float | None


_ZERO_PAIRING_REL = 1e-13


def fiber_profile(u: GridFunction, spec: ProblemSpec) -> FiberingProfile:
    ray = _Ray(u, spec)
    T = _find_T(ray)
    phi1_h = lambda t: ray.value(t, 1, homogeneous=True)
    phi2 = lambda t: ray.value(t, 2)
    peak = phi1_h(T)

    # Homogeneous manifold time t0 > T: slope decreasing past the peak.
    lo, hi = _expand_up(phi1_h, 2.0 * T)
    t0 = brentq(phi1_h, max(lo, T), hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
    t0 = _polish(phi1_h, phi2, t0, T, hi)

    pair = ray.g_pair
    margin = peak - pair
    zero_tol = _ZERO_PAIRING_REL * ray.pair_scale

    phi1 = lambda t: ray.value(t, 1)
    if abs(pair) <= zero_tol:
        case: Case = "zero_pairing"
        t1, t2 = t0, None
    elif pair < 0.0:
        case = "negative_pairing"
        lo1, hi1 = _expand_up(phi1, 2.0 * t0)
        t1 = brentq(phi1, max(lo1, T), hi1, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
        t1 = _polish(phi1, phi2, t1, T, hi1)
        t2 = None
    elif margin <= 0.0:
        # Peak of the slope map does not clear the pairing: the ray misses
        # the manifold entirely (tangency counts as missing).
        case = "positive_pairing_no_roots"
        t1 = t2 = None
    else:
        case = "positive_pairing_two_roots"
        t2 = brentq(phi1, 0.0, T, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
        t2 = _polish(phi1, phi2, t2, 0.0, T)
        lo1, hi1 = _expand_up(phi1, 2.0 * T)
        t1 = brentq(phi1, max(lo1, T), hi1, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
        t1 = _polish(phi1, phi2, t1, T, hi1)

    return FiberingProfile(
        direction_norm=math.sqrt(ray.norm_sq),
        g_pairing=pair,
        T=T,
        t0=t0,
        margin=margin,
        case=case,
        t1=t1,
        t2=t2,
    )


def project_nehari(u: GridFunction, spec: ProblemSpec,
                   branch: Literal["plus", "minus"]) -> GridFunction:
    """Rescale u onto the requested Nehari branch.

    plus: the small crossing t2 (exists only for positive pairing below
    the margin); minus: the large crossing t1 (exists unless the ray
    misses the manifold).  Raises FiberingError when the branch is empty
    along this ray.
    """
    profile = fiber_profile(u, spec)
    if branch == "plus":
        if profile.t2 is None:
            raise FiberingError(
                f"no plus-branch crossing along this ray (case: {profile.case})")
        return profile.t2 * u
    if branch == "minus":
        if profile.t1 is None:
            raise FiberingError(
                f"no minus-branch crossing along this ray (case: {profile.case})")
        return profile.t1 * u
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
