"""Double-power model nonlinearity and its structural hypotheses.

The model term is

    f(s) = |s|^q / (1 + |s|^{q-p}),        2 < p < 2N/(N-2) < q,

which interpolates between |s|^q near the origin and |s|^p at infinity.
Everything downstream (fibering maps, manifold projections, energy levels)
only uses f through the evaluations in this module, so the derivative
formulas here are written in a form that stays stable over many decades
of |s|: powers of min(|s|^{q-p}, |s|^{p-q}) only, never a large/large
quotient.

`verify_hypotheses` sweeps a log grid and checks every pointwise
inequality the two-solution theory needs (growth envelopes, the
Ambrosetti-Rabinowitz-type lower bound, superquadraticity of f' s, and
positivity of f''' s^3).  A failure is reported, not raised: it means the
chosen (p, q, mu1, eps) lie outside the admissible window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "DoublePowerParams",
    "ThirdDerivativeCoefficients",
    "HypothesisReport",
    "HypothesisFailure",
    "default_params",
    "eval_f",
    "third_derivative_coefficients",
    "verify_hypotheses",
]


def _critical_exponent(N: int) -> float:
    return 2.0 * N / (N - 2.0)


@dataclass(frozen=True)
class DoublePowerParams:
    """Exponents and constants for the double-power nonlinearity.

    mu1 is the superquadraticity constant (mu1 * f <= f' s), mu2 = 1 + eps
    the second-order one (mu2 * f' s < f'' s^2).  c0 and c2 are the growth
    envelope constants; admissible values are confirmed by
    `verify_hypotheses`, which also reports the sharpest ones the grid
    allows.
    """

    N: int = 3
    p: float = 5.5
    q: float = 6.5
    eps: float = 0.5
    mu1: float = 5.5
    c0: float = 0.45
    c2: float = 36.0

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"dimension N must be an integer >= 3, got {self.N}")
        two_star = _critical_exponent(self.N)
        if not (2.0 < self.p < two_star < self.q):
            raise ValueError(
                f"exponents must satisfy 2 < p < 2N/(N-2) < q; "
                f"got p={self.p}, 2N/(N-2)={two_star}, q={self.q}"
            )
        if self.q <= 3.0:
            # Third derivatives of f must stay bounded near s = 0 for the
            # fibering maps to be C^2; that needs q > 3.
            raise ValueError(f"q must exceed 3, got q={self.q}")
        if self.eps <= 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.mu1 <= 2.0:
            raise ValueError(f"mu1 must exceed 2, got {self.mu1}")
        if self.c0 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("growth constants c0, c2 must be positive")

    @property
    def mu2(self) -> float:
        return 1.0 + self.eps

    @property
    def two_star(self) -> float:
        return _critical_exponent(self.N)


def default_params() -> DoublePowerParams:
    """Reference parameter set used by the CLI and the test suite."""
    return DoublePowerParams()


@dataclass(frozen=True)
class ThirdDerivativeCoefficients:
    """Numerator coefficients of s^3 f'''(s) over (1 + |s|^{q-p})^4.

    With g = |s|^{q-p},

        s^3 f'''(s) = |s|^q [A + (3A+B) g + (3A+2B+C) g^2 + (A+B+C+D) g^3]
                      / (1+g)^4 * sign(s),

    so A controls the s -> 0 limit and A+B+C+D = p(p-1)(p-2) the
    s -> infinity limit.  All four gamma-coefficients positive is the
    checkable sufficient condition for f''' s^3 > 0.
    """

    A: float
    B: float
    C: float
    D: float

    @property
    def limit_zero(self) -> float:
        """lim_{s->0+} f'''(s) / s^{q-3}."""
        return self.A

    @property
    def limit_infinity(self) -> float:
        """lim_{s->inf} f'''(s) / s^{p-3}."""
        return self.A + self.B + self.C + self.D


def third_derivative_coefficients(p: float, q: float) -> ThirdDerivativeCoefficients:
    """Closed-form (A, B, C, D) for the third-derivative decomposition."""
    A = q * (q - 1.0) * (q - 2.0)
    B = (p - q) * (2.0 + 3.0 * p + p * p - 9.0 * q - 5.0 * p * q + 7.0 * q * q)
    C = 6.0 * (p - q) ** 2 * (2.0 * q - p - 1.0)
    D = 6.0 * (p - q) ** 3
    return ThirdDerivativeCoefficients(A=A, B=B, C=C, D=D)


def _second_coeffs(p: float, q: float) -> tuple[float, float, float]:
    # s^2 f''(s) = |s|^q (a0 + a1 g + a2 g^2) / (1+g)^3, g = |s|^{q-p}.
    a0 = q * (q - 1.0)
    a1 = 4.0 * p * q - p * p - q * q - p - q
    a2 = p * (p - 1.0)
    return a0, a1, a2


def eval_f(params: DoublePowerParams, s, order: int = 0):
    """Evaluate f or one of its first three derivatives.

    Accepts scalars or numpy arrays, returns the matching shape.  The
    evaluation is split at |s| = 1: below, everything is a polynomial in
    g = |s|^{q-p} <= 1; above, in d = |s|^{p-q} <= 1.  The two branches are
    algebraically identical, so the split costs nothing in accuracy and
    removes all overflow risk from intermediate powers.

    Odd orders carry sign(s); even orders are even in s.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0, 1, 2 or 3, got {order}")
    p, q = params.p, params.q
    s_arr = np.asarray(s, dtype=float)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    a = np.abs(s_arr)
    out = np.zeros_like(a)

    small = (a > 0.0) & (a <= 1.0)
    large = a > 1.0

    if order == 2:
        a0, a1, a2 = _second_coeffs(p, q)
    elif order == 3:
        cf = third_derivative_coefficients(p, q)
        b0 = cf.A
        b1 = 3.0 * cf.A + cf.B
        b2 = 3.0 * cf.A + 2.0 * cf.B + cf.C
        b3 = cf.A + cf.B + cf.C + cf.D

    if np.any(small):
        x = a[small]
        g = x ** (q - p)
        e = 1.0 + g
        if order == 0:
            out[small] = x**q / e
        elif order == 1:
            out[small] = x ** (q - 1.0) * (q + p * g) / e**2
        elif order == 2:
            out[small] = x ** (q - 2.0) * (a0 + g * (a1 + g * a2)) / e**3
        else:
            out[small] = x ** (q - 3.0) * (b0 + g * (b1 + g * (b2 + g * b3))) / e**4

    if np.any(large):
        x = a[large]
        d = x ** (p - q)
        e = 1.0 + d
        if order == 0:
            out[large] = x**p / e
        elif order == 1:
            out[large] = x ** (p - 1.0) * (p + q * d) / e**2
        elif order == 2:
            out[large] = x ** (p - 2.0) * (a2 + d * (a1 + d * a0)) / e**3
        else:
            out[large] = x ** (p - 3.0) * (b3 + d * (b2 + d * (b1 + d * b0))) / e**4

    if order % 2 == 1:
        out = out * np.sign(s_arr)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class HypothesisFailure:
    s: float
    hypothesis: str
    lhs: float
    rhs: float


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the pointwise hypothesis sweep.

    margins maps each inequality to its minimum slack over the grid
    (positive iff the inequality held everywhere).  c0_largest and
    c2_smallest are the sharpest envelope constants the sweep would have
    accepted, independent of the configured ones.
    """

    checked_points: int
    passed: bool
    coefficients: ThirdDerivativeCoefficients
    margins: dict[str, float]
    c0_largest: float
    c2_smallest: float
    failures: list[HypothesisFailure] = field(default_factory=list)


# Cap recorded samples per hypothesis, not globally: a hypothesis that
# fails on many grid points must not crowd the others out of the report.
_MAX_RECORDED_PER_HYPOTHESIS = 40


def _record(failures: list[HypothesisFailure], s: np.ndarray, mask: np.ndarray,
            name: str, lhs: np.ndarray, rhs: np.ndarray) -> None:
    idx = np.nonzero(mask)[0][:_MAX_RECORDED_PER_HYPOTHESIS]
    for i in idx:
        failures.append(HypothesisFailure(float(s[i]), name, float(lhs[i]), float(rhs[i])))


def verify_hypotheses(params: DoublePowerParams,
                      s_grid: Iterable[float] | None = None) -> HypothesisReport:
    """Check every structural inequality on a logarithmic |s| grid.

    f is even and its derivatives alternate parity, so a positive grid
    suffices.  Checked pointwise:

      growth_lower:   c0 |s|^q < f(s) on |s| <= 1,  c0 |s|^p <= f(s) on |s| >= 1
      growth_second:  |f''(s)| <= c2 |s|^{q-2} on |s| <= 1,  c2 |s|^{p-2} on |s| >= 1
      superquadratic: mu1 f(s) <= f'(s) s  (and f > 0)
      second_order:   mu2 f'(s) s < f''(s) s^2
      third_positive: f'''(s) s^3 > 0
      eps_window:     the quadratic-in-g sufficient condition for
                      second_order, with the four eps bracket inequalities

    Violations land in the failure list; nothing raises.  An inadmissible
    parameter choice (say p = 3, q = 20, eps = 1/2) simply comes back with
    passed = False.
    """
    if s_grid is None:
        s = np.geomspace(1e-6, 1e6, 1200)
    else:
        s = np.asarray(list(s_grid), dtype=float)
        if s.size < 2 or np.any(s <= 0):
            raise ValueError("s_grid must hold positive values")
    p, q, eps = params.p, params.q, params.eps
    mu1, mu2 = params.mu1, params.mu2
    c0, c2 = params.c0, params.c2

    f0 = eval_f(params, s, 0)
    f1s = eval_f(params, s, 1) * s
    f2s2 = eval_f(params, s, 2) * s * s
    f3s3 = eval_f(params, s, 3) * s**3

    failures: list[HypothesisFailure] = []
    margins: dict[str, float] = {}

    envelope = np.where(s <= 1.0, s**q, s**p)
    ratio0 = f0 / envelope
    margins["growth_lower"] = float(np.min(ratio0 - c0))
    bad = ratio0 <= c0
    _record(failures, s, bad, "growth_lower", c0 * envelope, f0)

    envelope2 = np.where(s <= 1.0, s ** (q - 2.0), s ** (p - 2.0))
    ratio2 = np.abs(eval_f(params, s, 2)) / envelope2
    margins["growth_second"] = float(np.min(c2 - ratio2))
    bad = ratio2 > c2
    _record(failures, s, bad, "growth_second", ratio2 * envelope2, c2 * envelope2)

    ratio_mu1 = f1s / f0
    margins["superquadratic"] = float(np.min(ratio_mu1 - mu1))
    bad = (f0 <= 0.0) | (ratio_mu1 < mu1)
    _record(failures, s, bad, "superquadratic", mu1 * f0, f1s)

    ratio_mu2 = f2s2 / f1s
    margins["second_order"] = float(np.min(ratio_mu2 - mu2))
    bad = ratio_mu2 <= mu2
    _record(failures, s, bad, "second_order", mu2 * f1s, f2s2)

    margins["third_positive"] = float(np.min(f3s3 / f0))
    bad = f3s3 <= 0.0
    _record(failures, s, bad, "third_positive", np.zeros_like(s), f3s3)

    # Sufficient condition for second_order, quadratic in g = s^{q-p}:
    # q(q-2-eps) + [p(2q-p-2-eps) + q(2p-q-2-eps)] g + p(p-2+eps) g^2 > 0.
    # All three coefficients positive is the eps bracket
    #   0 < eps < q - 2,  eps < 2q - p - 2,  eps < 2p - q - 2,  eps > 2 - p.
    g = s ** (q - p)
    quad = (q * (q - 2.0 - eps)
            + (p * (2.0 * q - p - 2.0 - eps) + q * (2.0 * p - q - 2.0 - eps)) * g
            + p * (p - 2.0 + eps) * g * g)
    normalized = quad / (1.0 + g) ** 2
    margins["eps_window"] = float(np.min(normalized))
    bad = quad <= 0.0
    _record(failures, s, bad, "eps_window", np.zeros_like(s), quad)
    for label, value in (
        ("q - 2 - eps", q - 2.0 - eps),
        ("p - 2 + eps", p - 2.0 + eps),
        ("2q - p - 2 - eps", 2.0 * q - p - 2.0 - eps),
        ("2p - q - 2 - eps", 2.0 * p - q - 2.0 - eps),
    ):
        if value <= 0.0:
            failures.append(HypothesisFailure(float("nan"), f"eps_window[{label}]", value, 0.0))
            margins["eps_window"] = min(margins["eps_window"], value)

    c0_largest = float(np.min(ratio0))
    c2_smallest = float(np.max(ratio2))

    return HypothesisReport(
        checked_points=int(s.size),
        passed=(len(failures) == 0 and all(m > 0.0 for m in margins.values())),
        coefficients=third_derivative_coefficients(p, q),
        margins=margins,
        c0_largest=c0_largest,
        c2_smallest=c2_smallest,
        failures=failures,
    )
