"""How large can the forcing get before the two-solution picture breaks.

For a ladder of forcing scales this prints the fibering classification of
the canonical direction, its margin, and whether each branch solver still
converges.  The margin is linear in the scale along a fixed direction, so
its zero crossing predicts where the concave branch disappears; the solver
columns show how sharp that prediction is.

    python3 scripts/forcing_window.py --scales 1,4,16,32,64,128
"""

from __future__ import annotations

import argparse

from neharipde.config import RunConfig, build_spec
from neharipde.fibering import FiberingError, fiber_profile
from neharipde.solver import SolverError, homogeneous_ground_state, solve_minus, solve_plus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R-max", type=float, default=20.0)
    ap.add_argument("--M", type=int, default=800)
    ap.add_argument("--scales", type=str, default="1,2,4,8,16,32,64,128")
    args = ap.parse_args()

    scales = [float(s) for s in args.scales.split(",") if s.strip()]
    base = RunConfig(R_max=args.R_max, M=args.M)
    hom = homogeneous_ground_state(build_spec(base).homogeneous())
    seed = hom.solution

    print(f"{'scale':>8} {'case':>28} {'margin':>12} {'plus':>10} {'minus':>10}")
    for lam in scales:
        spec = build_spec(base, g_scale=lam)
        prof = fiber_profile(seed, spec)
        try:
            plus = f"{solve_plus(spec).energy:.4f}"
        except (SolverError, FiberingError):
            plus = "lost"
        try:
            minus = f"{solve_minus(spec, seed_direction=seed).energy:.4f}"
        except (SolverError, FiberingError):
            minus = "lost"
        print(f"{lam:>8g} {prof.case:>28} {prof.margin:>12.5f} "
              f"{plus:>10} {minus:>10}")


if __name__ == "__main__":
    main()
