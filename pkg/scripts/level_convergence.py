"""Energy levels under grid refinement.

Prints m_V, m_0 and the forced levels m_g, m_1g at successively refined
node counts for a fixed domain, plus the change from one row to the next.
The spatial discretization converges fast; what is left over at the
finest grid is the domain-truncation offset of the slowly decaying tails.

    python3 scripts/level_convergence.py --R-max 20 --M 400 --doublings 3
"""

from __future__ import annotations

import argparse

from neharipde.config import RunConfig, build_spec
from neharipde.solver import homogeneous_ground_state, solve_minus, solve_plus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R-max", type=float, default=20.0)
    ap.add_argument("--M", type=int, default=400, help="coarsest node count")
    ap.add_argument("--doublings", type=int, default=3)
    ap.add_argument("--g-amplitude", type=float, default=0.04)
    args = ap.parse_args()

    header = f"{'M':>7} {'m_V':>14} {'m_0':>14} {'m_g':>14} {'m_1g':>14}"
    print(header)
    print("-" * len(header))
    prev = None
    for k in range(args.doublings + 1):
        cfg = RunConfig(R_max=args.R_max, M=args.M * 2**k,
                        g_amplitude=args.g_amplitude)
        spec = build_spec(cfg)
        hom = homogeneous_ground_state(spec.homogeneous())
        free = homogeneous_ground_state(spec.free())
        plus = solve_plus(spec)
        minus = solve_minus(spec, seed_direction=hom.solution)
        row = (hom.energy, free.energy, plus.energy, minus.energy)
        print(f"{cfg.M:>7} " + " ".join(f"{x:>14.9f}" for x in row))
        if prev is not None:
            print(f"{'delta':>7} " + " ".join(f"{x - y:>14.2e}"
                                              for x, y in zip(row, prev)))
        prev = row


if __name__ == "__main__":
    main()
