"""Command line driver: solve, sweep, fiber, orlicz, verify-f.

Every command reads the same flat config file, writes plain CSV/JSON
artifacts into --out, and is deterministic: identical config and seed
produce byte-identical files.  Nothing here carries wall-clock state;
cost is reported in iteration counts.

    solve      both branches of the forced problem + unforced levels
    sweep      branch quantities along a list of forcing scales
    fiber      samples (t, phi, dphi) of the ray energy for plotting
    orlicz     sum-space norm diagnostics for the canonical direction and g
    verify-f   hypothesis sweep for the configured nonlinearity
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, build_spec, default_config, parse_config
from .fibering import FiberingError, fiber_profile, phi
from .grid import (
    GridFunction,
    InvalidProblemError,
    ProblemSpec,
    lp_norm,
    sobolev_constant,
    v_norm_sq,
)
from .nonlinearity import verify_hypotheses
from .orlicz import dual_norm, orlicz_norm_bounds
from .solver import (
    SolveReport,
    SolverError,
    homogeneous_ground_state,
    small_branch_norm_bound,
    solve_minus,
    solve_plus,
)

__all__ = ["main", "run_solve", "run_sweep", "run_fiber", "run_orlicz", "run_verify",
           "SweepRecord", "DEFAULT_LAMBDAS"]

DEFAULT_LAMBDAS = tuple(2.0**-k for k in range(11))


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest round-trip form: stable bytes.
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"refusing to serialize non-finite value {x}")
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_profile_csv(path: Path, u: GridFunction) -> None:
    _write_csv(path, ["r", "value"], [[r, v] for r, v in zip(u.grid.nodes, u.values)])


def _report_payload(rep: SolveReport, seed: int) -> dict:
    return {
        "branch": rep.branch,
        "energy": rep.energy,
        "residual": rep.residual,
        "nehari_defect": rep.nehari_defect,
        "second_variation_along_ray": rep.second_variation_along_ray,
        "iterations": rep.iterations,
        "mass_escape": rep.mass_escape,
        "norm_V": rep.norm_V,
        "seed": seed,
    }


def _canonical_direction(spec: ProblemSpec) -> GridFunction:
    r = spec.grid.nodes
    w = spec.grid.function(np.exp(-0.5 * r * r))
    return (1.0 / math.sqrt(v_norm_sq(w, spec))) * w


def run_solve(cfg: RunConfig, out: Path, grid_refine: int = 1, seed: int = 0) -> dict:
    spec = build_spec(cfg, grid_refine)
    spec.validate(require_negative_V=True)
    free = homogeneous_ground_state(spec.free())
    hom = homogeneous_ground_state(spec.homogeneous())
    plus = solve_plus(spec)
    minus = solve_minus(spec, seed_direction=hom.solution)

    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "solve_plus.json", _report_payload(plus, seed))
    _write_json(out / "solve_minus.json", _report_payload(minus, seed))
    write_profile_csv(out / "solve_plus.csv", plus.solution)
    write_profile_csv(out / "solve_minus.csv", minus.solution)
    levels = {
        "m_g": plus.energy,
        "m_1g": minus.energy,
        "m_V": hom.energy,
        "m_0": free.energy,
        "splitting_gap": plus.energy + free.energy - minus.energy,
        "seed": seed,
    }
    _write_json(out / "levels.json", levels)
    return levels


@dataclass(frozen=True)
class SweepRecord:
    """One forcing scale: levels, norms, residuals and the branch margin."""

    lam: float
    m_g: float
    m_1g: float
    u_plus_norm: float
    u_minus_norm: float
    residual_plus: float
    residual_minus: float
    margin_minus: float
    iterations_plus: int
    iterations_minus: int
    m_V: float
    m_0: float


SWEEP_COLUMNS = ["lambda", "m_g", "m_1g", "u_plus_norm", "u_minus_norm",
                 "residual_plus", "residual_minus", "margin_minus",
                 "iterations_plus", "iterations_minus", "m_V", "m_0"]


def _sweep_point(cfg: RunConfig, grid_refine: int, lam: float,
                 ubar_values: np.ndarray, m_V: float, m_0: float) -> SweepRecord:
    spec = build_spec(cfg, grid_refine, g_scale=lam)
    ubar = spec.grid.function(ubar_values)
    if lam == 0.0:
        prof = fiber_profile(ubar, spec)
        return SweepRecord(
            lam=0.0, m_g=0.0, m_1g=m_V,
            u_plus_norm=0.0, u_minus_norm=math.sqrt(v_norm_sq(ubar, spec)),
            residual_plus=0.0, residual_minus=0.0,
            margin_minus=prof.margin, iterations_plus=0, iterations_minus=0,
            m_V=m_V, m_0=m_0)
    plus = solve_plus(spec)
    minus = solve_minus(spec, seed_direction=ubar)
    margin = fiber_profile(minus.solution, spec).margin
    return SweepRecord(
        lam=lam, m_g=plus.energy, m_1g=minus.energy,
        u_plus_norm=plus.norm_V, u_minus_norm=minus.norm_V,
        residual_plus=plus.residual, residual_minus=minus.residual,
        margin_minus=margin,
        iterations_plus=plus.iterations, iterations_minus=minus.iterations,
        m_V=m_V, m_0=m_0)


def _sweep_worker(args) -> SweepRecord:
    cfg_dict, grid_refine, lam, ubar_values, m_V, m_0 = args
    return _sweep_point(RunConfig(**cfg_dict), grid_refine, lam,
                        np.asarray(ubar_values), m_V, m_0)


def run_sweep(cfg: RunConfig, out: Path, lambdas=DEFAULT_LAMBDAS,
              grid_refine: int = 1, seed: int = 0,
              workers: int | None = None) -> list[SweepRecord]:
    lams = sorted({float(l) for l in lambdas}, reverse=True)
    if any(l < 0 for l in lams):
        raise ValueError("forcing scales must be nonnegative")
    spec = build_spec(cfg, grid_refine)
    spec.validate(require_negative_V=True)
    hom = homogeneous_ground_state(spec.homogeneous())
    free = homogeneous_ground_state(spec.free())

    jobs = [(asdict(cfg), grid_refine, lam, hom.solution.values, hom.energy, free.energy)
            for lam in lams]
    if workers is None:
        workers = min(4, os.cpu_count() or 1, len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_sweep_worker, jobs))
    else:
        records = [_sweep_worker(job) for job in jobs]

    out.mkdir(parents=True, exist_ok=True)
    rows = [[r.lam, r.m_g, r.m_1g, r.u_plus_norm, r.u_minus_norm,
             r.residual_plus, r.residual_minus, r.margin_minus,
             r.iterations_plus, r.iterations_minus, r.m_V, r.m_0] for r in records]
    _write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    return records


def run_fiber(cfg: RunConfig, out: Path, grid_refine: int = 1,
              samples: int = 512) -> dict:
    spec = build_spec(cfg, grid_refine)
    spec.validate()
    w = _canonical_direction(spec)
    prof = fiber_profile(w, spec)
    t_top = 1.15 * max(prof.t0, prof.t1 or 0.0, prof.T)
    ts = np.linspace(0.0, t_top, samples)
    rows = [[t, phi(w, spec, t, 0), phi(w, spec, t, 1)] for t in ts[1:]]
    rows.insert(0, [0.0, 0.0, phi(w, spec, 0.0, 1)])
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "fiber.csv", ["t", "phi", "dphi"], rows)
    return {"case": prof.case, "T": prof.T, "t0": prof.t0,
            "t1": prof.t1, "t2": prof.t2, "margin": prof.margin}


def run_orlicz(cfg: RunConfig, out: Path, grid_refine: int = 1, seed: int = 0) -> dict:
    spec = build_spec(cfg, grid_refine)
    p, q = cfg.p, cfg.q
    w = _canonical_direction(spec)
    bounds = orlicz_norm_bounds(w, p, q)
    payload = {
        "direction": {
            "lower": bounds.lower,
            "upper": bounds.upper,
            "tightened_upper": bounds.tightened_upper,
            "gamma_measure": bounds.gamma_measure,
            "tau": bounds.tau,
        },
        "forcing": {
            "dual_norm": dual_norm(spec.g, p, q),
            "norm_p_conj": lp_norm(spec.g, p / (p - 1.0)),
            "norm_q_conj": lp_norm(spec.g, q / (q - 1.0)),
            "norm_2N_over_Nplus2": lp_norm(spec.g, 2.0 * cfg.N / (cfg.N + 2.0)),
        },
        "small_branch_norm_bound": small_branch_norm_bound(spec),
        "sobolev_constant": sobolev_constant(spec.grid),
        "seed": seed,
    }
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "orlicz.json", payload)
    return payload


def run_verify(cfg: RunConfig, out: Path, seed: int = 0) -> bool:
    from .config import build_params

    report = verify_hypotheses(build_params(cfg))
    payload = {
        "passed": report.passed,
        "checked_points": report.checked_points,
        "margins": report.margins,
        "coefficients": {
            "A": report.coefficients.A,
            "B": report.coefficients.B,
            "C": report.coefficients.C,
            "D": report.coefficients.D,
            "limit_zero": report.coefficients.limit_zero,
            "limit_infinity": report.coefficients.limit_infinity,
        },
        "c0_largest": report.c0_largest,
        "c2_smallest": report.c2_smallest,
        # Bracket failures carry no sample point; map their NaN slot to null.
        "failures": [
            {"s": None if math.isnan(f.s) else f.s,
             "hypothesis": f.hypothesis, "lhs": f.lhs, "rhs": f.rhs}
            for f in report.failures[:20]
        ],
        "seed": seed,
    }
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "hypotheses.json", payload)
    return report.passed


def _parse_lambda_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --lambda-list {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neharipde",
        description="Two-branch solver for -Lap u + V u = f'(u) + g on radial grids")
    parser.add_argument("--config", type=Path, default=None,
                        help="key-value config file (defaults built in)")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed echoed into the artifacts")
    parser.add_argument("--grid-refine", type=int, default=1,
                        help="multiply the node count by this integer")
    parser.add_argument("--lambda-list", type=str, default=None,
                        help="comma separated forcing scales for sweep")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "fiber", "orlicz", "verify-f"):
        sub.add_parser(name)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else default_config()
        if args.command == "solve":
            levels = run_solve(cfg, args.out, args.grid_refine, args.seed)
            print(f"levels: m_g={levels['m_g']:.6g} m_1g={levels['m_1g']:.6g} "
                  f"m_V={levels['m_V']:.6g} m_0={levels['m_0']:.6g}")
        elif args.command == "sweep":
            lams = (_parse_lambda_list(args.lambda_list)
                    if args.lambda_list else list(DEFAULT_LAMBDAS))
            records = run_sweep(cfg, args.out, lams, args.grid_refine, args.seed)
            print(f"sweep: {len(records)} rows -> {args.out / 'sweep.csv'}")
        elif args.command == "fiber":
            info = run_fiber(cfg, args.out, args.grid_refine)
            print(f"fiber: case={info['case']} -> {args.out / 'fiber.csv'}")
        elif args.command == "orlicz":
            run_orlicz(cfg, args.out, args.grid_refine, args.seed)
            print(f"orlicz diagnostics -> {args.out / 'orlicz.json'}")
        elif args.command == "verify-f":
            ok = run_verify(cfg, args.out, args.seed)
            print(f"hypotheses {'passed' if ok else 'FAILED'} -> {args.out / 'hypotheses.json'}")
            return 0 if ok else 2
    except (InvalidProblemError, SolverError, FiberingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
