"""Flat key-value run configuration and the named profile families.

The configuration format is one `key = value` per line, `#` comments,
blank lines ignored.  Unknown keys are rejected outright: a typo in an
experiment file should fail loudly, not fall back to a default.

Profile families for the potential and the forcing:

    gaussian      A * exp(-(r/w)^2)
    compact_bump  A * exp(1 - 1/(1 - (r/w)^2)) inside r < w, zero outside
    power_tail    A * (1 + (r/w)^2)^-2

A is the signed amplitude (the profile value at r = 0), w the width.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable

import numpy as np

from .grid import ProblemSpec, RadialGrid
from .nonlinearity import DoublePowerParams

__all__ = [
    "RunConfig",
    "parse_config",
    "default_config",
    "make_profile",
    "build_grid",
    "build_spec",
    "PROFILE_FAMILIES",
]


def _gaussian(amplitude: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda r: amplitude * np.exp(-((r / width) ** 2))


def _compact_bump(amplitude: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    def profile(r: np.ndarray) -> np.ndarray:
        x = np.asarray(r) / width
        out = np.zeros_like(x, dtype=float)
        inside = x < 1.0
        xi = x[inside]
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        return out
    return profile


def _power_tail(amplitude: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda r: amplitude * (1.0 + (r / width) ** 2) ** -2.0


PROFILE_FAMILIES: dict[str, Callable[[float, float], Callable]] = {
    "gaussian": _gaussian,
    "compact_bump": _compact_bump,
    "power_tail": _power_tail,
}


def make_profile(name: str, amplitude: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    if name not in PROFILE_FAMILIES:
        raise ValueError(
            f"unknown profile family {name!r}; choose from {sorted(PROFILE_FAMILIES)}")
    if width <= 0.0:
        raise ValueError(f"profile width must be positive, got {width}")
    return PROFILE_FAMILIES[name](amplitude, width)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, in plain numbers and family names."""

    N: int = 3
    R_max: float = 30.0
    M: int = 3000
    p: float = 5.5
    q: float = 6.5
    eps: float = 0.5
    mu1: float = 5.5
    c0: float = 0.45
    c2: float = 36.0
    V_profile: str = "gaussian"
    V_amplitude: float = -0.4
    V_width: float = 2.0
    g_profile: str = "gaussian"
    g_amplitude: float = 0.04
    g_width: float = 1.5


_INT_KEYS = {"N", "M"}
_STR_KEYS = {"V_profile", "g_profile"}
_ALL_KEYS = {f.name for f in fields(RunConfig)}


def default_config() -> RunConfig:
    return RunConfig()


def parse_config(path: str | Path) -> RunConfig:
    """Read a key-value file; reject unknown keys and repeated keys."""
    text = Path(path).read_text()
    seen: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ValueError(
                f"{path}:{lineno}: unknown key {key!r}; allowed keys: {sorted(_ALL_KEYS)}")
        if key in seen:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        if key in _STR_KEYS:
            seen[key] = value
        elif key in _INT_KEYS:
            seen[key] = int(value)
        else:
            seen[key] = float(value)
    return RunConfig(**seen)  # type: ignore[arg-type]


def build_grid(cfg: RunConfig, grid_refine: int = 1) -> RadialGrid:
    if grid_refine < 1 or int(grid_refine) != grid_refine:
        raise ValueError(f"grid_refine must be a positive integer, got {grid_refine}")
    return RadialGrid(cfg.N, cfg.R_max, cfg.M * int(grid_refine))


def build_params(cfg: RunConfig) -> DoublePowerParams:
    return DoublePowerParams(N=cfg.N, p=cfg.p, q=cfg.q, eps=cfg.eps,
                             mu1=cfg.mu1, c0=cfg.c0, c2=cfg.c2)


def build_spec(cfg: RunConfig, grid_refine: int = 1,
               g_scale: float = 1.0) -> ProblemSpec:
    """Instantiate the problem on its grid; g_scale multiplies the forcing."""
    grid = build_grid(cfg, grid_refine)
    V = grid.from_profile(make_profile(cfg.V_profile, cfg.V_amplitude, cfg.V_width))
    g = grid.from_profile(make_profile(cfg.g_profile, cfg.g_amplitude * g_scale, cfg.g_width))
    return ProblemSpec(params=build_params(cfg), V=V, g=g)
