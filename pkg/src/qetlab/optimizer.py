"""Receiver-parameter optimization of the post-feedback energy well.

The objective is the field energy integrated over a spatial window at a
chosen evaluation time -- the deepest extractable well makes it as negative
as possible.  Free parameters address the receiver smearing (amplitude,
width, position, plateau, shell radius) or the sender amplitude; candidate
geometries that violate causality or basic validity count as infeasible
(+inf) rather than raising, so the simplex can recover from bad corners.

Optimization is local (Nelder-Mead within bounds) with a deterministic
seeded multistart; results are reproducible for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize as sciopt

from .errors import (
    CausalityError,
    InvalidGeometryError,
    NoFeasiblePointError,
    NonconvergenceError,
)
from .field1d import ProtocolConfig, profile1d
from .smearing import SmearingSpec

__all__ = [
    "OptimizationProblem",
    "OptimizationResult",
    "objective",
    "optimize",
]

_BOB_PARAMS = {
    "bob_amplitude": "amplitude",
    "bob_delta": "delta",
    "bob_sigma": "sigma",
    "bob_center": "center",
    "bob_shell_radius": "shell_radius",
}
_KNOWN = set(_BOB_PARAMS) | {"alice_amplitude"}


@dataclass(frozen=True)
class OptimizationProblem:
    """Windowed-energy minimization over selected protocol parameters.

    ``window=None`` selects the default target region: centered on the
    sender's right-moving pulse center (sender center + eval_time) with
    total width half the sender width.
    """

    config: ProtocolConfig
    free: tuple[str, ...]
    bounds: dict
    eval_time: float
    window: tuple[float, float] | None = None
    restarts: int = 6
    seed: int = 0
    grid_points: int = 241
    max_iterations: int = 400

    def __post_init__(self) -> None:
        if self.window is None:
            alice = self.config.alice
            parts = (alice.parts if not isinstance(alice, SmearingSpec)
                     else (alice,))
            width = max(p.delta for p in parts)
            mid = parts[0].center + self.eval_time
            object.__setattr__(self, "window",
                               (mid - width / 4.0, mid + width / 4.0))
        if not self.free:
            raise InvalidGeometryError("at least one free parameter is required")
        unknown = [name for name in self.free if name not in _KNOWN]
        if unknown:
            raise InvalidGeometryError(
                f"unknown free parameters {unknown}; known: {sorted(_KNOWN)}"
            )
        missing = [name for name in self.free if name not in self.bounds]
        if missing:
            raise InvalidGeometryError(f"missing bounds for {missing}")
        for name in self.free:
            lo, hi = self.bounds[name]
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidGeometryError(f"invalid bounds for {name}: {lo}, {hi}")
        lo, hi = self.window
        if not hi > lo:
            raise InvalidGeometryError("window must have positive width")
        if self.eval_time < self.config.interaction_time:
            raise InvalidGeometryError(
                "evaluation time must not precede the feedback time"
            )
        if self.grid_points < 200:
            raise InvalidGeometryError("windowed energy needs >= 200 grid points")
        if any(name in _BOB_PARAMS for name in self.free) and not isinstance(
                self.config.bob, SmearingSpec):
            raise InvalidGeometryError(
                "receiver parameters can only be optimized for a single "
                "elementary receiver smearing"
            )


@dataclass
class OptimizationResult:
    config: ProtocolConfig
    params: dict
    objective: float
    evaluations: int
    trace: list = field(default_factory=list)


def _apply_params(problem: OptimizationProblem, values) -> ProtocolConfig:
    cfg = problem.config
    bob_changes = {}
    alice_amp = None
    for name, value in zip(problem.free, values):
        if name == "alice_amplitude":
            alice_amp = float(value)
        else:
            bob_changes[_BOB_PARAMS[name]] = float(value)
    bob = replace(cfg.bob, **bob_changes) if bob_changes else cfg.bob
    alice = (replace(cfg.alice, amplitude=alice_amp)
             if alice_amp is not None else cfg.alice)
    return replace(cfg, alice=alice, bob=bob)


def _window_energy(problem: OptimizationProblem, cfg: ProtocolConfig,
                   grid: np.ndarray) -> float:
    if cfg.dimension == 2:
        profile = profile1d(cfg, grid, problem.eval_time)
        return float(np.trapezoid(profile.total, grid))
    from .fieldnd import radial_profile_nd

    profile = radial_profile_nd(cfg, grid,
                                problem.eval_time - cfg.interaction_time)
    return float(4.0 * math.pi * np.trapezoid(grid**2 * profile.total, grid))


def objective(problem: OptimizationProblem, values) -> float:
    """Windowed energy of the candidate; +inf when the candidate is invalid."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.size != len(problem.free):
        raise InvalidGeometryError(
            f"expected {len(problem.free)} parameter values, got {values.size}"
        )
    grid = np.linspace(problem.window[0], problem.window[1],
                       problem.grid_points)
    try:
        cfg = _apply_params(problem, values)
    except (CausalityError, InvalidGeometryError, ValueError):
        return math.inf
    try:
        return _window_energy(problem, cfg, grid)
    except (NonconvergenceError, CausalityError, InvalidGeometryError):
        return math.inf


def _start_points(problem: OptimizationProblem) -> np.ndarray:
    lo = np.array([problem.bounds[n][0] for n in problem.free])
    hi = np.array([problem.bounds[n][1] for n in problem.free])
    rng = np.random.default_rng(problem.seed)
    starts = [0.5 * (lo + hi)]
    for _ in range(problem.restarts - 1):
        starts.append(lo + (hi - lo) * rng.uniform(0.05, 0.95, size=lo.size))
    return np.array(starts)


def optimize(problem: OptimizationProblem) -> OptimizationResult:
    """Deterministic multistart Nelder-Mead over the declared bounds."""
    bounds = sciopt.Bounds(
        np.array([problem.bounds[n][0] for n in problem.free]),
        np.array([problem.bounds[n][1] for n in problem.free]),
    )
    eval_count = 0
    trace: list = []

    def run_one(x0):
        nonlocal eval_count
        history: list = []
        best = [math.inf]

        def fun(x):
            nonlocal eval_count
            eval_count += 1
            val = objective(problem, x)
            if val < best[0]:
                best[0] = val
            history.append(best[0])
            return val

        res = sciopt.minimize(
            fun, x0, method="Nelder-Mead", bounds=bounds,
            options={"maxiter": problem.max_iterations, "xatol": 1e-10,
                     "fatol": 1e-14, "adaptive": True},
        )
        trace.append(history)
        return res

    best_res = None
    for x0 in _start_points(problem):
        res = run_one(x0)
        if not np.isfinite(res.fun):
            continue
        if best_res is None or res.fun < best_res.fun:
            best_res = res
    if best_res is None:
        raise NoFeasiblePointError(
            "no feasible parameter point found within the given bounds"
        )
    params = {name: float(v) for name, v in zip(problem.free, best_res.x)}
    return OptimizationResult(
        config=_apply_params(problem, best_res.x),
        params=params,
        objective=float(best_res.fun),
        evaluations=eval_count,
        trace=trace,
    )
