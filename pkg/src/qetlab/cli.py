"""Command-line entry points.

Subcommands operate on a JSON run configuration (see qetlab.runconfig):

* ``density1d``   CSV density profiles for a 1+1D setup
* ``density3d``   CSV radial density profiles for a 3+1D setup
* ``optimize``    minimize the windowed energy over receiver parameters
* ``scale-check`` verify the rescaling identity and norm scaling exponent
* ``equiv-check`` classical- vs quantum-channel feedback comparison
* ``oracle-check``compare the closed-form density against the lattice oracle

Exit status: 0 on success, 2 for configuration problems, 3 for numerical
failures (non-convergence, no feasible point, resolution limits).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import lattice as lat
from .errors import (
    ConfigError,
    ExtrapolationError,
    NoFeasiblePointError,
    NonconvergenceError,
    NoNegativeRegionError,
    QetlabError,
    ResolutionError,
)
from .field1d import DensityProfile, profile1d, well_metrics
from .optimizer import OptimizationProblem, optimize as run_optimize
from .protocol import locc_branch_density
from .runconfig import RunConfig, build_protocol, load_config
from .scaling import (
    ScalingTransform,
    alpha_norm_scaling_exponent,
    verify_scaling,
)

_NUMERICAL_ERRORS = (NonconvergenceError, ExtrapolationError, ResolutionError,
                     NoNegativeRegionError, NoFeasiblePointError)


def _grid(run: RunConfig) -> np.ndarray:
    return np.linspace(run.grid.lo, run.grid.hi, run.grid.points)


def _times(run: RunConfig, override) -> list[float]:
    return [float(t) for t in override] if override else list(run.times)


def _precision(run: RunConfig, override) -> int:
    return int(override) if override else run.precision


def _write_csv(profile: DensityProfile, handle, precision: int,
               coord: str = "x") -> None:
    fmt = f"%.{precision}g"
    handle.write(f"{coord},total,alice,bob,qet\n")
    for row in zip(profile.grid, profile.total, profile.alice, profile.bob,
                   profile.qet):
        handle.write(",".join(fmt % v for v in row) + "\n")


def _csv_outputs(out, times):
    """One output target per time: explicit path, numbered paths, or stdout."""
    if out is None:
        return [None] * len(times)
    path = Path(out)
    if len(times) == 1:
        return [path]
    return [path.with_name(f"{path.stem}_t{i}{path.suffix}")
            for i in range(len(times))]


def _emit_csv(profile: DensityProfile, target, precision: int,
              coord: str = "x") -> str | None:
    if target is None:
        _write_csv(profile, sys.stdout, precision, coord)
        return None
    with open(target, "w", encoding="utf-8") as handle:
        _write_csv(profile, handle, precision, coord)
    return str(target)


def _emit_report(report: dict, out) -> None:
    text = json.dumps(report, indent=2, default=float) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_density1d(args) -> int:
    run = load_config(args.config)
    if run.dimension != 2:
        raise ConfigError("density1d requires a dimension-2 configuration")
    cfg = build_protocol(run)
    times = _times(run, args.times)
    grid = _grid(run)
    precision = _precision(run, args.precision)
    written = []
    for time, target in zip(times, _csv_outputs(args.out, times)):
        profile = profile1d(cfg, grid, time)
        name = _emit_csv(profile, target, precision)
        if name:
            written.append(name)
    if written:
        _emit_report({"command": "density1d", "times": times,
                      "files": written}, None)
    return 0


def _cmd_density3d(args) -> int:
    from .fieldnd import radial_profile_nd

    run = load_config(args.config)
    if run.dimension != 4:
        raise ConfigError("density3d requires a dimension-4 configuration")
    cfg = build_protocol(run)
    times = _times(run, args.times)
    grid = _grid(run)
    precision = _precision(run, args.precision)
    written = []
    for time, target in zip(times, _csv_outputs(args.out, times)):
        profile = radial_profile_nd(cfg, grid, time - cfg.interaction_time)
        name = _emit_csv(profile, target, precision, coord="r")
        if name:
            written.append(name)
    if written:
        _emit_report({"command": "density3d", "times": times,
                      "files": written}, None)
    return 0


def _cmd_optimize(args) -> int:
    run = load_config(args.config)
    if run.optimizer is None:
        raise ConfigError("$.optimizer section is required for optimize")
    if run.eval_time is None:
        raise ConfigError("$.eval_time is required for optimize")
    cfg = build_protocol(run)
    opt = run.optimizer
    problem = OptimizationProblem(
        config=cfg,
        free=opt.free,
        bounds=opt.bounds,
        window=run.window,
        eval_time=run.eval_time,
        restarts=opt.restarts,
        seed=opt.seed,
        grid_points=opt.grid_points,
        max_iterations=opt.max_iterations,
    )
    result = run_optimize(problem)
    report = {
        "command": "optimize",
        "best_params": result.params,
        "window": list(problem.window),
        "window_energy": result.objective,
        "evaluations": result.evaluations,
        "restarts": len(result.trace),
    }
    if run.dimension == 2:
        lo, hi = problem.window
        pad = 2.0 * (hi - lo)
        grid = np.linspace(lo - pad, hi + pad, 1601)
        profile = profile1d(result.config, grid, run.eval_time)
        try:
            metrics = well_metrics(profile, problem.window)
            report["well"] = {
                "depth": metrics.depth,
                "width": metrics.width,
                "integrated_negative": metrics.integrated_negative,
                "peak_separation": metrics.peak_separation,
            }
        except NoNegativeRegionError:
            report["well"] = None
    _emit_report(report, args.out)
    return 0


def _cmd_scale_check(args) -> int:
    run = load_config(args.config)
    cfg = build_protocol(run)
    upsilons = [float(u) for u in (args.upsilon or [0.5, 2.0, 5.0])]
    time = run.eval_time if run.eval_time is not None else run.times[0]
    grid = _grid(run)
    checks = []
    for u in upsilons:
        chk = verify_scaling(cfg, ScalingTransform(u, run.dimension),
                             grid / u, time / u)
        checks.append({"upsilon": u, "max_deviation": chk.max_deviation,
                       "scale": chk.scale,
                       "relative_deviation": chk.relative_deviation})
    exponent = alpha_norm_scaling_exponent(cfg.alice, run.dimension)
    _emit_report({
        "command": "scale-check",
        "checks": checks,
        "alpha_norm_exponent": exponent,
        "alpha_norm_exponent_expected": -(run.dimension - 2),
    }, args.out)
    return 0


def _cmd_equiv_check(args) -> int:
    run = load_config(args.config)
    cfg = build_protocol(run)
    if run.dimension != 2:
        raise ConfigError("equiv-check requires a dimension-2 configuration")
    time = run.eval_time if run.eval_time is not None else run.times[0]
    grid = _grid(run)
    loqc = profile1d(cfg, grid, time).total
    branch_e = np.array([locc_branch_density(cfg, x, time, "e") for x in grid])
    branch_g = np.array([locc_branch_density(cfg, x, time, "g") for x in grid])
    scale = float(np.max(np.abs(loqc)))
    report = {
        "command": "equiv-check",
        "time": time,
        "sigma_y": cfg.detector.sigma_y(),
        "max_density": scale,
        "max_branch_average_residual":
            float(np.max(np.abs(0.5 * (branch_e + branch_g) - loqc))),
        "max_branch_difference": float(np.max(np.abs(branch_e - branch_g))),
    }
    if len(run.bobs) > 1:
        total = profile1d(cfg, grid, time)
        partial = np.zeros_like(grid)
        for bob in run.bobs:
            single = profile1d(cfg.with_bob(bob), grid, time)
            partial += single.bob + single.qet
        report["multi_receiver_residual"] = float(
            np.max(np.abs((total.bob + total.qet) - partial)))
    _emit_report(report, args.out)
    return 0


def _cmd_oracle_check(args) -> int:
    run = load_config(args.config)
    if run.dimension != 2:
        raise ConfigError("oracle-check requires a dimension-2 configuration")
    cfg = build_protocol(run)
    times = _times(run, args.times)
    grid = _grid(run)
    rows = []
    for time in times:
        if args.length and args.modes:
            lattice = lat.LatticeSpec(float(args.length), int(args.modes))
        else:
            lattice = lat.auto_lattice(cfg, time)
            if args.length:
                lattice = lat.LatticeSpec(float(args.length), lattice.n_modes)
            if args.modes:
                lattice = lat.LatticeSpec(lattice.length, int(args.modes))
        closed = profile1d(cfg, grid, time).total
        oracle = lat.oracle_density(cfg, lattice, grid, time)
        scale = max(float(np.max(np.abs(closed))), 1e-300)
        rows.append({
            "time": time,
            "length": lattice.length,
            "n_modes": lattice.n_modes,
            "max_abs_difference": float(np.max(np.abs(closed - oracle))),
            "relative_difference": float(np.max(np.abs(closed - oracle))) / scale,
            "boundary_echo": lat.boundary_echo(cfg, lattice, time),
        })
    _emit_report({"command": "oracle-check", "rows": rows}, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qetlab",
        description="Energy-density laboratory for feedback-displaced fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.set_defaults(handler=handler)
        return p

    p = add("density1d", _cmd_density1d, "1+1D density profiles as CSV")
    p.add_argument("--times", type=float, nargs="+", default=None)
    p.add_argument("--precision", type=int, default=None)

    p = add("density3d", _cmd_density3d, "3+1D radial density profiles as CSV")
    p.add_argument("--times", type=float, nargs="+", default=None)
    p.add_argument("--precision", type=int, default=None)

    add("optimize", _cmd_optimize, "minimize the windowed energy")

    p = add("scale-check", _cmd_scale_check, "verify the rescaling identity")
    p.add_argument("--upsilon", type=float, nargs="+", default=None)

    add("equiv-check", _cmd_equiv_check,
        "classical- vs quantum-channel feedback comparison")

    p = add("oracle-check", _cmd_oracle_check,
            "compare against the lattice mode-sum oracle")
    p.add_argument("--times", type=float, nargs="+", default=None)
    p.add_argument("--length", type=float, default=None)
    p.add_argument("--modes", type=int, default=None)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, QetlabError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
