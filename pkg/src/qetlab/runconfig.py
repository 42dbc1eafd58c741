"""JSON run configurations: strict parsing, validation and serialization.

The on-disk format is a single JSON object; unknown keys anywhere are
rejected with the dotted path of the offending entry, so typos fail loudly
instead of silently using defaults.  ``parse(serialize(cfg)) == cfg`` holds
exactly (floats survive via shortest-repr JSON round-tripping).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .field1d import ProtocolConfig
from .protocol import DetectorState, compose_bobs
from .smearing import FAMILIES, SmearingSpec

__all__ = [
    "GridSpec",
    "OptimizerSettings",
    "RunConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "save_config",
    "build_protocol",
    "bundled_config_path",
    "bundled_config_names",
]


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ConfigError("grid.hi must exceed grid.lo")
        if self.points < 2:
            raise ConfigError("grid.points must be >= 2")


@dataclass(frozen=True)
class OptimizerSettings:
    free: tuple[str, ...]
    bounds: dict
    restarts: int = 6
    seed: int = 0
    grid_points: int = 241
    max_iterations: int = 400


@dataclass(frozen=True)
class RunConfig:
    dimension: int
    alice: SmearingSpec
    bobs: tuple[SmearingSpec, ...]
    interaction_time: float
    detector: DetectorState
    times: tuple[float, ...]
    grid: GridSpec
    uv_cutoff: float = 0.0
    tol: float = 1e-10
    window: tuple[float, float] | None = None
    eval_time: float | None = None
    optimizer: OptimizerSettings | None = None
    precision: int = 17


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _require_mapping(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    return obj

def _reject_unknown(obj: dict, allowed, path: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(
            f"{path}: unknown key(s) {unknown}; allowed: {sorted(allowed)}"
        )

def _get(obj: dict, key: str, path: str, required: bool = True, default=None):
    if key not in obj:
        if required:
            raise ConfigError(f"{path}: missing required key '{key}'")
        return default
    return obj[key]

def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)

def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _parse_smearing(obj, path: str) -> SmearingSpec:
    obj = _require_mapping(obj, path)
    allowed = {"family", "amplitude", "delta", "sigma", "center", "shell_radius"}
    _reject_unknown(obj, allowed, path)
    family = _get(obj, "family", path)
    if family not in FAMILIES:
        raise ConfigError(f"{path}.family: {family!r} is not one of {FAMILIES}")
    kwargs = {
        "family": family,
        "amplitude": _number(_get(obj, "amplitude", path), f"{path}.amplitude"),
        "delta": _number(_get(obj, "delta", path), f"{path}.delta"),
    }
    for key in ("sigma", "center", "shell_radius"):
        if key in obj:
            kwargs[key] = _number(obj[key], f"{path}.{key}")
    try:
        return SmearingSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_detector(obj, path: str) -> DetectorState:
    obj = _require_mapping(obj, path)
    if "sigma_y" in obj:
        _reject_unknown(obj, {"sigma_y"}, path)
        sign = _integer(obj["sigma_y"], f"{path}.sigma_y")
        if sign not in (1, -1):
            raise ConfigError(f"{path}.sigma_y: must be 1 or -1")
        return DetectorState.sigma_y_eigenstate(sign)
    _reject_unknown(obj, {"plus", "minus"}, path)

    def complex_pair(value, p):
        if (not isinstance(value, list) or len(value) != 2):
            raise ConfigError(f"{p}: expected [real, imag]")
        return complex(_number(value[0], p), _number(value[1], p))

    try:
        return DetectorState(
            complex_pair(_get(obj, "plus", path), f"{path}.plus"),
            complex_pair(_get(obj, "minus", path), f"{path}.minus"),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_pair(value, path: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"{path}: expected [lo, hi]")
    lo, hi = (_number(v, path) for v in value)
    if not hi > lo:
        raise ConfigError(f"{path}: hi must exceed lo")
    return lo, hi


def _parse_optimizer(obj, path: str) -> OptimizerSettings:
    obj = _require_mapping(obj, path)
    allowed = {"free", "bounds", "restarts", "seed", "grid_points",
               "max_iterations"}
    _reject_unknown(obj, allowed, path)
    free = _get(obj, "free", path)
    if (not isinstance(free, list) or not free
            or not all(isinstance(f, str) for f in free)):
        raise ConfigError(f"{path}.free: expected a nonempty list of names")
    bounds_obj = _require_mapping(_get(obj, "bounds", path), f"{path}.bounds")
    _reject_unknown(bounds_obj, set(free), f"{path}.bounds")
    bounds = {name: _parse_pair(val, f"{path}.bounds.{name}")
              for name, val in bounds_obj.items()}
    return OptimizerSettings(
        free=tuple(free),
        bounds=bounds,
        restarts=_integer(obj.get("restarts", 6), f"{path}.restarts"),
        seed=_integer(obj.get("seed", 0), f"{path}.seed"),
        grid_points=_integer(obj.get("grid_points", 241), f"{path}.grid_points"),
        max_iterations=_integer(obj.get("max_iterations", 400),
                                f"{path}.max_iterations"),
    )


_TOP_KEYS = {
    "dimension", "alice", "bobs", "interaction_time", "detector", "times",
    "grid", "uv_cutoff", "tol", "window", "eval_time", "optimizer",
    "precision",
}


def parse_config(data) -> RunConfig:
    """Build a validated RunConfig from a JSON string or a parsed dict."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    root = _require_mapping(data, "$")
    _reject_unknown(root, _TOP_KEYS, "$")
    dimension = _integer(_get(root, "dimension", "$"), "$.dimension")
    if dimension not in (2, 4):
        raise ConfigError("$.dimension: must be 2 or 4")
    bobs_obj = _get(root, "bobs", "$")
    if not isinstance(bobs_obj, list) or not bobs_obj:
        raise ConfigError("$.bobs: expected a nonempty list of smearings")
    bobs = tuple(_parse_smearing(b, f"$.bobs[{i}]")
                 for i, b in enumerate(bobs_obj))
    times_obj = _get(root, "times", "$")
    if not isinstance(times_obj, list) or not times_obj:
        raise ConfigError("$.times: expected a nonempty list of numbers")
    times = tuple(_number(t, f"$.times[{i}]") for i, t in enumerate(times_obj))
    grid_obj = _require_mapping(_get(root, "grid", "$"), "$.grid")
    _reject_unknown(grid_obj, {"lo", "hi", "points"}, "$.grid")
    grid = GridSpec(
        lo=_number(_get(grid_obj, "lo", "$.grid"), "$.grid.lo"),
        hi=_number(_get(grid_obj, "hi", "$.grid"), "$.grid.hi"),
        points=_integer(_get(grid_obj, "points", "$.grid"), "$.grid.points"),
    )
    window = (None if "window" not in root
              else _parse_pair(root["window"], "$.window"))
    eval_time = (None if "eval_time" not in root
                 else _number(root["eval_time"], "$.eval_time"))
    optimizer = (None if "optimizer" not in root
                 else _parse_optimizer(root["optimizer"], "$.optimizer"))
    cfg = RunConfig(
        dimension=dimension,
        alice=_parse_smearing(_get(root, "alice", "$"), "$.alice"),
        bobs=bobs,
        interaction_time=_number(_get(root, "interaction_time", "$"),
                                 "$.interaction_time"),
        detector=_parse_detector(_get(root, "detector", "$"), "$.detector"),
        times=times,
        grid=grid,
        uv_cutoff=_number(root.get("uv_cutoff", 0.0), "$.uv_cutoff"),
        tol=_number(root.get("tol", 1e-10), "$.tol"),
        window=window,
        eval_time=eval_time,
        optimizer=optimizer,
        precision=_integer(root.get("precision", 17), "$.precision"),
    )
    build_protocol(cfg)  # surface causality/geometry errors at parse time
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def bundled_config_path(name: str) -> Path:
    """Path of a packaged example configuration (e.g. 'fig1_lorentzian')."""
    if not name.endswith(".json"):
        name = name + ".json"
    path = Path(str(resources.files(__package__) / "configs" / name))
    if not path.is_file():
        raise ConfigError(
            f"no bundled config named {name!r}; "
            f"available: {bundled_config_names()}"
        )
    return path


def bundled_config_names() -> list[str]:
    """Stems of all packaged example configurations."""
    root = resources.files(__package__) / "configs"
    return sorted(p.name[:-5] for p in root.iterdir()
                  if p.name.endswith(".json"))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _smearing_dict(spec: SmearingSpec) -> dict:
    out = {"family": spec.family, "amplitude": spec.amplitude,
           "delta": spec.delta}
    if spec.sigma:
        out["sigma"] = spec.sigma
    if spec.center:
        out["center"] = spec.center
    if spec.shell_radius:
        out["shell_radius"] = spec.shell_radius
    return out


def config_dict(cfg: RunConfig) -> dict:
    out = {
        "dimension": cfg.dimension,
        "alice": _smearing_dict(cfg.alice),
        "bobs": [_smearing_dict(b) for b in cfg.bobs],
        "interaction_time": cfg.interaction_time,
        "detector": {
            "plus": [cfg.detector.amplitude_plus.real,
                     cfg.detector.amplitude_plus.imag],
            "minus": [cfg.detector.amplitude_minus.real,
                      cfg.detector.amplitude_minus.imag],
        },
        "times": list(cfg.times),
        "grid": asdict(cfg.grid),
        "uv_cutoff": cfg.uv_cutoff,
        "tol": cfg.tol,
        "precision": cfg.precision,
    }
    if cfg.window is not None:
        out["window"] = list(cfg.window)
    if cfg.eval_time is not None:
        out["eval_time"] = cfg.eval_time
    if cfg.optimizer is not None:
        opt = cfg.optimizer
        out["optimizer"] = {
            "free": list(opt.free),
            "bounds": {k: list(v) for k, v in opt.bounds.items()},
            "restarts": opt.restarts,
            "seed": opt.seed,
            "grid_points": opt.grid_points,
            "max_iterations": opt.max_iterations,
        }
    return out


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_dict(cfg), indent=2) + "\n"


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_config(cfg))


def build_protocol(cfg: RunConfig) -> ProtocolConfig:
    """Assemble the numerical protocol configuration (composing receivers)."""
    bob = cfg.bobs[0] if len(cfg.bobs) == 1 else compose_bobs(cfg.bobs)
    try:
        return ProtocolConfig(
            alice=cfg.alice,
            bob=bob,
            interaction_time=cfg.interaction_time,
            detector=cfg.detector,
            dimension=cfg.dimension,
            uv_cutoff=cfg.uv_cutoff,
            tol=cfg.tol,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
