"""Self-similarity checks: geometric rescaling and quantum-interest fits.

Rescaling every length by 1/upsilon (widths, offsets, the feedback delay
and the soft cutoff) while boosting the coupling amplitudes appropriately
maps a protocol onto itself: the density obeys

    density_scaled(x, t) = upsilon**n * density_original(upsilon x, upsilon t)

with n the spacetime dimension, when the sender amplitude carries a factor
upsilon**((n-2)/2) and the receiver amplitude upsilon**xi with xi = n/2.
:func:`verify_scaling` measures how well the implementation honors this
identity; it should hold to quadrature accuracy, so it exercises every
numerical path at once.

Two derived fits are provided: the scaling exponent of the sender
displacement norm under width-only rescaling (analytically -(n-2)), and
the 1+1D quantum-interest tradeoff -- the separation between the energy
well and its flanking positive peaks shrinks inversely with the amount of
negative energy, giving a log-log slope of -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, InvalidGeometryError
from .field1d import ProtocolConfig, profile1d, well_metrics
from .smearing import CompositeSmearing, Smearing, SmearingSpec, compose

__all__ = [
    "ScalingTransform",
    "ScalingCheck",
    "rescale_spec",
    "rescale_config",
    "verify_scaling",
    "alpha_norm_scaling_exponent",
    "QuantumInterestFit",
    "quantum_interest_exponents",
]


@dataclass(frozen=True)
class ScalingTransform:
    """Rescaling by factor upsilon in spacetime dimension n.

    ``bob_exponent`` is the power of upsilon applied to the receiver
    amplitude; None selects the self-similar default n/2.
    """

    upsilon: float
    dimension: int = 2
    bob_exponent: float | None = None

    def __post_init__(self) -> None:
        if not (self.upsilon > 0.0 and math.isfinite(self.upsilon)):
            raise InvalidGeometryError("upsilon must be positive and finite")
        if self.dimension not in (2, 4):
            raise DimensionError("scaling supports dimensions 2 and 4")

    @property
    def xi(self) -> float:
        return (self.dimension / 2.0 if self.bob_exponent is None
                else self.bob_exponent)


def rescale_spec(spec: Smearing, upsilon: float, amplitude_power: float) -> Smearing:
    """Shrink all lengths by upsilon and boost the amplitude by upsilon**p."""
    if isinstance(spec, CompositeSmearing):
        return compose(rescale_spec(p, upsilon, amplitude_power)
                       for p in spec.parts)
    return replace(
        spec,
        amplitude=spec.amplitude * upsilon**amplitude_power,
        delta=spec.delta / upsilon,
        sigma=spec.sigma / upsilon,
        center=spec.center / upsilon,
        shell_radius=spec.shell_radius / upsilon,
    )


def rescale_config(cfg: ProtocolConfig, transform: ScalingTransform) -> ProtocolConfig:
    if transform.dimension != cfg.dimension:
        raise DimensionError("transform and config dimensions differ")
    u = transform.upsilon
    return replace(
        cfg,
        alice=rescale_spec(cfg.alice, u, (cfg.dimension - 2) / 2.0),
        bob=rescale_spec(cfg.bob, u, transform.xi),
        interaction_time=cfg.interaction_time / u,
        uv_cutoff=cfg.uv_cutoff / u,
    )


@dataclass(frozen=True)
class ScalingCheck:
    upsilon: float
    max_deviation: float
    scale: float

    @property
    def relative_deviation(self) -> float:
        return self.max_deviation / max(self.scale, 1e-300)


def verify_scaling(cfg: ProtocolConfig, transform: ScalingTransform,
                   grid, time: float) -> ScalingCheck:
    """Compare the rescaled density against the scaled-coordinate original.

    ``grid`` and ``time`` are coordinates of the RESCALED system; the
    original is evaluated at (upsilon * grid, upsilon * time).
    """
    u = transform.upsilon
    n = cfg.dimension
    scaled_cfg = rescale_config(cfg, transform)
    grid = np.asarray(grid, dtype=float)
    if n == 2:
        lhs = profile1d(scaled_cfg, grid, time).total
        rhs = u**n * profile1d(cfg, u * grid, u * time).total
    else:
        from .fieldnd import radial_profile_nd

        lhs = radial_profile_nd(scaled_cfg, grid,
                                time - scaled_cfg.interaction_time).total
        rhs = u**n * radial_profile_nd(cfg, u * grid,
                                       u * time - cfg.interaction_time).total
    dev = float(np.max(np.abs(lhs - rhs)))
    scale = float(np.max(np.abs(rhs)))
    return ScalingCheck(upsilon=u, max_deviation=dev, scale=scale)


def alpha_norm_scaling_exponent(alice: Smearing, dimension: int,
                                upsilons=(0.5, 1.0, 2.0, 5.0)) -> float:
    """Fitted log-log slope of the displacement norm under width rescaling.

    Only lengths are rescaled (amplitude kept); analytically the slope is
    -(dimension - 2).
    """
    from .field1d import alpha_norm_1d
    from .fieldnd import alpha_norm_nd

    logs_u, logs_a = [], []
    for u in upsilons:
        spec = rescale_spec(alice, u, 0.0)
        if dimension == 2:
            val = alpha_norm_1d(spec)
        else:
            val = alpha_norm_nd(spec, dimension, eps=0.0)
        logs_u.append(math.log(u))
        logs_a.append(math.log(val))
    slope = float(np.polyfit(logs_u, logs_a, 1)[0])
    return slope


@dataclass(frozen=True)
class QuantumInterestFit:
    upsilons: tuple[float, ...]
    negative_energies: tuple[float, ...]
    peak_separations: tuple[float, ...]
    well_depths: tuple[float, ...]
    separation_energy_exponent: float
    depth_upsilon_exponent: float


def quantum_interest_exponents(
    cfg: ProtocolConfig,
    eval_time: float,
    window: tuple[float, float],
    upsilons=(0.5, 1.0, 2.0, 4.0),
    pad_factor: float = 2.0,
    grid_points: int = 1201,
) -> QuantumInterestFit:
    """Quantum-interest tradeoff under self-similar rescaling (1+1D).

    For each upsilon the rescaled well is measured in the rescaled window;
    the log-log slope of peak separation against |negative energy| is the
    tradeoff exponent (analytically -1: deeper, more negative wells must sit
    closer to their compensating positive peaks).
    """
    if cfg.dimension != 2:
        raise DimensionError("quantum-interest fits are for 1+1D setups")
    lo, hi = window
    if not hi > lo:
        raise InvalidGeometryError("window must have positive width")
    pad = pad_factor * (hi - lo)
    energies, seps, depths = [], [], []
    for u in upsilons:
        tr = ScalingTransform(u, 2)
        cfg_u = rescale_config(cfg, tr)
        grid = np.linspace((lo - pad) / u, (hi + pad) / u, grid_points)
        profile = profile1d(cfg_u, grid, eval_time / u)
        metrics = well_metrics(profile, (lo / u, hi / u))
        energies.append(abs(metrics.integrated_negative))
        seps.append(metrics.peak_separation)
        depths.append(metrics.depth)
    slope_sep = float(np.polyfit(np.log(energies), np.log(seps), 1)[0])
    slope_depth = float(np.polyfit(np.log(upsilons), np.log(depths), 1)[0])
    return QuantumInterestFit(
        upsilons=tuple(float(u) for u in upsilons),
        negative_energies=tuple(energies),
        peak_separations=tuple(seps),
        well_depths=tuple(depths),
        separation_energy_exponent=slope_sep,
        depth_upsilon_exponent=slope_depth,
    )
