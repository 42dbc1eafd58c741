"""Spherically symmetric 3+1D densities via Bessel-kernel mode integrals.

All observables reduce to six one-dimensional radial wavenumber integrals
("moment integrals") of the spherical transforms of the two smearings,
with kernels j0/j1 and trigonometric time factors, regulated by a soft
exponential cutoff exp(-2 eps k).  Physical values are obtained by
evaluating at a decreasing cutoff sequence and extrapolating polynomially
to eps = 0; a configuration with ``uv_cutoff > 0`` is instead evaluated at
that fixed cutoff with no extrapolation.

The n = 2 specialization of the same kernel formulas reproduces the
closed-form 1+1D density (this is covered by the test-suite), which ties
the two code paths to a single definition of the moment integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import (
    DimensionError,
    ExtrapolationError,
    InvalidGeometryError,
    NonconvergenceError,
)
from .field1d import DensityComponents, DensityProfile, ProtocolConfig
from .protocol import MomentIntegrals, MomentPair
from .smearing import (
    CompositeSmearing,
    Smearing,
    SmearingSpec,
    fourier1d,
    peak_value,
    radial_ft,
    support_interval,
    unit_amplitude,
)

__all__ = [
    "IntegralSet",
    "alpha_norm_nd",
    "eps_sequence",
    "richardson_limit",
    "i_integrals",
    "i_integrals_direct",
    "stress_energy_nd",
    "radial_profile_nd",
    "total_energy_nd",
]

_GL_ORDER = 12
_CHUNK = 4096
_DIVERGENCE_RATIO = 0.8


# ---------------------------------------------------------------------------
# cutoff handling
# ---------------------------------------------------------------------------

def _min_width(cfg: ProtocolConfig) -> float:
    return min(spec.delta for spec in cfg.smearing_parts())


def eps_sequence(cfg: ProtocolConfig) -> tuple[float, ...]:
    """Cutoffs to evaluate at: fixed if configured, else a halving triple."""
    if cfg.uv_cutoff > 0.0:
        return (cfg.uv_cutoff,)
    eps0 = 1e-2 * _min_width(cfg)
    return (eps0, eps0 / 2.0, eps0 / 4.0)


def richardson_limit(eps_values, samples):
    """Polynomial extrapolation of cutoff samples to zero cutoff.

    ``samples`` may be scalars or same-shape arrays, ordered like
    ``eps_values`` (decreasing cutoff).  A single sample is returned as-is.
    Successive differences must shrink; if they fail to, the cutoff limit
    does not exist at this order and ExtrapolationError is raised.
    """
    if len(eps_values) == 1:
        return samples[0]
    if len(eps_values) != 3:
        raise ExtrapolationError("cutoff extrapolation expects 1 or 3 samples")
    f0, f1, f2 = (np.asarray(s, dtype=float) for s in samples)
    scale = max(float(np.max(np.abs(s))) for s in (f0, f1, f2))
    d1 = float(np.max(np.abs(f1 - f0)))
    d2 = float(np.max(np.abs(f2 - f1)))
    if d2 > _DIVERGENCE_RATIO * d1 and d2 > 1e-12 * max(scale, 1e-300):
        raise ExtrapolationError(
            f"cutoff samples do not converge: successive differences "
            f"{d1:.3e} -> {d2:.3e}"
        )
    out = (f0 - 6.0 * f1 + 8.0 * f2) / 3.0
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# smearing-dependent wavenumber reach
# ---------------------------------------------------------------------------

def _k_cutoff_radial(spec: SmearingSpec) -> float:
    """k beyond which k^3 |transform| is negligible at ~1e-12 relative."""
    if spec.family == "gaussian":
        return 12.0 / spec.delta
    if spec.family == "lorentzian":
        return 50.0 / spec.delta
    # bump: the shoulder mollifier decays super-algebraically in sqrt(k*delta);
    # k*delta ~ 160 puts k^3 |transform| below 1e-12 of its peak
    return 80.0 / spec.delta


def _k_cutoff_1d(spec: SmearingSpec) -> float:
    """Line-transform analogue of :func:`_k_cutoff_radial`."""
    if spec.family == "gaussian":
        return 9.0 / spec.delta
    if spec.family == "lorentzian":
        return 40.0 / spec.delta
    peak = abs(fourier1d(spec, 0.0))
    k = 16.0 / spec.delta
    while k < 4000.0 / spec.delta:
        if k * abs(fourier1d(spec, k)) < 1e-16 * max(peak, 1e-300):
            break
        k *= 2.0
    return k


def _k_cutoff(smearing: Smearing) -> float:
    if isinstance(smearing, CompositeSmearing):
        return max(_k_cutoff_radial(p) for p in smearing.parts)
    return _k_cutoff_radial(smearing)


# ---------------------------------------------------------------------------
# norm of the sender displacement in n dimensions
# ---------------------------------------------------------------------------

def _sphere_area(dim: int) -> float:
    """Surface area of the unit sphere S^dim."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / special.gamma((dim + 1) / 2.0)


@lru_cache(maxsize=4096)
def _alpha_norm_nd_unit(spec: SmearingSpec, dimension: int, eps: float,
                        tol: float) -> float:
    sdim = dimension - 1
    if dimension == 2:
        def integrand(k):
            return k * abs(fourier1d(spec, k)) ** 2 * math.exp(-2.0 * eps * k)
        kc = _k_cutoff_1d(spec)
        pref = 1.0 / (2.0 * math.pi)
    else:
        if dimension == 4:
            transform = lambda k: radial_ft(spec, k)
        else:
            transform = lambda k: _radial_ft_2d(spec, k)
        def integrand(k):
            # sphere measure k**(sdim-1) times the mode energy |k|
            return (k ** (dimension - 1) * transform(k) ** 2
                    * math.exp(-2.0 * eps * k))
        kc = _k_cutoff_radial(spec)
        pref = _sphere_area(dimension - 2) / (2.0 * (2.0 * math.pi) ** sdim)
    val, err = integrate.quad(integrand, 0.0, kc, epsabs=tol, epsrel=tol,
                              limit=400)
    if not math.isfinite(val) or err > 1e3 * tol * max(abs(val), 1.0):
        raise NonconvergenceError("displacement-norm integral did not converge")
    return pref * val


def _radial_ft_2d(spec: SmearingSpec, k: float) -> float:
    """Planar radial transform 2 pi * integral r J0(k r) f(r) dr."""
    lo, hi = support_interval(spec, 1e-14)
    lo, hi = max(lo, 0.0), max(hi, 0.0)
    if spec.family == "lorentzian":
        hi = spec.offset + 1e5 * spec.delta
    val, _ = integrate.quad(
        lambda r: r * special.j0(k * r) * float(spec(r)),
        lo, hi, epsabs=1e-12, epsrel=1e-12, limit=800,
    )
    return 2.0 * math.pi * val


def alpha_norm_nd(alice: Smearing, dimension: int, eps: float = 0.0,
                  tol: float = 1e-12) -> float:
    """Squared norm of the sender displacement at soft cutoff eps.

    In 1+1D the smearing is a line profile (its plain transform enters); in
    higher dimensions it is radial.  Supported dimensions: 2, 3, 4.
    """
    if dimension not in (2, 3, 4):
        raise DimensionError(f"unsupported spacetime dimension {dimension}")
    if eps < 0.0:
        raise InvalidGeometryError("cutoff must be nonnegative")
    if isinstance(alice, CompositeSmearing):
        # cross terms prevent amplitude factoring; integrate the sum directly
        sdim = dimension - 1
        if dimension == 2:
            transform = lambda k: abs(fourier1d(alice, k)) ** 2
            pref = 1.0 / (2.0 * math.pi)
        elif dimension == 4:
            transform = lambda k: radial_ft(alice, k) ** 2
            pref = _sphere_area(2) / (2.0 * (2.0 * math.pi) ** 3)
        else:
            transform = lambda k: sum(_radial_ft_2d(p, k) for p in alice.parts) ** 2
            pref = _sphere_area(1) / (2.0 * (2.0 * math.pi) ** 2)
        kc = max(_k_cutoff_radial(p) if dimension > 2 else _k_cutoff_1d(p)
                 for p in alice.parts)
        val, _ = integrate.quad(
            lambda k: k ** (dimension - 1) * transform(k) * math.exp(-2 * eps * k),
            0.0, kc, epsabs=tol, epsrel=tol, limit=400)
        return pref * val
    unit = unit_amplitude(alice)
    return (alice.amplitude ** 2
            * _alpha_norm_nd_unit(unit, dimension, float(eps), tol))


# ---------------------------------------------------------------------------
# moment integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralSet:
    """Six moment integrals at one (r, delta_t) point and fixed cutoff."""

    moments: MomentIntegrals
    eval_point: float
    delta_t: float
    cutoff: float

    def as_moment_integrals(self) -> MomentIntegrals:
        return self.moments


def _panel_nodes(k_max: float, omega_max: float):
    """Gauss-Legendre nodes/weights resolving phases up to omega_max."""
    # Bucket the panel width by powers of two so node sets (and the cached
    # transforms evaluated on them) are shared across nearby times.
    h = math.pi / (1 << max(1, int(math.ceil(math.log2(2.0 * max(omega_max, 1.0))))))
    n_panels = int(math.ceil(k_max / h))
    xg, wg = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = h * np.arange(n_panels)
    nodes = (edges[:, None] + 0.5 * h * (xg[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * wg, n_panels)
    return nodes, weights


_TRANSFORM_CACHE: dict = {}


def _cached_transform(smearing: Smearing, nodes_key, nodes: np.ndarray,
                      tol: float) -> np.ndarray:
    key = (smearing, nodes_key, tol)
    got = _TRANSFORM_CACHE.get(key)
    if got is not None:
        return got
    vals = np.asarray(radial_ft(smearing, nodes, tol), dtype=float)
    if len(_TRANSFORM_CACHE) > 64:
        _TRANSFORM_CACHE.clear()
    _TRANSFORM_CACHE[key] = vals
    return vals


def _spherical_j(kr: np.ndarray):
    """j0(kr) and j1(kr), elementary and series-switched at tiny argument."""
    small = np.abs(kr) < 1e-4
    safe = np.where(small, 1.0, kr)
    s, c = np.sin(safe), np.cos(safe)
    j0 = np.where(small, 1.0 - kr**2 / 6.0, s / safe)
    j1 = np.where(small, kr / 3.0 - kr**3 / 30.0, s / safe**2 - c / safe)
    return j0, j1


def _i_arrays(cfg: ProtocolConfig, r: np.ndarray, delta_t: float, eps: float):
    """The six moment integrals on a radius grid at fixed cutoff."""
    t = cfg.interaction_time + delta_t
    k_max = max(_k_cutoff(cfg.alice), _k_cutoff(cfg.bob))
    omega_max = float(np.max(r)) + t + 2.0 * eps
    nodes, weights = _panel_nodes(k_max, omega_max)
    nodes_key = (len(nodes), k_max, round(nodes[1] - nodes[0], 14))
    lam_t = _cached_transform(cfg.alice, nodes_key, nodes, cfg.tol)
    bob_active = peak_value(cfg.bob) > 0.0 and delta_t >= 0.0
    mu_t = (_cached_transform(cfg.bob, nodes_key, nodes, cfg.tol)
            if bob_active else None)
    damp = np.exp(-2.0 * eps * nodes)
    w2 = weights * nodes**2 * damp
    w3 = weights * nodes**3 * damp
    cos_t, sin_t = np.cos(nodes * t), np.sin(nodes * t)
    f_recv_t = w2 * np.cos(nodes * delta_t) * mu_t if bob_active else None
    f_recv_r = w2 * np.sin(nodes * delta_t) * mu_t if bob_active else None
    f2_t = -(w3 * sin_t * lam_t)
    f2_r = w3 * cos_t * lam_t
    f3_t = w3 * cos_t * lam_t
    f3_r = w3 * sin_t * lam_t
    shape = r.shape
    acc = {name: np.zeros(shape) for name in
           ("i1t", "i1r", "i2t", "i2r", "i3t", "i3r")}
    for start in range(0, nodes.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        kr = np.outer(nodes[sl], r)
        j0, j1 = _spherical_j(kr)
        if bob_active:
            acc["i1t"] += f_recv_t[sl] @ j0
            acc["i1r"] += f_recv_r[sl] @ j1
        acc["i2t"] += f2_t[sl] @ j0
        acc["i2r"] += f2_r[sl] @ j1
        acc["i3t"] += f3_t[sl] @ j0
        acc["i3r"] += f3_r[sl] @ j1
    eight_pi = 8.0 * math.pi
    return {name: eight_pi * v for name, v in acc.items()}


def i_integrals(cfg: ProtocolConfig, r: float, delta_t: float,
                eps: float) -> IntegralSet:
    """Moment integrals at radius r, feedback lag delta_t, fixed cutoff eps.

    ``delta_t`` is time elapsed since the feedback kick; negative values mean
    the receiver has not yet acted and its integrals vanish identically.
    """
    if cfg.dimension != 4:
        raise DimensionError("moment integrals require a 3+1-dimensional config")
    if eps <= 0.0:
        raise InvalidGeometryError("the soft cutoff must be positive here; "
                                   "zero cutoff is reached by extrapolation")
    if r < 0.0:
        raise InvalidGeometryError("radius must be nonnegative")
    if cfg.interaction_time + delta_t < 0.0:
        raise InvalidGeometryError("evaluation time precedes the sender kick")
    arrays = _i_arrays(cfg, np.atleast_1d(float(r)), delta_t, eps)
    vals = {name: float(arr[0]) for name, arr in arrays.items()}
    moments = MomentIntegrals(
        receiver=MomentPair(vals["i1t"], vals["i1r"]),
        sender_deriv=MomentPair(vals["i2t"], vals["i2r"]),
        sender_pv=MomentPair(vals["i3t"], vals["i3r"]),
    )
    return IntegralSet(moments=moments, eval_point=float(r),
                       delta_t=float(delta_t), cutoff=float(eps))


def _j0_scalar(x: float) -> float:
    return 1.0 - x * x / 6.0 if abs(x) < 1e-6 else math.sin(x) / x


def _j1_scalar(x: float) -> float:
    if abs(x) < 1e-6:
        return x / 3.0
    return math.sin(x) / (x * x) - math.cos(x) / x


def _smearing_moment(smearing: Smearing, k: float, tol: float) -> float:
    """integral dr' r'^2 f(r') j0(k r') by plain adaptive quadrature."""
    total = 0.0
    parts = smearing.parts if isinstance(smearing, CompositeSmearing) else (smearing,)
    for p in parts:
        lo, hi = support_interval(p, 1e-16)
        lo, hi = max(lo, 0.0), max(hi, 0.0)
        if hi <= lo:
            continue
        val, _ = integrate.quad(
            lambda rp: rp * rp * float(p(rp)) * _j0_scalar(k * rp),
            lo, hi, epsabs=tol, epsrel=tol, limit=400,
        )
        total += val
    return total


def i_integrals_direct(cfg: ProtocolConfig, r: float, delta_t: float,
                       eps: float, tol: float = 1e-10) -> IntegralSet:
    """Moment integrals by nested (r', k) adaptive quadrature.

    Reference evaluator: the spherical transform under the k integral is
    expanded as its defining radial integral and both integrals are done
    adaptively, bypassing the closed-form transforms, caching and panel
    rules of :func:`i_integrals`.  Slow; intended for cross-checks.
    """
    if cfg.dimension != 4:
        raise DimensionError("moment integrals require a 3+1-dimensional config")
    if eps <= 0.0:
        raise InvalidGeometryError("the soft cutoff must be positive here")
    if r < 0.0:
        raise InvalidGeometryError("radius must be nonnegative")
    t = cfg.interaction_time + delta_t
    four_pi = 4.0 * math.pi
    bob_active = peak_value(cfg.bob) > 0.0 and delta_t >= 0.0

    def outer(power: int, smearing: Smearing, phase_time: float,
              use_sin: bool, radial: bool) -> float:
        kernel = _j1_scalar if radial else _j0_scalar
        trig = math.sin if use_sin else math.cos

        def integrand(k: float) -> float:
            return (k ** power * math.exp(-2.0 * eps * k) * trig(k * phase_time)
                    * kernel(k * r) * four_pi * _smearing_moment(smearing, k, tol))

        kc = _k_cutoff(smearing)
        val, err = integrate.quad(integrand, 0.0, kc, epsabs=tol, epsrel=tol,
                                  limit=2000)
        if not math.isfinite(val):
            raise NonconvergenceError("direct moment quadrature failed")
        return 8.0 * math.pi * val

    if bob_active:
        i1t = outer(2, cfg.bob, delta_t, use_sin=False, radial=False)
        i1r = outer(2, cfg.bob, delta_t, use_sin=True, radial=True)
    else:
        i1t = i1r = 0.0
    moments = MomentIntegrals(
        receiver=MomentPair(i1t, i1r),
        sender_deriv=MomentPair(-outer(3, cfg.alice, t, True, False),
                                outer(3, cfg.alice, t, False, True)),
        sender_pv=MomentPair(outer(3, cfg.alice, t, False, False),
                             outer(3, cfg.alice, t, True, True)),
    )
    return IntegralSet(moments=moments, eval_point=float(r),
                       delta_t=float(delta_t), cutoff=float(eps))


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def _components_at_eps(cfg: ProtocolConfig, r: np.ndarray, delta_t: float,
                       eps: float):
    arrays = _i_arrays(cfg, r, delta_t, eps)
    pref = 1.0 / (4.0 * (2.0 * math.pi) ** 6)
    alice = pref * 0.5 * (arrays["i2t"] ** 2 + arrays["i2r"] ** 2)
    bob = pref * 0.5 * (arrays["i1t"] ** 2 + arrays["i1r"] ** 2)
    sy = cfg.detector.sigma_y()
    if sy != 0.0 and (np.any(arrays["i1t"]) or np.any(arrays["i1r"])):
        alpha = alpha_norm_nd(cfg.alice, 4, eps, tol=min(cfg.tol, 1e-11))
        qet = (-pref * sy * math.exp(-2.0 * alpha)
               * (arrays["i1t"] * arrays["i3t"] + arrays["i1r"] * arrays["i3r"]))
    else:
        qet = np.zeros_like(alice)
    return alice, bob, qet


def _profile_arrays(cfg: ProtocolConfig, r: np.ndarray, delta_t: float):
    eps_values = eps_sequence(cfg)
    samples = [_components_at_eps(cfg, r, delta_t, eps) for eps in eps_values]
    alice = richardson_limit(eps_values, [s[0] for s in samples])
    bob = richardson_limit(eps_values, [s[1] for s in samples])
    qet = richardson_limit(eps_values, [s[2] for s in samples])
    return alice, bob, qet


def stress_energy_nd(cfg: ProtocolConfig, r: float,
                     delta_t: float) -> DensityComponents:
    """Cutoff-free density components at radius r, feedback lag delta_t."""
    if cfg.dimension != 4:
        raise DimensionError("stress_energy_nd requires a 3+1-dimensional config")
    if r < 0.0:
        raise InvalidGeometryError("radius must be nonnegative")
    alice, bob, qet = _profile_arrays(cfg, np.atleast_1d(float(r)), delta_t)
    a, b, q = float(alice[0]), float(bob[0]), float(qet[0])
    return DensityComponents(total=a + b + q, alice=a, bob=b, qet=q)


def radial_profile_nd(cfg: ProtocolConfig, r_grid, delta_t: float) -> DensityProfile:
    """Density components on a radius grid (r > 0) at feedback lag delta_t."""
    if cfg.dimension != 4:
        raise DimensionError("radial_profile_nd requires a 3+1-dimensional config")
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise InvalidGeometryError("radius grid must be 1-D with >= 2 points")
    if np.any(np.diff(r) <= 0.0):
        raise InvalidGeometryError("radius grid must be strictly increasing")
    if r[0] <= 0.0:
        raise InvalidGeometryError("radial profiles require r > 0")
    alice, bob, qet = _profile_arrays(cfg, r, delta_t)
    total = alice + bob + qet
    return DensityProfile(grid=r, time=cfg.interaction_time + delta_t,
                          total=total, alice=alice, bob=bob, qet=qet)


def total_energy_nd(profile: DensityProfile) -> float:
    """Volume integral 4 pi * integral r^2 rho(r) dr over the profile grid."""
    r = profile.grid
    return float(4.0 * math.pi * np.trapezoid(r**2 * profile.total, r))
