"""Smearing profiles for the sender and receiver couplings.

Three single-parameter families are supported, all written as a shape
function F(z) of the offset z from the profile's reference point, scaled
by an overall amplitude:

* ``bump`` -- a compactly supported C-infinity plateau with smooth
  shoulders.  The shape is 1 on [-sigma/2, sigma/2], falls to 0 over a
  shoulder of width pi*delta on each side through

      S(u) = (1 - tanh(cot(u))) / 2,   u in (0, pi),

  and vanishes identically outside [-sigma/2 - pi*delta,
  sigma/2 + pi*delta].  All derivatives vanish at the support edges.

* ``gaussian`` -- F(z) = exp(-z^2 / (2 delta^2)) / sqrt(2 pi).  The peak
  value is 1/sqrt(2 pi) regardless of delta (no 1/delta normalization).

* ``lorentzian`` -- F(z) = (1/pi) / (1 + (z/delta)^2), peak value 1/pi.

A profile evaluated at coordinate x uses z = x - center - shell_radius.
In one dimension ``shell_radius`` is zero and ``center`` is the ordinary
position offset.  For radial (3+1 dimensional) use the same object is
evaluated at the radius r with center zero, so the profile peaks on the
sphere r = shell_radius.

The 1-D Fourier transform convention is

    F~(k) = integral dx F(x) exp(-i k x),

which gives the closed forms

    gaussian:    amplitude * delta * exp(-delta^2 k^2 / 2) * exp(-i k x0)
    lorentzian:  amplitude * delta * exp(-delta |k|)       * exp(-i k x0)

with x0 = center + shell_radius.  The bump family has no elementary
transform; its plateau contributes 2 sin(k sigma/2)/k exactly and the
shoulders are integrated on oscillation-resolving Gauss-Legendre panels.

The spherical (3-D) transform of a radial profile f(r) is

    F3(k) = 4 pi integral_0^inf r^2 j0(k r) f(r) dr,

computed in closed form for a centered gaussian ball and by quadrature
otherwise.  Lorentzian radial profiles decay like 1/r^2, so their
transform exists only for k > 0 (the k = 0 moment diverges); the
oscillatory tail is handled by two integrations by parts followed by a
semi-infinite Fourier-weight quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Tuple, Union

import numpy as np
from scipy import integrate, special

from .errors import (
    GeometryMismatchError,
    InvalidGeometryError,
    NonconvergenceError,
)

__all__ = [
    "FAMILIES",
    "SmearingSpec",
    "CompositeSmearing",
    "Smearing",
    "compose",
    "smearing_eval",
    "smearing_deriv",
    "fourier1d",
    "radial_ft",
    "support_interval",
    "peak_value",
]

FAMILIES = ("bump", "gaussian", "lorentzian")

# Relative amplitude below which a non-compact family is treated as zero
# when effective supports are needed (causality checks, default grids).
SUPPORT_THRESHOLD = 1e-12

# |cot(u)| beyond this makes sech^2(cot u) underflow against any csc^2
# factor, so the shoulder and its derivatives are exactly at their limits.
_COT_GUARD = 350.0


@dataclass(frozen=True)
class SmearingSpec:
    """One smearing profile: family, amplitude and geometry.

    sigma is the plateau full width and is meaningful for the bump
    family only; delta sets the shoulder width (bump) or the scale
    parameter (gaussian / lorentzian).
    """

    family: str
    amplitude: float
    delta: float
    sigma: float = 0.0
    center: float = 0.0
    shell_radius: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidGeometryError(
                f"unknown smearing family {self.family!r}; expected one of {FAMILIES}"
            )
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise InvalidGeometryError(f"delta must be positive, got {self.delta}")
        if self.sigma < 0.0 or not math.isfinite(self.sigma):
            raise InvalidGeometryError(f"sigma must be >= 0, got {self.sigma}")
        if self.sigma > 0.0 and self.family != "bump":
            raise InvalidGeometryError(
                f"sigma (plateau width) applies to the bump family only, "
                f"got sigma={self.sigma} with family={self.family!r}"
            )
        if self.shell_radius < 0.0 or not math.isfinite(self.shell_radius):
            raise InvalidGeometryError(
                f"shell_radius must be >= 0, got {self.shell_radius}"
            )
        if not math.isfinite(self.amplitude):
            raise InvalidGeometryError("amplitude must be finite")

    # Offset of the profile peak from the coordinate origin.
    @property
    def offset(self) -> float:
        return self.center + self.shell_radius

    def __call__(self, x):
        return smearing_eval(self, x)


@dataclass(frozen=True)
class CompositeSmearing:
    """Pointwise sum of smearing profiles (multiple receivers acting at
    the same instant compose additively at the level of the coupling)."""

    parts: Tuple[SmearingSpec, ...]

    def __post_init__(self):
        if len(self.parts) == 0:
            raise GeometryMismatchError("cannot compose an empty list of smearings")
        radial = [p.shell_radius > 0.0 for p in self.parts]
        if any(radial):
            centers = {p.center for p in self.parts}
            if len(centers) > 1:
                raise GeometryMismatchError(
                    "radial smearings can only be composed about a common center; "
                    f"got centers {sorted(centers)}"
                )

    @property
    def offset(self) -> float:
        return self.parts[0].offset

    def __call__(self, x):
        return smearing_eval(self, x)


Smearing = Union[SmearingSpec, CompositeSmearing]


def compose(specs: Iterable[SmearingSpec]) -> CompositeSmearing:
    """Combine several receiver smearings into one additive profile."""
    flat = []
    for s in specs:
        if isinstance(s, CompositeSmearing):
            flat.extend(s.parts)
        else:
            flat.append(s)
    return CompositeSmearing(tuple(flat))


# ---------------------------------------------------------------------------
# shoulder shape S(u) = (1 - tanh(cot u))/2 on (0, pi) and its derivatives
# ---------------------------------------------------------------------------

def _shoulder(u, order: int):
    """S(u), S'(u) or S''(u) on (0, pi), with under/overflow guards.

    Near u = 0 (cot -> +inf) and u = pi (cot -> -inf) the factor
    sech^2(cot u) vanishes double-exponentially and beats every power of
    csc(u), so values are clamped to their exact limits there.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        cot = np.cos(u) / np.sin(u)
        safe = np.abs(cot) <= _COT_GUARD
        out = np.zeros_like(u)
        if order == 0:
            # limits: S -> 0 at u -> 0+, S -> 1 at u -> pi-
            out[~safe & (cot < 0)] = 1.0
            out[safe] = 0.5 * (1.0 - np.tanh(cot[safe]))
            return out
        us = u[safe]
        cs = cot[safe]
        csc2 = 1.0 / np.sin(us) ** 2
        sech2 = 1.0 / np.cosh(cs) ** 2
        if order == 1:
            out[safe] = 0.5 * csc2 * sech2
        elif order == 2:
            out[safe] = csc2 * sech2 * (csc2 * np.tanh(cs) - cs)
        else:  # pragma: no cover
            raise ValueError("shoulder derivative order must be 0, 1, or 2")
    return out


def _bump_shape(z, sigma: float, delta: float, order: int):
    """Shape function of the bump family and its first two z-derivatives."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    half = 0.5 * sigma
    edge = half + math.pi * delta
    out = np.zeros_like(z)

    left = (-edge < z) & (z < -half)
    right = (half < z) & (z < edge)
    plateau = (-half <= z) & (z <= half)

    if order == 0:
        out[plateau] = 1.0
        out[left] = _shoulder((z[left] + edge) / delta, 0)
        out[right] = _shoulder((edge - z[right]) / delta, 0)
    elif order == 1:
        out[left] = _shoulder((z[left] + edge) / delta, 1) / delta
        out[right] = -_shoulder((edge - z[right]) / delta, 1) / delta
    elif order == 2:
        out[left] = _shoulder((z[left] + edge) / delta, 2) / delta**2
        out[right] = _shoulder((edge - z[right]) / delta, 2) / delta**2
    else:
        raise ValueError("derivative order must be 1 or 2")
    return out


# ---------------------------------------------------------------------------
# evaluation and derivatives
# ---------------------------------------------------------------------------

def _eval_spec(spec: SmearingSpec, x, order: int):
    shape = np.shape(x)
    z = np.atleast_1d(np.asarray(x, dtype=float)) - spec.offset
    if spec.family == "bump":
        val = _bump_shape(z, spec.sigma, spec.delta, order)
    elif spec.family == "gaussian":
        with np.errstate(under="ignore"):
            g = np.exp(-(z**2) / (2.0 * spec.delta**2)) / math.sqrt(2.0 * math.pi)
        if order == 0:
            val = g
        elif order == 1:
            val = -z / spec.delta**2 * g
        elif order == 2:
            val = (z**2 / spec.delta**4 - 1.0 / spec.delta**2) * g
        else:
            raise ValueError("derivative order must be 1 or 2")
    else:  # lorentzian
        w = 1.0 + (z / spec.delta) ** 2
        if order == 0:
            val = 1.0 / (math.pi * w)
        elif order == 1:
            val = -2.0 * z / (math.pi * spec.delta**2 * w**2)
        elif order == 2:
            val = (6.0 * z**2 / spec.delta**2 - 2.0) / (math.pi * spec.delta**2 * w**3)
        else:
            raise ValueError("derivative order must be 1 or 2")
    return (spec.amplitude * val).reshape(shape)


def smearing_eval(spec: Smearing, x):
    """Evaluate the profile at x (scalar or array)."""
    if isinstance(spec, CompositeSmearing):
        vals = [_eval_spec(p, x, 0) for p in spec.parts]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
    else:
        out = _eval_spec(spec, x, 0)
    return out if np.ndim(x) else float(out)


def smearing_deriv(spec: Smearing, x, order: int = 1):
    """First or second derivative of the profile at x."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    if isinstance(spec, CompositeSmearing):
        vals = [_eval_spec(p, x, order) for p in spec.parts]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
    else:
        out = _eval_spec(spec, x, order)
    return out if np.ndim(x) else float(out)


def peak_value(spec: Smearing) -> float:
    """Maximum of |profile| (at the reference point for a single spec)."""
    if isinstance(spec, CompositeSmearing):
        # conservative: evaluate at each part's peak location
        pts = np.array([p.offset for p in spec.parts])
        return float(np.max(np.abs(smearing_eval(spec, pts))))
    shape_peak = {"bump": 1.0, "gaussian": 1.0 / math.sqrt(2.0 * math.pi),
                  "lorentzian": 1.0 / math.pi}[spec.family]
    return abs(spec.amplitude) * shape_peak


def _shape_halfwidth(spec: SmearingSpec, rel: float) -> float:
    """Offset |z| beyond which |F(z)| < rel * F_peak (exact for bump)."""
    if spec.family == "bump":
        return 0.5 * spec.sigma + math.pi * spec.delta
    if spec.family == "gaussian":
        return spec.delta * math.sqrt(max(2.0 * math.log(1.0 / rel), 0.0))
    # lorentzian: 1/(1+(z/d)^2) = rel
    return spec.delta * math.sqrt(max(1.0 / rel - 1.0, 0.0))


def support_interval(spec: Smearing, rel: float = SUPPORT_THRESHOLD):
    """Interval outside which the profile is below ``rel`` of its peak.

    Exact for the bump family (true compact support); an effective
    support for the gaussian and lorentzian tails.  Amplitude-zero
    profiles return an empty (inverted) interval.
    """
    if isinstance(spec, CompositeSmearing):
        ivs = [support_interval(p, rel) for p in spec.parts]
        ivs = [iv for iv in ivs if iv[0] <= iv[1]]
        if not ivs:
            return (math.inf, -math.inf)
        return (min(iv[0] for iv in ivs), max(iv[1] for iv in ivs))
    if spec.amplitude == 0.0:
        return (math.inf, -math.inf)
    w = _shape_halfwidth(spec, rel)
    return (spec.offset - w, spec.offset + w)


# ---------------------------------------------------------------------------
# 1-D Fourier transform
# ---------------------------------------------------------------------------

def _quad_checked(func, a, b, tol, **kw) -> float:
    val, err = integrate.quad(func, a, b, epsabs=tol, epsrel=tol, limit=400, **kw)
    if not math.isfinite(val) or err > 50.0 * max(tol, tol * abs(val)) + 1e-300:
        raise NonconvergenceError(
            f"adaptive quadrature failed on [{a}, {b}]: value={val}, err={err}"
        )
    return val


@lru_cache(maxsize=4096)
def _shoulder_nodes(sigma: float, delta: float, k_bucket: float):
    """Gauss-Legendre nodes/weighted-values on the bump shoulder.

    Panel widths keep at most ~4 radians of cos(k z) per panel for
    |k| <= k_bucket, so a 12-point rule resolves the oscillation to
    machine accuracy.
    """
    half = 0.5 * sigma
    edge = half + math.pi * delta
    n_panels = max(8, int(math.ceil((edge - half) * k_bucket / 4.0)))
    bounds = np.linspace(half, edge, n_panels + 1)
    xg, wg = np.polynomial.legendre.leggauss(12)
    mid = 0.5 * (bounds[1:] + bounds[:-1])
    hw = 0.5 * (bounds[1:] - bounds[:-1])
    z = (mid[:, None] + hw[:, None] * xg[None, :]).ravel()
    w = (hw[:, None] * wg[None, :]).ravel()
    return z, w * _bump_shape(z, sigma, delta, 0)


def _bump_shape_ft_batch(sigma: float, delta: float, k: np.ndarray) -> np.ndarray:
    """Transform of the unit bump shape on an array of k >= 0 (real/even).

    The plateau contributes 2 sin(k sigma/2)/k exactly; the shoulder is
    summed on cached oscillation-resolving panels.
    """
    half = 0.5 * sigma
    kmax = float(np.max(k)) if k.size else 1.0
    bucket = 2.0 ** math.ceil(math.log2(max(kmax, 1.0 / delta)))
    z, fw = _shoulder_nodes(sigma, delta, bucket)
    osc = np.cos(np.outer(k, z)) @ fw
    plateau = np.where(k > 0.0,
                       2.0 * np.sin(k * half) / np.where(k > 0.0, k, 1.0),
                       sigma)
    return plateau + 2.0 * osc


def fourier1d(spec: Smearing, k, tol: float = 1e-12):
    """1-D transform integral dx profile(x) exp(-i k x), complex valued."""
    if isinstance(spec, CompositeSmearing):
        vals = [fourier1d(p, k, tol) for p in spec.parts]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
        return out
    karr = np.asarray(k, dtype=float)
    phase = np.exp(-1j * karr * spec.offset)
    if spec.family == "gaussian":
        base = spec.amplitude * spec.delta * np.exp(-(spec.delta * karr) ** 2 / 2.0)
    elif spec.family == "lorentzian":
        base = spec.amplitude * spec.delta * np.exp(-spec.delta * np.abs(karr))
    else:
        shape = _bump_shape_ft_batch(
            spec.sigma, spec.delta, np.abs(np.atleast_1d(karr).astype(float))
        ).reshape(np.shape(karr))
        base = spec.amplitude * shape
    out = base * phase
    return out if np.ndim(k) else complex(out)


# ---------------------------------------------------------------------------
# spherical (3-D) transform of a radial profile
# ---------------------------------------------------------------------------

def _radial_bounds(spec: SmearingSpec, rel: float = 1e-16):
    lo, hi = support_interval(spec, rel)
    return max(lo, 0.0), max(hi, 0.0)


def _radial_ft_quad(spec: SmearingSpec, k: float, tol: float) -> float:
    """(4 pi / k) integral_0^inf r sin(k r) f(r) dr for k > 0."""
    g = lambda r: r * _eval_spec(spec, r, 0)
    if spec.family == "lorentzian":
        # Algebraic 1/r tail: integrate twice by parts so the remainder
        # integrand decays like 1/r^3, then use the semi-infinite
        # Fourier-weight rule (QAWF) which needs no outer cutoff.
        r0 = spec.offset + 50.0 * spec.delta
        head, err_h = integrate.quad(g, 0.0, r0, weight="sin", wvar=k,
                                     epsabs=tol, epsrel=tol, limit=400)
        gp = lambda r: _eval_spec(spec, r, 0) + r * _eval_spec(spec, r, 1)
        gpp = lambda r: 2.0 * _eval_spec(spec, r, 1) + r * _eval_spec(spec, r, 2)
        boundary = (g(r0) * math.cos(k * r0) / k
                    - gp(r0) * math.sin(k * r0) / k**2)
        with warnings.catch_warnings():
            # the cycling rule grumbles on the slowly decaying tail; the
            # explicit error estimate below still bounds the result
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            tail_rem, err_t = integrate.quad(gpp, r0, np.inf, weight="sin",
                                             wvar=k, epsabs=tol * k**2,
                                             limit=400)
        val = head + boundary - tail_rem / k**2
        err = err_h + err_t / k**2
    else:
        lo, hi = _radial_bounds(spec)
        if hi <= lo:
            return 0.0
        ncyc = k * (hi - lo) / (2.0 * math.pi)
        if ncyc < 1.0:
            val, err = integrate.quad(lambda r: g(r) * math.sin(k * r), lo, hi,
                                      epsabs=tol, epsrel=tol, limit=400)
        else:
            val, err = integrate.quad(g, lo, hi, weight="sin", wvar=k,
                                      epsabs=tol, epsrel=tol, limit=400)
    if not math.isfinite(val):
        raise NonconvergenceError(f"radial transform failed at k={k}")
    return 4.0 * math.pi * val / k


@lru_cache(maxsize=400000)
def _radial_ft_cached(spec: SmearingSpec, k: float, tol: float) -> float:
    if k == 0.0:
        if spec.family == "lorentzian":
            raise NonconvergenceError(
                "radial lorentzian profiles decay like 1/r^2; the k=0 moment "
                "4 pi * integral r^2 f(r) dr diverges"
            )
        lo, hi = _radial_bounds(spec)
        val = _quad_checked(lambda r: r**2 * _eval_spec(spec, r, 0), lo, hi, tol)
        return 4.0 * math.pi * val
    if spec.family == "gaussian":
        return _gaussian_radial_ft(spec, k)
    if spec.family == "bump":
        return float(_bump_radial_ft_batch(spec, np.array([k]))[0])
    return float(_lorentzian_radial_ft_batch(spec, np.array([k]))[0])


@lru_cache(maxsize=4096)
def _radial_segment_nodes(spec: SmearingSpec, lo: float, hi: float,
                          k_bucket: float):
    """GL-12 panels (<= 4 radians each at k_bucket) of r*f(r) over [lo, hi]."""
    n_panels = max(8, int(math.ceil((hi - lo) * k_bucket / 4.0)))
    bounds = np.linspace(lo, hi, n_panels + 1)
    xg, wg = np.polynomial.legendre.leggauss(12)
    mid = 0.5 * (bounds[1:] + bounds[:-1])
    hw = 0.5 * (bounds[1:] - bounds[:-1])
    z = (mid[:, None] + hw[:, None] * xg[None, :]).ravel()
    w = (hw[:, None] * wg[None, :]).ravel()
    return z, w * z * _eval_spec(spec, z, 0)


def _sin_minus_ucos(u: np.ndarray) -> np.ndarray:
    """sin(u) - u cos(u) without the small-|u| cancellation (leading u^3/3)."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 0.1
    if np.any(~small):
        ub = u[~small]
        out[~small] = np.sin(ub) - ub * np.cos(ub)
    if np.any(small):
        us = u[small]
        u2 = us * us
        term = us * u2 / 3.0
        acc = term.copy()
        for m in (2, 3, 4, 5):
            term = -term * u2 / ((2 * m - 2) * (2 * m + 1))
            acc += term
        out[small] = acc
    return out


def _bump_radial_ft_batch(spec: SmearingSpec, k: np.ndarray) -> np.ndarray:
    """Radial transform of a bump ball/shell on an array of k > 0.

    The plateau part of r*f(r)*sin(kr) integrates in closed form; the two
    C-infinity shoulders use cached fixed-node panels, so the result is
    noise-free (relative to the transform peak) at every k.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0.0):
        raise InvalidGeometryError("batched bump radial transform needs k > 0")
    unit = replace(spec, amplitude=1.0)
    half = 0.5 * spec.sigma
    edge = half + math.pi * spec.delta
    r0 = spec.offset
    p_lo, p_hi = max(0.0, r0 - half), r0 + half

    kmax = float(np.max(k)) if k.size else 1.0
    bucket = 2.0 ** math.ceil(math.log2(max(kmax, 1.0 / spec.delta)))
    # integral of r sin(kr) dr over the plateau, via (sin u - u cos u)/k^2
    total = ((_sin_minus_ucos(k * p_hi) - _sin_minus_ucos(k * p_lo)) / k**2
             if p_hi > p_lo else np.zeros_like(k))
    segments = [(p_hi, r0 + edge)]
    if r0 - half > 0.0:
        segments.append((max(0.0, r0 - edge), r0 - half))
    for lo, hi in segments:
        z, fw = _radial_segment_nodes(unit, lo, hi, bucket)
        # chunk the (k, node) outer product to bound the transient allocation
        step = max(1, (1 << 22) // max(z.size, 1))
        for start in range(0, k.size, step):
            sl = slice(start, start + step)
            total[sl] += np.sin(np.outer(k[sl], z)) @ fw
    return 4.0 * math.pi * spec.amplitude * total / k


def _lorentzian_radial_ft_batch(spec: SmearingSpec, k: np.ndarray) -> np.ndarray:
    """Exact 3-D transform of a lorentzian ball or shell for k > 0.

    With f(r) = (A/pi) d^2 / ((r - r0)^2 + d^2), the transform reduces to
    (4 A d^2 / k) Im[e^{i k r0} (a+ J+ + a- J-)] where J+- are half-line
    integrals of e^{iku}/(u -+ i d) from -r0, expressible through the
    complex exponential integral E1 (the pole above the path contributes
    an extra 2 pi i winding term).  A centered ball collapses to
    2 pi A d^2 e^{-k d} / k.  Large k d uses the asymptotic series of
    e^w E1(w) so nothing overflows.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0.0):
        raise InvalidGeometryError("batched lorentzian radial transform needs k > 0")
    d, r0 = spec.delta, spec.offset
    if r0 == 0.0:
        return 2.0 * math.pi * spec.amplitude * d * d * np.exp(-k * d) / k
    kd, kr = k * d, k * r0
    w_plus = -kd + 1j * kr
    w_minus = kd + 1j * kr

    def scaled_tail(w):
        # e^w E1(w) ~ (1 - 1/w + 2/w^2 - 6/w^3 + 24/w^4) / w, |w| large
        iw = 1.0 / w
        return iw * (1.0 - iw * (1.0 - 2.0 * iw * (1.0 - 3.0 * iw * (1.0 - 4.0 * iw))))

    j_plus = np.empty(k.shape, dtype=complex)
    j_minus = np.empty(k.shape, dtype=complex)
    big = kd > 300.0
    small = ~big
    if np.any(small):
        j_plus[small] = np.exp(-kd[small]) * (
            special.exp1(w_plus[small]) + 2j * math.pi)
        j_minus[small] = np.exp(kd[small]) * special.exp1(w_minus[small])
    if np.any(big):
        phase = np.exp(-1j * kr[big])
        j_plus[big] = phase * scaled_tail(w_plus[big])
        j_minus[big] = phase * scaled_tail(w_minus[big])
    a_plus = (r0 + 1j * d) / (2j * d)
    a_minus = (r0 - 1j * d) / (-2j * d)
    part = np.exp(1j * kr) * (a_plus * j_plus + a_minus * j_minus)
    return 4.0 * spec.amplitude * d * d * part.imag / k


def _gaussian_radial_ft(spec: SmearingSpec, k: float) -> float:
    """Exact 3-D transform of a gaussian ball or shell.

    integral_0^inf r sin(kr) e^{-(r-r0)^2/(2 d^2)} dr is the full-line
    integral (elementary) minus the piece over r < 0, which completes to a
    scaled complementary error function; the Faddeeva function keeps it
    stable for every k.
    """
    d = spec.delta
    r0 = spec.offset
    full = math.sqrt(2.0 * math.pi) * d * math.exp(-(d * k) ** 2 / 2.0) * (
        r0 * math.sin(k * r0) + k * d * d * math.cos(k * r0)
    )
    m = r0 + 1j * k * d * d
    image = (math.exp(-(r0 / d) ** 2 / 2.0) * math.sqrt(math.pi / 2.0) * d
             * (m * special.wofz(1j * m / (math.sqrt(2.0) * d))).imag)
    return (4.0 * math.pi * spec.amplitude / (k * math.sqrt(2.0 * math.pi))
            * (full - image))


def radial_ft(spec: Smearing, k, tol: float = 1e-12):
    """Spherical transform F3(k) = 4 pi integral r^2 j0(k r) f(r) dr.

    The profile is interpreted radially: f(r) = profile evaluated at r,
    peaking on the sphere r = shell_radius (center should be zero for
    radial use).  Real valued; k >= 0.
    """
    if np.any(np.asarray(k) < 0.0):
        raise InvalidGeometryError("radial transform requires k >= 0")
    if isinstance(spec, CompositeSmearing):
        vals = [radial_ft(p, k, tol) for p in spec.parts]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
        return out
    if np.ndim(k):
        karr = np.asarray(k, dtype=float)
        if np.all(karr > 0.0):
            if spec.family == "bump":
                return _bump_radial_ft_batch(spec, karr)
            if spec.family == "lorentzian":
                return _lorentzian_radial_ft_batch(spec, karr)
        return np.array([_radial_ft_cached(spec, float(kk), tol)
                         for kk in karr])
    return _radial_ft_cached(spec, float(k), tol)


def unit_amplitude(spec: Smearing) -> Smearing:
    """Same geometry with amplitude 1 (used for amplitude-factored caches)."""
    if isinstance(spec, CompositeSmearing):
        return spec
    return replace(spec, amplitude=1.0)
