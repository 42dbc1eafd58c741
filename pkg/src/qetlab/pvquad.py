"""Principal-value integrals with a pole-splitting correction.

The integrals needed downstream all have the form

    PV integral_L^R n(y) / (y - p) dy,        L < p < R,

with a smooth numerator n.  The domain is split at p +/- a.  On the
excised inner interval the Taylor expansion of n about the pole gives

    PV integral_{p-a}^{p+a} n(y)/(y-p) dy = 2 a n'(p) + E,
    |E| <= (a^3 / 9) * max |n'''|  on [p - a, p + a],

because the constant and quadratic terms integrate to zero by symmetry
and the cubic remainder integrates to at most (a^3/9) max|n'''|.  The
two outer pieces are regular and handled by adaptive quadrature.

``choose_inner_radius`` inverts the error bound: a = (9 tol / B)^(1/3)
for a third-derivative bound B, clamped to a tenth of the pole's
distance to the nearer boundary so the outer integrands stay resolvable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidGeometryError, NonconvergenceError

__all__ = ["PVProblem", "choose_inner_radius", "pv_integral"]


@dataclass(frozen=True)
class PVProblem:
    """A single principal-value integral.

    numerator / numerator_deriv evaluate n and n' at a point;
    third_deriv_bound, when given, bounds max|n'''| near the pole
    (otherwise it is estimated by finite differences of n').
    """

    numerator: Callable[[float], float]
    numerator_deriv: Callable[[float], float]
    pole: float
    bounds: Tuple[float, float]
    tol: float = 1e-10
    third_deriv_bound: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.bounds
        if not (lo < self.pole < hi):
            raise InvalidGeometryError(
                f"pole {self.pole} must lie strictly inside bounds ({lo}, {hi})"
            )
        if not (self.tol > 0.0):
            raise InvalidGeometryError("tol must be positive")


def choose_inner_radius(third_deriv_bound: float, tol: float, pole_gap: float) -> float:
    """Inner half-width a with truncation error (a^3/9) B <= tol.

    pole_gap is the distance from the pole to the nearer domain
    boundary; a never exceeds a tenth of it.
    """
    if pole_gap <= 0.0:
        raise InvalidGeometryError("pole must be strictly inside the domain")
    cap = 0.1 * pole_gap
    if third_deriv_bound <= 0.0 or not math.isfinite(third_deriv_bound):
        return cap
    return min((9.0 * tol / third_deriv_bound) ** (1.0 / 3.0), cap)


def _estimate_third_deriv(problem: PVProblem, half_width: float) -> float:
    """max |n'''| near the pole from second differences of n'."""
    p = problem.pole
    h = max(half_width, 1e-8 * max(1.0, abs(p)))
    pts = np.linspace(p - h, p + h, 9)
    step = pts[1] - pts[0]
    d1 = np.array([problem.numerator_deriv(float(t)) for t in pts])
    with np.errstate(invalid="ignore"):
        second = np.abs(d1[2:] - 2.0 * d1[1:-1] + d1[:-2]) / step**2
    bound = float(np.nanmax(second)) if second.size else 0.0
    return 2.0 * bound  # safety factor for the finite-difference estimate


def pv_integral(problem: PVProblem) -> float:
    """Evaluate the principal value of the problem's integral."""
    lo, hi = problem.bounds
    p = problem.pole
    gap = min(p - lo, hi - p)
    bound = problem.third_deriv_bound
    if bound is None:
        bound = _estimate_third_deriv(problem, 0.1 * gap)
    a = choose_inner_radius(bound, problem.tol, gap)

    def outer(y: float) -> float:
        return problem.numerator(y) / (y - p)

    tol = problem.tol
    total_err = 0.0
    val = 0.0
    for (a_, b_) in ((lo, p - a), (p + a, hi)):
        piece, err = integrate.quad(outer, a_, b_, epsabs=0.5 * tol,
                                    epsrel=0.5 * tol, limit=500)
        if not math.isfinite(piece):
            raise NonconvergenceError(
                f"outer quadrature diverged on [{a_}, {b_}] (pole {p})"
            )
        val += piece
        total_err += err
    inner = 2.0 * a * problem.numerator_deriv(p)
    scale = max(1.0, abs(val) + abs(inner))
    if total_err > 100.0 * tol * scale:
        raise NonconvergenceError(
            f"outer quadrature error {total_err:.3e} exceeds budget near pole {p}"
        )
    return val + inner
