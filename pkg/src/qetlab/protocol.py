"""Detector bookkeeping and communication-assisted feedback densities.

The sender's qubit is described in the sigma_x basis ``|+>, |->`` with
``|+-> = (|e> +- |g>)/sqrt(2)`` built on the energy eigenstates ``|e>, |g>``.
All feedback formulas below consume the two complex amplitudes
``a_plus = <+|state>`` and ``a_minus = <-|state>``.

Two variants of the feedback stage are provided:

* :func:`loqc_density` -- the receiver couples to the still-coherent qubit
  (quantum channel), producing the three-part density handled by
  :mod:`qetlab.field1d` / :mod:`qetlab.fieldnd`.
* :func:`locc_branch_density` -- the qubit is read out in the energy basis
  after the feedback coupling; each outcome ("e" or "g") carries its own
  field density.  The two branch densities average (with equal weight 1/2)
  to the quantum-channel result, and they coincide with it exactly when the
  qubit state is a sigma_y eigenstate.

Branch densities are assembled from six real moment integrals of the
smearing functions.  In 1+1D these reduce to closed forms in the smearing,
its derivative and a principal-value transform; in 3+1D they are the
Bessel-kernel integrals of :mod:`qetlab.fieldnd`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidGeometryError, NormalizationError
from .field1d import ProtocolConfig, alpha_norm_1d, pv_of_deriv
from .smearing import Smearing, compose, smearing_deriv, smearing_eval

__all__ = [
    "DetectorState",
    "sigma_y_expectation",
    "i_integrals_1d",
    "loqc_density",
    "locc_branch_density",
    "compose_bobs",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class DetectorState:
    """Pure qubit state of the sender's detector, in the sigma_x basis."""

    amplitude_plus: complex
    amplitude_minus: complex

    def __post_init__(self) -> None:
        ap = complex(self.amplitude_plus)
        am = complex(self.amplitude_minus)
        if not (np.isfinite(ap.real) and np.isfinite(ap.imag)
                and np.isfinite(am.real) and np.isfinite(am.imag)):
            raise NormalizationError("detector amplitudes must be finite")
        norm = abs(ap) ** 2 + abs(am) ** 2
        if abs(norm - 1.0) > _NORM_TOL:
            raise NormalizationError(
                f"detector state norm deviates from 1 by {abs(norm - 1.0):.3e} "
                f"(tolerance {_NORM_TOL:g})"
            )
        object.__setattr__(self, "amplitude_plus", ap)
        object.__setattr__(self, "amplitude_minus", am)

    # -- constructors ---------------------------------------------------
    @classmethod
    def sigma_y_eigenstate(cls, sign: int = +1) -> "DetectorState":
        """Eigenstate of sigma_y with eigenvalue ``sign`` (+1 or -1)."""
        if sign not in (+1, -1):
            raise NormalizationError("sigma_y eigenvalue sign must be +1 or -1")
        return cls((1.0 + 1j * sign) / 2.0, (1.0 - 1j * sign) / 2.0)

    @classmethod
    def sigma_x_plus(cls) -> "DetectorState":
        return cls(1.0, 0.0)

    @classmethod
    def from_energy_basis(cls, excited: complex, ground: complex) -> "DetectorState":
        """Build from amplitudes on ``|e>`` and ``|g>``."""
        e = complex(excited)
        g = complex(ground)
        return cls((e + g) / math.sqrt(2.0), (e - g) / math.sqrt(2.0))

    # -- observables ----------------------------------------------------
    def to_energy_basis(self) -> tuple[complex, complex]:
        ap, am = self.amplitude_plus, self.amplitude_minus
        return (ap + am) / math.sqrt(2.0), (ap - am) / math.sqrt(2.0)

    def coherence(self) -> complex:
        """Cross term ``a_plus * conj(a_minus)`` entering the feedback."""
        return self.amplitude_plus * np.conj(self.amplitude_minus)

    def sigma_y(self) -> float:
        return 2.0 * float(np.imag(self.coherence()))

    def population_imbalance(self) -> float:
        """``|a_plus|**2 - |a_minus|**2`` (sigma_x expectation value)."""
        return float(abs(self.amplitude_plus) ** 2 - abs(self.amplitude_minus) ** 2)


def sigma_y_expectation(state: DetectorState) -> float:
    """Expectation of sigma_y in the given detector state."""
    return state.sigma_y()


# ---------------------------------------------------------------------------
# Moment integrals, 1+1D closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentPair:
    """Time and space components of one real moment integral."""

    time: float
    space: float


def _contract(a: MomentPair, b: MomentPair) -> float:
    """Trace-reversed 00-contraction of two moment pairs."""
    return 0.5 * (a.time * b.time + a.space * b.space)


@dataclass(frozen=True)
class MomentIntegrals:
    """The three moment pairs used by every feedback-density formula.

    ``receiver`` is linear in the receiver smearing, ``sender_deriv`` in the
    derivative of the sender smearing, and ``sender_pv`` in its Hilbert-type
    principal-value transform.  The imaginary moment is stored through its
    real magnitude (the integral itself is i times ``sender_deriv``).
    """

    receiver: MomentPair
    sender_deriv: MomentPair
    sender_pv: MomentPair


def i_integrals_1d(cfg: ProtocolConfig, x: float, t: float) -> MomentIntegrals:
    """Closed-form 1+1D moment integrals at a single spacetime point."""
    if cfg.dimension != 2:
        raise DimensionError("i_integrals_1d requires a 1+1-dimensional config")
    if t < cfg.interaction_time:
        raise InvalidGeometryError(
            "moment integrals are defined for times at or after the feedback"
        )
    lag = t - cfg.interaction_time
    mu_r = float(smearing_eval(cfg.bob, x - lag))
    mu_l = float(smearing_eval(cfg.bob, x + lag))
    lam_r = float(smearing_deriv(cfg.alice, x - t))
    lam_l = float(smearing_deriv(cfg.alice, x + t))
    pv_r = pv_of_deriv(cfg.alice, x - t, tol=cfg.tol)
    pv_l = pv_of_deriv(cfg.alice, x + t, tol=cfg.tol)
    two_pi = 2.0 * math.pi
    return MomentIntegrals(
        receiver=MomentPair(two_pi * (mu_r + mu_l), two_pi * (mu_r - mu_l)),
        sender_deriv=MomentPair(-two_pi * (lam_r - lam_l), -two_pi * (lam_r + lam_l)),
        sender_pv=MomentPair(-2.0 * (pv_r + pv_l), -2.0 * (pv_r - pv_l)),
    )


def _prefactor(dimension: int) -> float:
    return 1.0 / (4.0 * (2.0 * math.pi) ** (2 * dimension - 2))


def assemble_branch(
    moments: MomentIntegrals,
    state: DetectorState,
    alpha: float,
    branch: str,
    dimension: int,
) -> float:
    """Post-readout field density for one qubit outcome.

    The value is the sector expectation normalized by the outcome weight
    1/2, so the two branches average (with equal weight) to the
    quantum-channel density.
    """
    if branch not in ("e", "g"):
        raise InvalidGeometryError(f"branch must be 'e' or 'g', got {branch!r}")
    sign = 1.0 if branch == "e" else -1.0
    i1, i2, i3 = moments.receiver, moments.sender_deriv, moments.sender_pv
    damping = math.exp(-2.0 * alpha)
    coh = state.coherence()
    value = (
        _contract(i1, i1)
        + _contract(i2, i2)
        - sign * 2.0 * state.population_imbalance() * _contract(i1, i2)
        + sign * 2.0 * float(np.real(coh)) * damping
        * (_contract(i1, i1) - _contract(i3, i3))
        - 2.0 * state.sigma_y() * damping * _contract(i1, i3)
    )
    return _prefactor(dimension) * value


def assemble_loqc(
    moments: MomentIntegrals,
    state: DetectorState,
    alpha: float,
    dimension: int,
) -> float:
    """Quantum-channel density from the same moment integrals."""
    i1, i2, i3 = moments.receiver, moments.sender_deriv, moments.sender_pv
    value = (
        _contract(i1, i1)
        + _contract(i2, i2)
        - 2.0 * state.sigma_y() * math.exp(-2.0 * alpha) * _contract(i1, i3)
    )
    return _prefactor(dimension) * value


# ---------------------------------------------------------------------------
# Public densities
# ---------------------------------------------------------------------------

def loqc_density(cfg: ProtocolConfig, x: float, t: float) -> float:
    """Total density when the feedback uses the coherent quantum channel.

    Equal to ``density1d(cfg, x, t).total`` in 1+1D; provided so the two
    feedback variants share one entry point.
    """
    if cfg.dimension == 2:
        from .field1d import density1d

        return density1d(cfg, x, t).total
    from .fieldnd import stress_energy_nd

    return stress_energy_nd(cfg, x, t - cfg.interaction_time).total


def locc_branch_density(cfg: ProtocolConfig, x: float, t: float, branch: str) -> float:
    """Field density in one readout branch of the classical-channel protocol.

    ``branch`` selects the qubit outcome, ``"e"`` or ``"g"``.  Requires
    ``t >= interaction_time``: before the feedback acts there is no branch
    to speak of.
    """
    if t < cfg.interaction_time:
        raise InvalidGeometryError(
            "branch densities are defined only after the feedback time"
        )
    alpha = alpha_norm_1d(cfg.alice) if cfg.dimension == 2 else None
    if cfg.dimension == 2:
        moments = i_integrals_1d(cfg, x, t)
        return assemble_branch(moments, cfg.detector, alpha, branch, cfg.dimension)
    from .fieldnd import alpha_norm_nd, eps_sequence, i_integrals, richardson_limit

    eps_values = eps_sequence(cfg)
    samples = []
    for eps in eps_values:
        moments = i_integrals(cfg, x, t - cfg.interaction_time, eps)
        a = alpha_norm_nd(cfg.alice, cfg.dimension, eps)
        samples.append(
            assemble_branch(moments.as_moment_integrals(), cfg.detector, a,
                            branch, cfg.dimension)
        )
    return richardson_limit(eps_values, samples)


def compose_bobs(bobs) -> Smearing:
    """Merge several receiver smearings into one additive smearing."""
    return compose(bobs)
