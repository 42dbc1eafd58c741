"""Detector algebra and classical- vs quantum-channel feedback densities."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from qetlab import (
    DetectorState,
    ProtocolConfig,
    SmearingSpec,
    compose_bobs,
    density1d,
    locc_branch_density,
    loqc_density,
    profile1d,
    sigma_y_expectation,
)
from qetlab.errors import InvalidGeometryError, NormalizationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)


def random_state(rng) -> DetectorState:
    theta = rng.uniform(0.0, math.pi)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return DetectorState(math.cos(theta),
                         math.sin(theta) * complex(math.cos(phi),
                                                   math.sin(phi)))


# ---------------------------------------------------------------------------
# detector states
# ---------------------------------------------------------------------------

def test_sigma_y_eigenstates(sy_plus, sy_minus):
    assert sy_plus.sigma_y() == pytest.approx(1.0, abs=1e-15)
    assert sy_minus.sigma_y() == pytest.approx(-1.0, abs=1e-15)
    for state in (sy_plus, sy_minus):
        assert state.population_imbalance() == pytest.approx(0.0, abs=1e-15)
        assert state.coherence().real == pytest.approx(0.0, abs=1e-15)
    assert sigma_y_expectation(sy_plus) == sy_plus.sigma_y()


def test_sigma_x_plus_state(sx_plus):
    assert sx_plus.population_imbalance() == pytest.approx(1.0)
    assert sx_plus.sigma_y() == 0.0
    assert sx_plus.coherence() == 0.0


def test_observables_match_two_by_two_matrix_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        state = random_state(rng)
        psi = np.array(state.to_energy_basis())
        sy = float(np.real(psi.conj() @ SIGMA_Y @ psi))
        sx = float(np.real(psi.conj() @ SIGMA_X @ psi))
        assert state.sigma_y() == pytest.approx(sy, abs=1e-13)
        assert state.population_imbalance() == pytest.approx(sx, abs=1e-13)


def test_energy_basis_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(25):
        state = random_state(rng)
        excited, ground = state.to_energy_basis()
        back = DetectorState.from_energy_basis(excited, ground)
        assert back.amplitude_plus == pytest.approx(state.amplitude_plus,
                                                    abs=1e-14)
        assert back.amplitude_minus == pytest.approx(state.amplitude_minus,
                                                     abs=1e-14)


def test_state_normalization_is_enforced():
    with pytest.raises(NormalizationError):
        DetectorState(1.0, 1.0)
    with pytest.raises(NormalizationError):
        DetectorState(0.5, 0.5)
    with pytest.raises(NormalizationError):
        DetectorState(math.nan, 0.0)
    with pytest.raises(NormalizationError):
        DetectorState.sigma_y_eigenstate(0)


# ---------------------------------------------------------------------------
# channel equivalence
# ---------------------------------------------------------------------------

def test_quantum_channel_density_equals_total_density(make_protocol):
    cfg = make_protocol("lorentzian")
    for x in (-3.0, 2.0, 5.8, 6.4):
        assert loqc_density(cfg, x, 8.0) == density1d(cfg, x, 8.0).total


def test_branches_coincide_for_sigma_y_eigenstates(make_protocol, sy_minus):
    cfg = make_protocol("gaussian", detector=sy_minus)
    t = 8.5
    grid = np.linspace(-2.0, 11.0, 53)
    loqc = profile1d(cfg, grid, t).total
    scale = float(np.max(np.abs(loqc)))
    for x, reference in zip(grid, loqc):
        e = locc_branch_density(cfg, x, t, "e")
        g = locc_branch_density(cfg, x, t, "g")
        assert abs(e - g) <= 1e-12 * scale
        assert abs(e - reference) <= 1e-10 * scale


def test_branch_average_equals_quantum_channel_for_any_state(make_protocol):
    # the readout-dependent terms are odd between the two outcomes, so the
    # equal-weight average coincides with the coherent-feedback density even
    # away from sigma_y eigenstates
    rng = np.random.default_rng(3)
    t = 8.0
    grid = np.linspace(-1.0, 10.0, 23)
    for _ in range(10):
        cfg = make_protocol("lorentzian", detector=random_state(rng))
        loqc = profile1d(cfg, grid, t).total
        scale = float(np.max(np.abs(loqc)))
        for x, reference in zip(grid, loqc):
            avg = 0.5 * (locc_branch_density(cfg, x, t, "e")
                         + locc_branch_density(cfg, x, t, "g"))
            assert abs(avg - reference) <= 1e-10 * scale


def test_branches_differ_away_from_sigma_y_eigenstates(make_protocol):
    state = DetectorState(math.cos(0.9), math.sin(0.9))
    cfg = make_protocol("gaussian", detector=state)
    t = 8.0
    diffs = [abs(locc_branch_density(cfg, x, t, "e")
                 - locc_branch_density(cfg, x, t, "g"))
             for x in np.linspace(1.0, 7.0, 11)]
    assert max(diffs) > 1e-6


def test_branch_density_validation(make_protocol):
    cfg = make_protocol("gaussian")
    with pytest.raises(InvalidGeometryError):
        locc_branch_density(cfg, 0.0, cfg.interaction_time - 0.5, "e")
    with pytest.raises(InvalidGeometryError):
        locc_branch_density(cfg, 0.0, cfg.interaction_time + 0.5, "x")


# ---------------------------------------------------------------------------
# multi-receiver composition
# ---------------------------------------------------------------------------

def _two_receivers():
    return (SmearingSpec("gaussian", 0.5, 0.6, center=3.0),
            SmearingSpec("gaussian", -0.3, 0.9, center=5.0))


def test_composed_receivers_sum_their_feedback_terms(make_protocol):
    bob_a, bob_b = _two_receivers()
    cfg = make_protocol("gaussian").with_bob(compose_bobs([bob_a, bob_b]))
    t = 8.0
    grid = np.linspace(-1.0, 12.0, 201)
    combined = profile1d(cfg, grid, t)
    single_a = profile1d(cfg.with_bob(bob_a), grid, t)
    single_b = profile1d(cfg.with_bob(bob_b), grid, t)
    # the steering term is linear in the receiver smearing
    assert np.max(np.abs(combined.qet - single_a.qet - single_b.qet)) \
        <= 1e-12 * np.max(np.abs(combined.qet))
    # the local receiver term is quadratic: the composite square minus the
    # individual squares is the cross product of the two profiles
    cross = 0.5 * (bob_a(grid - (t - cfg.interaction_time))
                   * bob_b(grid - (t - cfg.interaction_time))
                   + bob_a(grid + (t - cfg.interaction_time))
                   * bob_b(grid + (t - cfg.interaction_time)))
    assert np.max(np.abs(combined.bob - single_a.bob - single_b.bob - cross)) \
        <= 1e-12 * np.max(combined.bob)


def test_composition_is_commutative_and_associative(make_protocol):
    bob_a, bob_b = _two_receivers()
    bob_c = SmearingSpec("gaussian", 0.2, 0.5, center=1.0)
    base = make_protocol("gaussian")
    t = 8.0
    grid = np.linspace(-1.0, 12.0, 101)
    orders = [
        compose_bobs([bob_a, bob_b, bob_c]),
        compose_bobs([bob_c, bob_a, bob_b]),
        compose_bobs([compose_bobs([bob_a, bob_b]), bob_c]),
        compose_bobs([bob_a, compose_bobs([bob_b, bob_c])]),
    ]
    profiles = [profile1d(base.with_bob(bob), grid, t).total
                for bob in orders]
    scale = np.max(np.abs(profiles[0]))
    for other in profiles[1:]:
        assert np.max(np.abs(other - profiles[0])) <= 1e-12 * scale
