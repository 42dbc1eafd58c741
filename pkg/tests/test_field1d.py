"""1+1D density: reduction identities, norms, causality, conservation."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from qetlab import (
    DensityProfile,
    ProtocolConfig,
    SmearingSpec,
    alice_density,
    alpha_norm_1d,
    compose,
    density1d,
    fourier1d,
    profile1d,
    pv_of_deriv,
    smearing_deriv,
    total_energy,
    well_metrics,
)
from qetlab.errors import (
    CausalityError,
    DimensionError,
    InvalidGeometryError,
    NoNegativeRegionError,
    SupportTruncationWarning,
)
from qetlab.pvquad import PVProblem, pv_integral

FAMILIES = ("gaussian", "lorentzian", "bump")


# ---------------------------------------------------------------------------
# component structure
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_sender_density_is_left_right_mover_sum(family, make_protocol):
    cfg = make_protocol(family)
    x = np.linspace(-12.0, 12.0, 257)
    t = 3.5
    expected = 0.25 * (smearing_deriv(cfg.alice, x - t, 1) ** 2
                       + smearing_deriv(cfg.alice, x + t, 1) ** 2)
    assert np.allclose(alice_density(cfg.alice, x, t), expected, rtol=0,
                       atol=1e-16)


def test_zero_receiver_reduces_to_sender_only(make_protocol):
    cfg = make_protocol("gaussian", bob_amplitude=0.0)
    x = np.linspace(-15.0, 15.0, 401)
    for t in (2.0, 7.5, 11.0):
        profile = profile1d(cfg, x, t)
        assert np.array_equal(profile.bob, np.zeros_like(x))
        assert np.array_equal(profile.qet, np.zeros_like(x))
        assert np.max(np.abs(profile.total - alice_density(cfg.alice, x, t))) \
            <= 1e-12


def test_zero_sigma_y_zeroes_cross_term(make_protocol, sx_plus):
    cfg = make_protocol("lorentzian", detector=sx_plus)
    assert cfg.detector.sigma_y() == 0.0
    x = np.linspace(-15.0, 15.0, 301)
    profile = profile1d(cfg, x, 8.0)
    assert np.array_equal(profile.qet, np.zeros_like(x))
    assert np.any(profile.bob > 0.0)
    assert np.max(np.abs(profile.total - profile.alice - profile.bob)) \
        <= 1e-15 * np.max(profile.total)


def test_before_feedback_receiver_terms_vanish_exactly(make_protocol):
    cfg = make_protocol("gaussian")
    louder = cfg.with_bob(replace(cfg.bob, amplitude=37.0))
    x = np.linspace(-10.0, 10.0, 201)
    t = cfg.interaction_time - 1e-9
    for config in (cfg, louder):
        profile = profile1d(config, x, t)
        assert np.array_equal(profile.bob, np.zeros_like(x))
        assert np.array_equal(profile.qet, np.zeros_like(x))
    assert np.array_equal(profile1d(cfg, x, t).total,
                          profile1d(louder, x, t).total)


def test_cross_term_linear_in_receiver_amplitude(make_protocol):
    cfg = make_protocol("gaussian")
    doubled = cfg.with_bob(replace(cfg.bob, amplitude=2.0 * cfg.bob.amplitude))
    x = np.linspace(-2.0, 10.0, 241)
    t = 8.0
    base = profile1d(cfg, x, t)
    twice = profile1d(doubled, x, t)
    scale = np.max(np.abs(base.qet))
    assert scale > 0.0
    assert np.max(np.abs(twice.qet - 2.0 * base.qet)) <= 1e-12 * scale
    assert np.max(np.abs(twice.bob - 4.0 * base.bob)) \
        <= 1e-12 * np.max(base.bob)


def test_cross_term_flips_sign_with_sigma_y(make_protocol, sy_plus, sy_minus):
    up = make_protocol("lorentzian", detector=sy_plus)
    down = make_protocol("lorentzian", detector=sy_minus)
    x = np.linspace(-2.0, 10.0, 241)
    t = 8.0
    plus = profile1d(up, x, t)
    minus = profile1d(down, x, t)
    assert np.array_equal(plus.alice, minus.alice)
    assert np.array_equal(plus.bob, minus.bob)
    assert np.max(np.abs(plus.qet + minus.qet)) \
        <= 1e-14 * np.max(np.abs(plus.qet))


def test_point_evaluator_matches_grid_evaluator(make_protocol):
    cfg = make_protocol("lorentzian")
    x, t = 5.6, 8.0
    point = density1d(cfg, x, t)
    profile = profile1d(cfg, np.array([x]), t)
    assert point.total == profile.total[0]
    assert point.alice == profile.alice[0]
    assert point.bob == profile.bob[0]
    assert point.qet == profile.qet[0]
    assert point.total == pytest.approx(point.alice + point.bob + point.qet,
                                        rel=1e-15)


# ---------------------------------------------------------------------------
# excitation norm
# ---------------------------------------------------------------------------

def test_alpha_norm_gaussian_closed_form():
    for amplitude, delta in ((1.0, 1.0), (2.3, 0.4), (0.5, 3.0)):
        spec = SmearingSpec("gaussian", amplitude, delta, center=1.0)
        assert alpha_norm_1d(spec) == pytest.approx(
            amplitude**2 / (4.0 * math.pi), rel=1e-10)


def test_alpha_norm_lorentzian_closed_form():
    for amplitude, delta in ((1.0, 1.0), (2.3, 0.4), (0.5, 3.0)):
        spec = SmearingSpec("lorentzian", amplitude, delta, center=-2.0)
        assert alpha_norm_1d(spec) == pytest.approx(
            amplitude**2 / (8.0 * math.pi), rel=1e-10)


def test_alpha_norm_zero_amplitude():
    assert alpha_norm_1d(SmearingSpec("gaussian", 0.0, 1.0)) == 0.0


def test_alpha_norm_composite_matches_transform_quadrature():
    parts = [SmearingSpec("gaussian", 1.2, 0.8, center=-1.0),
             SmearingSpec("gaussian", -0.7, 1.1, center=2.0)]
    composite = compose(parts)

    def integrand(k: float) -> float:
        v = fourier1d(composite, k)
        return k * abs(v) ** 2 / (2.0 * math.pi)

    ref, _ = integrate.quad(integrand, 0.0, 60.0, epsabs=1e-13,
                            epsrel=1e-13, limit=400)
    assert alpha_norm_1d(composite) == pytest.approx(ref, rel=1e-9)


def test_alpha_norm_bump_matches_transform_quadrature():
    spec = SmearingSpec("bump", 1.4, 0.9, sigma=1.3)

    def integrand(k: float) -> float:
        v = fourier1d(spec, k)
        return k * abs(v) ** 2 / (2.0 * math.pi)

    ref = 0.0
    edges = np.concatenate([[0.0], np.geomspace(1.0, 512.0, 10)])
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(integrand, lo, hi, epsabs=1e-14,
                                  epsrel=1e-12, limit=400)
        ref += piece
    assert alpha_norm_1d(spec) == pytest.approx(ref, rel=1e-8)


# ---------------------------------------------------------------------------
# principal-value kernel
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_pv_of_deriv_matches_generic_pv_quadrature(family):
    delta = 0.7
    spec = SmearingSpec(family, 1.3, delta, center=0.4,
                        sigma=0.8 if family == "bump" else 0.0)
    # the generic-quadrature oracle truncates the lorentzian's z^-3 tails;
    # the leftover is ~ (4/3) A delta^2 / (pi W^3), so W = 1000 delta keeps
    # it two orders below the comparison tolerance
    width = 1000.0 * delta if family == "lorentzian" else 16.0 * delta
    for pole in (spec.center - 1.7 * delta, spec.center + 0.4 * delta,
                 spec.center + 2.9 * delta):
        problem = PVProblem(
            numerator=lambda y: smearing_deriv(spec, y, 1),
            numerator_deriv=lambda y: smearing_deriv(spec, y, 2),
            pole=pole,
            bounds=(spec.center - width, spec.center + width),
            tol=1e-12,
        )
        assert pv_of_deriv(spec, pole, tol=1e-12) == pytest.approx(
            pv_integral(problem), abs=5e-9)


def test_pv_of_deriv_linear_in_amplitude_and_additive():
    a = SmearingSpec("gaussian", 1.1, 0.9, center=-1.0)
    b = SmearingSpec("lorentzian", -0.6, 1.3, center=2.0)
    pole = 0.3
    assert pv_of_deriv(replace(a, amplitude=2.2), pole) == pytest.approx(
        2.0 * pv_of_deriv(a, pole), rel=1e-13)
    assert pv_of_deriv(compose([a, b]), pole) == pytest.approx(
        pv_of_deriv(a, pole) + pv_of_deriv(b, pole), rel=1e-13)
    assert pv_of_deriv(SmearingSpec("bump", 0.0, 1.0), pole) == 0.0


# ---------------------------------------------------------------------------
# causality
# ---------------------------------------------------------------------------

def test_density_vanishes_outside_light_cones(make_protocol):
    t = 9.0
    # compact family: exact zeros beyond every propagated support edge
    cfg = make_protocol("bump", bob_center=3.0, interaction_time=6.0)
    alice_edge = math.pi * cfg.alice.delta
    bob_edge = 3.0 + math.pi * cfg.bob.delta + (t - cfg.interaction_time)
    far = np.array([t + alice_edge + 0.01, bob_edge + 0.01,
                    t + alice_edge + 50.0])
    profile = profile1d(cfg, far, t)
    assert np.array_equal(profile.total[[0, 2]], np.zeros(2))
    # analytic families: below 1e-12 well beyond the effective supports
    # (the lorentzian cross term decays only like distance^-4)
    for family, span in (("gaussian", 120.0), ("lorentzian", 600.0)):
        cfg = make_protocol(family)
        far = np.array([t + span, -t - span])
        assert np.max(np.abs(profile1d(cfg, far, t).total)) <= 1e-12


def test_receiver_outside_sender_lightcone_is_rejected(sy_plus):
    alice = SmearingSpec("bump", 1.0, 1.0)
    bob = SmearingSpec("bump", 0.5, 0.5, center=10.0)
    with pytest.raises(CausalityError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=6.0,
                       detector=sy_plus)
    # the same geometry is fine once the signal has had time to arrive
    ProtocolConfig(alice=alice, bob=bob, interaction_time=9.0,
                   detector=sy_plus)


def test_zero_amplitude_receiver_always_causal(sy_plus):
    alice = SmearingSpec("bump", 1.0, 1.0)
    bob = SmearingSpec("bump", 0.0, 0.5, center=1000.0)
    ProtocolConfig(alice=alice, bob=bob, interaction_time=1.0,
                   detector=sy_plus)


def test_identically_zero_sender_is_rejected(sy_plus):
    alice = SmearingSpec("gaussian", 0.0, 1.0)
    bob = SmearingSpec("gaussian", 0.5, 0.5, center=2.0)
    with pytest.raises(CausalityError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=5.0,
                       detector=sy_plus)


def test_config_validation_errors(sy_plus):
    alice = SmearingSpec("gaussian", 1.0, 1.0)
    bob = SmearingSpec("gaussian", 0.5, 0.5, center=2.0)
    with pytest.raises(InvalidGeometryError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=0.0,
                       detector=sy_plus)
    with pytest.raises(InvalidGeometryError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=math.nan,
                       detector=sy_plus)
    with pytest.raises(DimensionError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=5.0,
                       detector=sy_plus, dimension=3)
    with pytest.raises(InvalidGeometryError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=5.0,
                       detector=sy_plus, uv_cutoff=-0.1)


def test_radial_setup_requires_common_center(sy_plus):
    alice = SmearingSpec("gaussian", 1.0, 1.0, center=0.0)
    bob = SmearingSpec("gaussian", 0.1, 0.5, center=1.0, shell_radius=2.0)
    with pytest.raises(DimensionError):
        ProtocolConfig(alice=alice, bob=bob, interaction_time=5.0,
                       detector=sy_plus, dimension=4)


def test_profile_rejects_negative_time_and_radial_setups(make_protocol,
                                                         sy_plus):
    cfg = make_protocol("gaussian")
    with pytest.raises(InvalidGeometryError):
        profile1d(cfg, np.linspace(-1, 1, 5), -0.5)
    radial = ProtocolConfig(
        alice=SmearingSpec("gaussian", 1.0, 1.0),
        bob=SmearingSpec("gaussian", 0.1, 0.5, shell_radius=2.0),
        interaction_time=3.0, detector=sy_plus, dimension=4)
    with pytest.raises(DimensionError):
        profile1d(radial, np.linspace(0.1, 1, 5), 4.0)


# ---------------------------------------------------------------------------
# conservation and integrated positivity
# ---------------------------------------------------------------------------

def test_total_energy_conserved_after_feedback(make_protocol):
    cfg = make_protocol("gaussian")
    energies = []
    for t in (8.0, 11.0):
        grid = np.linspace(-t - 15.0, t + 15.0, 4001)
        profile = profile1d(cfg, grid, t)
        positive = float(np.trapezoid(np.clip(profile.total, 0.0, None),
                                      grid))
        energy = total_energy(profile)
        assert energy >= -1e-10 * positive
        energies.append(energy)
    assert abs(energies[1] - energies[0]) <= 1e-8 * abs(energies[0])


def test_total_energy_warns_when_grid_truncates_support(make_protocol):
    cfg = make_protocol("gaussian")
    grid = np.linspace(-4.0, 4.0, 401)
    profile = profile1d(cfg, grid, 3.0)
    with pytest.warns(SupportTruncationWarning):
        total_energy(profile)


# ---------------------------------------------------------------------------
# well metrics
# ---------------------------------------------------------------------------

def _synthetic_profile():
    grid = np.linspace(-6.0, 6.0, 4801)
    total = (grid**2 - 1.0) * np.exp(-0.5 * grid**2)
    zeros = np.zeros_like(grid)
    return DensityProfile(grid=grid, time=0.0, total=total, alice=total,
                          bob=zeros, qet=zeros)


def test_well_metrics_on_synthetic_double_peak():
    profile = _synthetic_profile()
    metrics = well_metrics(profile, (-2.0, 2.0))
    assert metrics.depth == pytest.approx(1.0, rel=1e-6)
    assert metrics.width == pytest.approx(2.0, abs=5e-3)
    expected_neg, _ = integrate.quad(
        lambda x: (x * x - 1.0) * math.exp(-0.5 * x * x), -1.0, 1.0)
    assert metrics.integrated_negative == pytest.approx(expected_neg,
                                                        rel=1e-4)
    assert metrics.peak_separation == pytest.approx(math.sqrt(3.0), abs=5e-3)


def test_well_metrics_requires_negative_region():
    profile = _synthetic_profile()
    with pytest.raises(NoNegativeRegionError):
        well_metrics(profile, (2.5, 5.0))


def test_well_metrics_window_must_be_inside_grid():
    profile = _synthetic_profile()
    with pytest.raises(InvalidGeometryError):
        well_metrics(profile, (-20.0, 0.0))
    with pytest.raises(InvalidGeometryError):
        well_metrics(profile, (1.0, 1.0))
