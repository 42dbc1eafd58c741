"""Smearing profiles: shapes, derivatives, transforms and their oracles."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from qetlab import (
    SmearingSpec,
    compose,
    fourier1d,
    peak_value,
    radial_ft,
    smearing_deriv,
    smearing_eval,
    support_interval,
)
from qetlab.errors import (
    GeometryMismatchError,
    InvalidGeometryError,
    NonconvergenceError,
)
from qetlab.smearing import _radial_ft_quad

FAMILIES = ("gaussian", "lorentzian", "bump")

SHAPE_PEAK = {
    "gaussian": 1.0 / math.sqrt(2.0 * math.pi),
    "lorentzian": 1.0 / math.pi,
    "bump": 1.0,
}


def sample_spec(family: str, **kw) -> SmearingSpec:
    base = dict(amplitude=1.7, delta=0.8, center=0.4)
    if family == "bump":
        base["sigma"] = 1.1
    base.update(kw)
    return SmearingSpec(family, **base)


# ---------------------------------------------------------------------------
# pointwise shape properties
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_peak_value_matches_eval_at_offset(family):
    spec = sample_spec(family)
    assert peak_value(spec) == pytest.approx(
        abs(smearing_eval(spec, spec.offset)), rel=1e-14)
    assert peak_value(spec) == pytest.approx(
        abs(spec.amplitude) * SHAPE_PEAK[family], rel=1e-14)


@pytest.mark.parametrize("family", FAMILIES)
def test_eval_nonnegative_for_positive_amplitude(family):
    spec = sample_spec(family)
    x = np.linspace(spec.offset - 30.0, spec.offset + 30.0, 4001)
    assert np.all(smearing_eval(spec, x) >= 0.0)


def test_bump_has_exact_compact_support():
    spec = sample_spec("bump", sigma=1.0, delta=0.5, center=2.0)
    edge = 0.5 * spec.sigma + math.pi * spec.delta
    lo, hi = support_interval(spec)
    assert lo == pytest.approx(spec.offset - edge, abs=1e-14)
    assert hi == pytest.approx(spec.offset + edge, abs=1e-14)
    outside = np.array([lo - 1e-12, hi + 1e-12, lo - 5.0, hi + 5.0])
    assert np.all(smearing_eval(spec, outside) == 0.0)
    assert np.all(smearing_deriv(spec, outside, 1) == 0.0)
    inside = np.array([lo + 0.05, hi - 0.05, spec.offset])
    assert np.all(smearing_eval(spec, inside) > 0.0)


def test_bump_plateau_is_flat_at_amplitude():
    spec = sample_spec("bump", sigma=2.0, delta=0.7, center=-1.0)
    x = np.linspace(spec.offset - 0.99, spec.offset + 0.99, 101)
    assert np.allclose(smearing_eval(spec, x), spec.amplitude, rtol=0,
                       atol=1e-14)
    assert np.allclose(smearing_deriv(spec, x, 1), 0.0, atol=1e-14)


@pytest.mark.parametrize("sigma", [0.0, 1.3])
def test_bump_is_c2_across_shoulder_boundaries(sigma):
    spec = SmearingSpec("bump", 1.0, 0.6, sigma=sigma, center=0.3)
    boundaries = [spec.offset + s * (0.5 * sigma + t * math.pi * spec.delta)
                  for s in (+1, -1) for t in (0.0, 1.0)]
    h = 1e-7
    for b in boundaries:
        for order in (1, 2):
            left = smearing_deriv(spec, b - h, order)
            right = smearing_deriv(spec, b + h, order)
            assert abs(left - right) <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("order", [1, 2])
def test_deriv_matches_finite_differences(family, order):
    spec = sample_spec(family)
    rng = np.random.default_rng(42)
    lo, hi = support_interval(spec, 1e-6)
    x = rng.uniform(lo, hi, size=1000)
    h = 1e-4 * spec.delta
    base = (lambda z: smearing_eval(spec, z)) if order == 1 else \
        (lambda z: smearing_deriv(spec, z, 1))
    # five-point central difference: O(h^4) truncation
    fd = (8.0 * (base(x + h) - base(x - h))
          - (base(x + 2 * h) - base(x - 2 * h))) / (12.0 * h)
    exact = smearing_deriv(spec, x, order)
    scale = np.max(np.abs(exact))
    assert np.max(np.abs(fd - exact)) <= 1e-6 * scale


def test_deriv_rejects_bad_order():
    spec = sample_spec("gaussian")
    with pytest.raises(ValueError):
        smearing_deriv(spec, 0.0, 3)


# ---------------------------------------------------------------------------
# constructor validation
# ---------------------------------------------------------------------------

def test_spec_validation_errors():
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("triangle", 1.0, 1.0)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("gaussian", 1.0, 0.0)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("gaussian", 1.0, -2.0)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("bump", 1.0, 1.0, sigma=-0.5)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("gaussian", 1.0, 1.0, sigma=0.7)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("lorentzian", 1.0, 1.0, shell_radius=-1.0)
    with pytest.raises(InvalidGeometryError):
        SmearingSpec("gaussian", math.inf, 1.0)


def test_zero_plateau_bump_is_valid_and_peaks_at_amplitude():
    spec = SmearingSpec("bump", 2.5, 0.9, sigma=0.0)
    assert smearing_eval(spec, 0.0) == pytest.approx(2.5, rel=1e-12)
    lo, hi = support_interval(spec)
    assert hi - lo == pytest.approx(2.0 * math.pi * 0.9, abs=1e-12)


def test_support_interval_empty_for_zero_amplitude():
    spec = SmearingSpec("gaussian", 0.0, 1.0)
    lo, hi = support_interval(spec)
    assert lo > hi


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def test_compose_evaluates_to_pointwise_sum():
    a = sample_spec("gaussian", center=-1.0)
    b = sample_spec("lorentzian", center=2.0, amplitude=-0.4)
    both = compose([a, b])
    x = np.linspace(-6.0, 6.0, 301)
    assert np.allclose(both(x), a(x) + b(x), rtol=0, atol=1e-15)
    assert np.allclose(smearing_deriv(both, x, 1),
                       smearing_deriv(a, x, 1) + smearing_deriv(b, x, 1),
                       rtol=0, atol=1e-15)


def test_compose_flattens_nested_composites():
    a = sample_spec("gaussian")
    b = sample_spec("bump")
    c = sample_spec("lorentzian")
    nested = compose([compose([a, b]), c])
    assert nested.parts == (a, b, c)


def test_compose_rejects_empty_and_mismatched_shells():
    with pytest.raises(GeometryMismatchError):
        compose([])
    s1 = SmearingSpec("gaussian", 1.0, 1.0, center=0.0, shell_radius=2.0)
    s2 = SmearingSpec("gaussian", 1.0, 1.0, center=1.0, shell_radius=3.0)
    with pytest.raises(GeometryMismatchError):
        compose([s1, s2])


def test_compose_support_is_union_hull():
    a = sample_spec("bump", center=-4.0, sigma=0.0, delta=0.5)
    b = sample_spec("bump", center=4.0, sigma=0.0, delta=0.5)
    lo, hi = support_interval(compose([a, b]))
    assert lo == pytest.approx(-4.0 - math.pi * 0.5, abs=1e-12)
    assert hi == pytest.approx(4.0 + math.pi * 0.5, abs=1e-12)


# ---------------------------------------------------------------------------
# 1-D Fourier transform
# ---------------------------------------------------------------------------

def _fourier1d_oracle(spec: SmearingSpec, k: float) -> complex:
    """Direct quadrature of the transform, using the profile's even symmetry
    about its offset: F(k) = e^{-i k c} * 2 * int_0^inf g(z) cos(kz) dz."""
    g = lambda z: smearing_eval(spec, z + spec.offset)
    if spec.family == "lorentzian":
        head_to = 50.0 * spec.delta
    else:
        head_to = support_interval(spec, 1e-18)[1] - spec.offset
    head, _ = integrate.quad(lambda z: g(z) * math.cos(k * z), 0.0, head_to,
                             epsabs=1e-13, epsrel=1e-13, limit=400)
    tail = 0.0
    if spec.family == "lorentzian":
        if k == 0.0:
            tail, _ = integrate.quad(g, head_to, np.inf, epsabs=1e-14,
                                     epsrel=1e-14, limit=400)
        else:
            tail, _ = integrate.quad(g, head_to, np.inf, weight="cos",
                                     wvar=k, epsabs=1e-14, limit=400)
    even_part = 2.0 * (head + tail)
    return even_part * complex(math.cos(k * spec.offset),
                               -math.sin(k * spec.offset))


@pytest.mark.parametrize("family", FAMILIES)
def test_fourier1d_matches_direct_quadrature(family):
    spec = sample_spec(family, center=1.3)
    for k in (0.0, 0.35, 1.8, 6.1):
        ref = _fourier1d_oracle(spec, k)
        got = complex(fourier1d(spec, k))
        assert got.real == pytest.approx(ref.real, abs=1e-10)
        assert got.imag == pytest.approx(ref.imag, abs=1e-10)


@pytest.mark.parametrize("family", ["gaussian", "lorentzian"])
def test_fourier1d_zero_mode_is_total_mass(family):
    spec = sample_spec(family, amplitude=2.1, delta=0.65)
    assert complex(fourier1d(spec, 0.0)) == pytest.approx(
        2.1 * 0.65, rel=1e-13)


def test_fourier1d_vectorized_matches_scalar():
    spec = sample_spec("bump", center=-0.7)
    k = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    vec = fourier1d(spec, k)
    scal = np.array([fourier1d(spec, float(kk)) for kk in k])
    assert np.allclose(vec, scal, rtol=1e-13, atol=1e-15)


def test_fourier1d_composite_is_sum_of_parts():
    a = sample_spec("gaussian", center=-2.0)
    b = sample_spec("lorentzian", center=1.0)
    k = np.linspace(-4.0, 4.0, 17)
    assert np.allclose(fourier1d(compose([a, b]), k),
                       fourier1d(a, k) + fourier1d(b, k), rtol=1e-13)


@settings(max_examples=60, deadline=None)
@given(
    family=st.sampled_from(FAMILIES),
    amplitude=st.floats(-3.0, 3.0).filter(lambda a: abs(a) > 1e-3),
    delta=st.floats(0.1, 4.0),
    sigma=st.floats(0.0, 3.0),
    center=st.floats(-10.0, 10.0),
    k=st.floats(0.0, 40.0),
)
def test_fourier1d_conjugate_symmetry(family, amplitude, delta, sigma,
                                      center, k):
    spec = SmearingSpec(family, amplitude, delta,
                        sigma=sigma if family == "bump" else 0.0,
                        center=center)
    plus = complex(fourier1d(spec, k))
    minus = complex(fourier1d(spec, -k))
    assert minus.real == pytest.approx(plus.real, rel=1e-12, abs=1e-13)
    assert minus.imag == pytest.approx(-plus.imag, rel=1e-12, abs=1e-13)


# ---------------------------------------------------------------------------
# 3-D radial transform
# ---------------------------------------------------------------------------

RADIAL_CASES = [
    SmearingSpec("gaussian", 1.4, 0.9),
    SmearingSpec("gaussian", 0.8, 0.7, shell_radius=3.5),
    SmearingSpec("lorentzian", 1.4, 0.9),
    SmearingSpec("lorentzian", 0.8, 0.7, shell_radius=3.5),
    SmearingSpec("bump", 1.4, 0.9, sigma=1.2),
    SmearingSpec("bump", 0.8, 0.7, sigma=0.0, shell_radius=3.5),
]


@pytest.mark.parametrize("spec", RADIAL_CASES,
                         ids=lambda s: f"{s.family}-r0={s.shell_radius:g}")
def test_radial_ft_matches_adaptive_quadrature(spec):
    ks = np.array([0.31, 1.1, 3.7, 9.4, 22.0])
    got = radial_ft(spec, ks)
    ref = np.array([_radial_ft_quad(spec, float(k), 1e-12) for k in ks])
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(got - ref)) <= 1e-10 * scale


@pytest.mark.parametrize("spec", RADIAL_CASES,
                         ids=lambda s: f"{s.family}-r0={s.shell_radius:g}")
def test_radial_ft_vectorized_matches_scalar(spec):
    ks = np.array([0.4, 2.2, 13.0])
    vec = radial_ft(spec, ks)
    scal = np.array([radial_ft(spec, float(k)) for k in ks])
    if spec.family == "bump":
        # panel layouts are bucketed by the largest requested wavenumber,
        # so batched and scalar runs share accuracy but not nodes
        assert np.max(np.abs(vec - scal)) <= 1e-9 * np.max(np.abs(scal))
    else:
        assert np.allclose(vec, scal, rtol=1e-13, atol=1e-16)


def test_radial_ft_gaussian_ball_closed_form():
    spec = SmearingSpec("gaussian", 1.3, 0.8)
    k = np.array([0.2, 1.0, 4.0])
    expected = (2.0 * math.pi * spec.amplitude * spec.delta**3
                * np.exp(-0.5 * (spec.delta * k) ** 2))
    assert np.allclose(radial_ft(spec, k), expected, rtol=1e-13)


def test_radial_ft_lorentzian_ball_closed_form():
    spec = SmearingSpec("lorentzian", 0.9, 1.7)
    k = np.array([0.2, 1.0, 4.0])
    expected = (2.0 * math.pi * spec.amplitude * spec.delta**2
                * np.exp(-spec.delta * k) / k)
    assert np.allclose(radial_ft(spec, k), expected, rtol=1e-12)


def test_radial_ft_shell_high_k_boundary_asymptote():
    # For an off-center shell the r = 0 endpoint of the radial integral
    # dominates at large k:  F(k) -> -8 pi f'(0) / k^4.  This exercises the
    # large-argument evaluation path without overflow.
    spec = SmearingSpec("lorentzian", 1.0, 2.0, shell_radius=10.0)
    ks = np.array([150.0, 200.0, 400.0])
    vals = radial_ft(spec, ks)
    assert np.all(np.isfinite(vals))
    fprime0 = smearing_deriv(spec, 0.0, 1)
    expected = -8.0 * math.pi * fprime0 / ks**4
    assert np.allclose(vals, expected, rtol=2e-3)


@pytest.mark.parametrize("family", ["gaussian", "bump"])
def test_radial_zero_mode_is_second_moment(family):
    spec = sample_spec(family, center=0.0, shell_radius=2.0)
    direct, _ = integrate.quad(lambda r: r * r * spec(r), 0.0, 40.0,
                               epsabs=1e-13, epsrel=1e-13, limit=400)
    assert radial_ft(spec, 0.0) == pytest.approx(4.0 * math.pi * direct,
                                                 rel=1e-10)
    # continuity: the k -> 0 limit of the transform is the moment
    assert radial_ft(spec, 1e-6) == pytest.approx(radial_ft(spec, 0.0),
                                                  rel=1e-6)


def test_radial_zero_mode_diverges_for_lorentzian():
    spec = SmearingSpec("lorentzian", 1.0, 1.0)
    with pytest.raises(NonconvergenceError):
        radial_ft(spec, 0.0)


def test_radial_ft_scales_linearly_with_amplitude():
    spec = sample_spec("lorentzian", center=0.0, shell_radius=1.5)
    doubled = replace(spec, amplitude=2.0 * spec.amplitude)
    k = np.array([0.7, 2.0, 8.0])
    assert np.allclose(radial_ft(doubled, k), 2.0 * radial_ft(spec, k),
                       rtol=1e-14)
