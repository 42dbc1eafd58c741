"""Shared fixtures: canonical detector states and protocol factories."""
from __future__ import annotations

import pytest

from qetlab import (
    DetectorState,
    ProtocolConfig,
    SmearingSpec,
    bundled_config_path,
    load_config,
)

FAMILIES = ("gaussian", "lorentzian", "bump")


@pytest.fixture(scope="session")
def sy_plus() -> DetectorState:
    return DetectorState.sigma_y_eigenstate(+1)


@pytest.fixture(scope="session")
def sy_minus() -> DetectorState:
    return DetectorState.sigma_y_eigenstate(-1)


@pytest.fixture(scope="session")
def sx_plus() -> DetectorState:
    return DetectorState.sigma_x_plus()


@pytest.fixture
def make_protocol(sy_plus):
    """Factory for compact 1+1D protocol setups used across the suite."""

    def _make(family="gaussian", alice_amplitude=1.5, alice_delta=1.0,
              alice_sigma=0.0, bob_amplitude=0.8, bob_delta=0.6,
              bob_sigma=0.0, bob_center=4.0, interaction_time=6.0,
              detector=None, **overrides):
        alice = SmearingSpec(family, alice_amplitude, alice_delta,
                             sigma=alice_sigma)
        bob = SmearingSpec(family, bob_amplitude, bob_delta, sigma=bob_sigma,
                           center=bob_center)
        return ProtocolConfig(alice=alice, bob=bob,
                              interaction_time=interaction_time,
                              detector=detector or sy_plus, **overrides)

    return _make


@pytest.fixture
def make_radial_protocol(sy_minus):
    """Factory for small 3+1D setups: sender ball plus receiver shell."""

    def _make(family="gaussian", alice_amplitude=1.0, alice_delta=1.0,
              alice_sigma=0.0, bob_amplitude=0.25, bob_delta=0.5,
              bob_sigma=0.0, bob_shell_radius=3.0, interaction_time=3.0,
              detector=None, **overrides):
        alice = SmearingSpec(family, alice_amplitude, alice_delta,
                             sigma=alice_sigma)
        bob = SmearingSpec(family, bob_amplitude, bob_delta, sigma=bob_sigma,
                           shell_radius=bob_shell_radius)
        return ProtocolConfig(alice=alice, bob=bob,
                              interaction_time=interaction_time,
                              detector=detector or sy_minus, dimension=4,
                              **overrides)

    return _make


@pytest.fixture(scope="session")
def fig1_run():
    return load_config(bundled_config_path("fig1_lorentzian"))


@pytest.fixture(scope="session")
def fig3_run():
    return load_config(bundled_config_path("fig3_gaussian"))
