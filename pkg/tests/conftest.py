"""Shared fixtures: Ising ground states are expensive, so one session-scoped
cache hands the same states to every test that needs them (the bond-dimension
escalation inside the builder also makes the chi=10/20 intermediates
available for free)."""

import pytest

from tnfid.experiments import ising_ground_state_mps


@pytest.fixture(scope="session")
def gs_cache():
    return {}


@pytest.fixture(scope="session")
def ising_gs(gs_cache):
    def get(h: float, length: int, chi: int):
        return ising_ground_state_mps(h, length, chi, cache=gs_cache)

    return get
