"""Pytest configuration: derandomised hypothesis profile and shared fixtures."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "deterministic",
    derandomize=True,
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def grid6():
    from weightlab import DyadicGrid

    return DyadicGrid(6)


@pytest.fixture(scope="session")
def grid8():
    from weightlab import DyadicGrid

    return DyadicGrid(8)


@pytest.fixture(scope="session")
def grid10():
    from weightlab import DyadicGrid

    return DyadicGrid(10)
