"""Shared fixtures for the cclab test suite."""

import pytest

from cclab.constellations import from_points, standard_by_name
from cclab.experiments import polar
from cclab.models import ChannelInstance, NoiseRule
from cclab.scheduler import stop_scheduler


@pytest.fixture(scope="session", autouse=True)
def _shared_scheduler():
    yield
    stop_scheduler()


@pytest.fixture
def qpsk():
    return standard_by_name("psk4")


@pytest.fixture
def psk8():
    return standard_by_name("psk8")


@pytest.fixture
def qam16():
    return standard_by_name("qam16")


@pytest.fixture
def single_point():
    return from_points([1 + 0j], "single")


@pytest.fixture
def gh_rule():
    return NoiseRule()


@pytest.fixture
def strong_instance():
    """Unit cross gains, P1 = 7, P2 = 12, W = 2."""
    return ChannelInstance(p1=7.0, p2=12.0, h12=polar(1, 10), h21=polar(1, 20), bandwidth_w=2.0)


@pytest.fixture
def rotation_row_one():
    """P1 = 3.5, P2 = 6, h12 = 1∠10, h21 = 1∠20, unit noise."""
    return ChannelInstance(p1=3.5, p2=6.0, h12=polar(1, 10), h21=polar(1, 20))
