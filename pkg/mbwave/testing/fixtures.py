import pytest

import mbwave.core
from mbwave.geometry import DomainGeometry


@pytest.fixture(scope='session', autouse=True)
def init_config():
    mbwave.core.init_config({})


@pytest.fixture
def geom():
    return DomainGeometry(0.5)
