import numpy as np
import pytest

from src.model.control_params import ControlParams
from src.model.domain import Domain, RobotConfiguration, sample_positions
from src.model.sensor import SensorModel


@pytest.fixture
def domain() -> Domain:
    return Domain()


@pytest.fixture
def small_domain() -> Domain:
    """
    4 x 4 domain with unit cells, so distances between cell centers are exact
    """
    return Domain(4.0, 4.0, 4, 4)


@pytest.fixture
def model() -> SensorModel:
    return SensorModel(k=0.5, alpha=0.5)


@pytest.fixture
def params() -> ControlParams:
    return ControlParams()


@pytest.fixture
def random_config():
    """
    Factory for seeded robot configurations: random_config(domain, n, seed)
    """
    def make(domain: Domain, n: int, seed: int, speed: float = 0.5) -> RobotConfiguration:
        return RobotConfiguration(sample_positions(domain, n, np.random.default_rng(seed)), speed=speed)
    return make
