import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from unifbw.kernels import get_kernel
from unifbw.model import Dataset, SimulationModel

# Fixtures used under @given are immutable (kernels, the model).
_quiet = [HealthCheck.function_scoped_fixture]
settings.register_profile("ci", max_examples=50, deadline=None, suppress_health_check=_quiet)
settings.register_profile("dev", max_examples=200, deadline=None, suppress_health_check=_quiet)
settings.load_profile("ci")


@pytest.fixture
def epa():
    return get_kernel("epanechnikov")


@pytest.fixture
def uni():
    return get_kernel("uniform")


@pytest.fixture
def model():
    return SimulationModel()


@pytest.fixture
def hand5():
    # One point sits outside the z=0.5, h=0.2 window on each side.
    return Dataset(
        y=np.array([0.5, 1.2, 2.0, 0.9, 3.0]),
        z=np.array([0.38, 0.45, 0.50, 0.58, 0.70]),
    )
