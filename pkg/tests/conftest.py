import numpy as np
import pytest

from cv_models.fock.states import GaussianUnitarySpec, squeezed_vacuum, vacuum
from uncertainty_lab.config import NumericsSettings

LN_PI_E = float(np.log(np.pi * np.e))


@pytest.fixture
def settings():
    """Default numerics with a lighter marginal grid"""
    return NumericsSettings(grid_points=1024)


@pytest.fixture
def default_settings():
    return NumericsSettings()


@pytest.fixture
def vacuum_state():
    return vacuum(4)


@pytest.fixture
def squeezed_state():
    """r = ln 1.5 with its axis at pi/4"""
    return squeezed_vacuum(GaussianUnitarySpec.from_axis(1.5, np.pi / 4), 64)
