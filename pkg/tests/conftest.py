import math

import pytest

from soqd.model import ModelParams


@pytest.fixture
def fig1_params():
    # detuning 0.20, coupling 0.07, omega_e = 1
    return ModelParams.single_mode(1.0, 1.2, 0.07)


@pytest.fixture
def resonant_params():
    return ModelParams.single_mode(1.0, 1.0, 0.07)


SQRT2 = math.sqrt(2)
