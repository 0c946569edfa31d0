import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_rotation(rng, spread=1.0):
    from hbubble.geometry import rotation_from_angles

    return rotation_from_angles((
        np.pi / 2 + spread * rng.uniform(-1, 1),
        spread * rng.uniform(-1, 1),
        spread * rng.uniform(-1, 1)))
