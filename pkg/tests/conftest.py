import numpy as np
import pytest

from storedlight import StageAngles, build_transfer_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def random_stage(rng, scale=2 * np.pi):
    return StageAngles(*rng.uniform(-scale, scale, size=3))


def random_transfer(rng, scale=2 * np.pi):
    return build_transfer_matrix(random_stage(rng, scale), random_stage(rng, scale))
