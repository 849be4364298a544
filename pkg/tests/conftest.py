import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_unit7(rng, n=1):
    v = rng.normal(size=(n, 7))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
