import os

import numpy as np
import pytest

from hatano.potential import DistributionSpec, load_sample, sample_potential

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")

DISTS = {
    "uniform": DistributionSpec.uniform(-1.0, 1.0),
    "uniform01": DistributionSpec.uniform(0.0, 1.0),
    "bernoulli": DistributionSpec.bernoulli(0.5, 0.8),
    "discrete": DistributionSpec.discrete([-1.0, 0.0, 2.0], [0.25, 0.5, 0.25]),
}


@pytest.fixture(scope="session")
def n4_sample():
    return load_sample(os.path.join(FIXTURES, "n4.json"))


def random_sample(kind, n, seed):
    return sample_potential(DISTS[kind], n, seed)


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(987654321))
