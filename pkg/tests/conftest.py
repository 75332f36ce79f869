import numpy as np
import pytest

from hybridode.problems import linear_decay_forced
from hybridode.solvers import StepConfig, integrate
from hybridode.training import make_dataset


@pytest.fixture(scope="session")
def decay_problem():
    return linear_decay_forced()


@pytest.fixture(scope="session")
def decay_dataset(decay_problem):
    traj = integrate(decay_problem, StepConfig(dt=0.05, method="euler"))
    return make_dataset(traj, inputs=decay_problem.input)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
