import numpy as np
import pytest

from asynctpe.proposer import ObservationSet
from asynctpe.search_space import ParamDomain, SearchSpace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit1():
    return SearchSpace([ParamDomain("x", 0.0, 1.0)])


def make_observations(X, y):
    D = ObservationSet()
    for xi, yi in zip(np.atleast_2d(X), y):
        D.append(xi, yi)
    return D


@pytest.fixture
def fixture_1d(unit1):
    """Fixed 1-D history: 40 points, quadratic bowl at 0.3 plus seeded noise."""
    r = np.random.default_rng(7)
    X = r.random((40, 1))
    y = (X[:, 0] - 0.3) ** 2 + 0.01 * r.standard_normal(40)
    return unit1, make_observations(X, y)


@pytest.fixture
def peaked_fixture():
    """2-D history whose best decile sits in a tight cluster and the rest is spread out."""
    space = SearchSpace.unit_cube(2)
    r = np.random.default_rng(3)
    good = np.clip(np.array([0.3, 0.7]) + 0.005 * r.standard_normal((10, 2)), 0, 1)
    bad = r.random((90, 2))
    X = np.vstack([good, bad])
    y = np.concatenate([np.linspace(0.0, 0.1, 10), 1.0 + r.random(90)])
    return space, make_observations(X, y)
