import numpy as np
import pytest

from plastiplate.scenarios import Config, check_config, load_scenario
from plastiplate.structures import PlateGrid


def tiny_config(**overrides) -> dict:
    """A 5x5-node, two-layer bending scenario that evolves in well under a
    second."""
    cfg = dict(
        name='tiny',
        geometry=dict(nx=5, ny=5, layers=2),
        material=dict(mu=1.0, ell=0.5),
        time=dict(T=1.0, k=4),
        data=dict(
            rho=dict(
                preset='bending_bump',
                params=dict(amplitude=0.4),
                profile=dict(name='ramp'))),
        **{'yield': dict(alpha0=1.0, N=4, lam=2.0, gamma=0.1)})
    for key, value in overrides.items():
        cfg[key] = value
    return cfg


def make_scenario(**overrides):
    return load_scenario(check_config(Config.from_dict(tiny_config(
        **overrides))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grid():
    return PlateGrid(1.0, 1.0, 7, 5, layers=4)


@pytest.fixture
def tiny_scenario():
    return make_scenario()


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def config_factory():
    return tiny_config
