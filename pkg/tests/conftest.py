"""Shared test fixtures for the qvfdag test suite."""

import os
from unittest.mock import patch

import numpy as np
import pytest

from qvfdag.common.config import reset_settings
from qvfdag.families import QvfFamily
from qvfdag.learning import LayerLearnConfig
from qvfdag.simulation import ComponentRanges, ParamRange, SimSpec, simulate

# x1 -> x2 -> x3 with x4 isolated; strong enough that every layer is clear at n = 3000.
CHAIN_EDGES = ((0, 1), (1, 2))
CHAIN_LAYERS = [[1, 4], [2], [3]]


def chain_spec(n: int = 3000, seed: int = 7) -> SimSpec:
    return SimSpec(
        graph_kind="custom",
        p=4,
        n=n,
        family=QvfFamily.poisson(),
        ranges=(
            ComponentRanges(
                intercept=ParamRange(low=1.0, high=1.2),
                weight=ParamRange(low=0.2, high=0.2),
            ),
        ),
        edges=CHAIN_EDGES,
        seed=seed,
    )


@pytest.fixture(scope="session")
def chain_sim():
    """Simulated strong-signal chain with an isolated node."""
    return simulate(chain_spec())


@pytest.fixture
def fixed_config():
    """Fixed-threshold learner config with a short CV grid."""
    return LayerLearnConfig(epsilon_mode="fixed", epsilon=0.2)


@pytest.fixture
def poisson():
    return QvfFamily.poisson()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def clean_env():
    """Empty QVF_DAG_* environment and a fresh settings cache."""
    with patch.dict(os.environ, {}, clear=True):
        reset_settings()
        yield
    reset_settings()
