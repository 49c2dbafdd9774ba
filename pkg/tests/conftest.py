"""
Shared fixtures for the sparse-pinning test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repo root to path so the top-level packages import as in run.py
project_root = str(Path(__file__).parent.parent)
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from environments.environment import from_bits, gen_periodic  # noqa: E402
from walks.walk_kernel import make_lazy_walk, return_probabilities  # noqa: E402


@pytest.fixture(scope='session')
def kernel1():
    return make_lazy_walk(1)


@pytest.fixture(scope='session')
def kernel2():
    return make_lazy_walk(2)


@pytest.fixture(scope='session')
def table1(kernel1):
    return return_probabilities(kernel1, 2000)


@pytest.fixture(scope='session')
def table2(kernel2):
    return return_probabilities(kernel2, 2000)


@pytest.fixture
def two_site_env():
    """N = 2, omega = (1, 1)"""
    return from_bits([1, 1])


@pytest.fixture
def periodic_200():
    return gen_periodic(200, 'segment', 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def no_timestamp(monkeypatch):
    """Outputs without the generated_at line"""
    from configs.pinning_configs import CONFIG
    monkeypatch.setitem(CONFIG, 'INCLUDE_TIMESTAMP', False)
