import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from actplace import (FiniteHorizon, LinearSystem, RandomNetworkConfig, chain_network,
                      erdos_renyi_system, node_gramians)

settings.register_profile('default', deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('default')


def random_finite_system(n, seed):
    rng = np.random.default_rng(seed)
    return LinearSystem(rng.standard_normal((n, n)) / np.sqrt(n), FiniteHorizon(0.0, 1.0))


def random_system(n, seed):
    """Alternate finite-horizon Gaussian draws and stabilized random networks."""
    if seed % 2 == 0:
        return random_finite_system(n, seed)
    return erdos_renyi_system(RandomNetworkConfig(n, seed))


@pytest.fixture(scope='session')
def chain5():
    return node_gramians(chain_network(5))


@pytest.fixture(scope='session')
def er10():
    return node_gramians(erdos_renyi_system(RandomNetworkConfig(10, 1)))


@pytest.fixture(scope='session')
def zero3():
    return node_gramians(LinearSystem(np.zeros((3, 3)), FiniteHorizon(0.0, 1.0)))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def record_criterion(key, passed, detail):
    ACCEPTANCE[key] = (passed, detail)
    print(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
