import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mixagg import make_empirical

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_weights(rng, n):
    return rng.dirichlet(np.ones(n))


def random_empirical(rng, domain=(0.0, 1.0), max_atoms=6):
    k = int(rng.integers(1, max_atoms + 1))
    xs = rng.uniform(domain[0], domain[1], k)
    return make_empirical(xs, rng.dirichlet(np.ones(k)), domain=domain)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
