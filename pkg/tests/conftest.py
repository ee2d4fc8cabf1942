import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240517,
                     help="seed for the randomized parameter draws")


@pytest.fixture
def rng(request):
    return np.random.default_rng(request.config.getoption("--seed"))


def random_params(rng, low=0.25, high=2.0):
    from heatexchanger import ExchangerParams
    return ExchangerParams(*rng.uniform(low, high, 4))


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
