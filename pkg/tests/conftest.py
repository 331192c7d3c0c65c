import sys

import numpy as np
import pytest

from gtcone import corpus as C
from gtcone import cone


@pytest.fixture(scope="session")
def sphere2():
    return C.make_case("round_sphere", n=2)


@pytest.fixture(scope="session")
def sphere3():
    return C.make_case("round_sphere", n=3)


@pytest.fixture(scope="session")
def sphere_cone(sphere2):
    return cone.build_cone(sphere2.chart, sphere2.metric)


@pytest.fixture(scope="session")
def flat2():
    return C.make_case("flat", p=2, q=0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number].line())
