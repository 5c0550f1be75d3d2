import os

import pytest
from hypothesis import settings

from kacbps.quiver import Quiver
from kacbps.resources import CORPUS, corpus_quiver

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def corpus():
    return {name: corpus_quiver(name) for name in CORPUS}


@pytest.fixture(scope="session")
def jordan():
    return corpus_quiver("jordan")


@pytest.fixture(scope="session")
def a2():
    return corpus_quiver("a2")


@pytest.fixture(scope="session")
def a3():
    return corpus_quiver("a3")


@pytest.fixture(scope="session")
def kronecker():
    return corpus_quiver("kronecker")


@pytest.fixture(scope="session")
def affine_a2():
    return corpus_quiver("affine_a2")


@pytest.fixture(scope="session")
def two_loop():
    return corpus_quiver("two_loop")


@pytest.fixture(scope="session")
def a2_loop():
    return corpus_quiver("a2_loop")


def make(vertices, arrows):
    return Quiver(tuple(vertices), tuple(arrows))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
