import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from srchoquard.model import ModelParams, Problem  # noqa: E402
from srchoquard.nonlinearity import NonlinearitySpec  # noqa: E402
from srchoquard.spectral import Grid  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = []


def reference_problem(points=64, box_length=16.0, mu=0.0, kind="power", **kw):
    grid = Grid(2, points, box_length)
    params = ModelParams(2, 1.0, mu, 1.5, 3.0, 2.5)
    return Problem.build(grid, params, NonlinearitySpec(kind, 3.0, 2.5), **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240)


@pytest.fixture(scope="session")
def ref_problem():
    return reference_problem()


@pytest.fixture(scope="session")
def small_problem():
    return reference_problem(points=32, mu=0.05, v_p="cos:2.0:0.25", k="const:0.3")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
