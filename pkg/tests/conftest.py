import math

import pytest
from hypothesis import HealthCheck, settings

from raysep.maps import Box, exponential, quadratic

from . import oracles

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def exp_attract():
    return exponential(oracles.C_ATTRACT)


@pytest.fixture(scope="session")
def exp_parabolic():
    return exponential(oracles.C_PARABOLIC)


@pytest.fixture(scope="session")
def exp_siegel():
    return exponential(oracles.C_SIEGEL_EXP)


@pytest.fixture(scope="session")
def box_exp():
    return Box(-4, -8, 4, 8)


@pytest.fixture(scope="session")
def basilica():
    return quadratic(-1)


@pytest.fixture(scope="session")
def exp_siegel_estimate(exp_siegel):
    from raysep.periodic import estimate_siegel_boundary

    return estimate_siegel_boundary(exp_siegel, oracles.SIEGEL_CENTER_EXP, 1)


@pytest.fixture(scope="session")
def quad_siegel_estimate():
    from raysep.periodic import estimate_siegel_boundary

    return estimate_siegel_boundary(quadratic(oracles.C_SIEGEL_QUAD), oracles.SIEGEL_CENTER_QUAD, 1)


@pytest.fixture(scope="session")
def basilica_decomposition():
    from raysep.polyoracle import land_quadratic_ray, periodic_angles
    from raysep.regions import basic_regions, group_landings

    landings = [land_quadratic_ray(-1, a) for a in periodic_angles(2)]
    d = basic_regions(group_landings(landings), m=quadratic(-1), p=2, probe_box=Box(-2, -2, 2, 2))
    return d, landings


@pytest.fixture(scope="session")
def gamma_attract_p2(exp_attract):
    from raysep.regions import build_gamma

    return build_gamma(exp_attract, 2, 2)


