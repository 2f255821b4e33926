import math

import numpy as np
import pytest

from evasion.closed_form import make_closed_form
from evasion.geometry import Point2, wedge_from_positions
from evasion.potential import SingleIntegrator

PAPER_THETA = math.pi / 4


@pytest.fixture(scope="session")
def paper_wedge():
    return wedge_from_positions(Point2(0.0, 0.0), Point2(-2.0, 0.0), PAPER_THETA)


@pytest.fixture(scope="session")
def paper_density(paper_wedge):
    return make_closed_form(paper_wedge, 1.0, 1.0)


@pytest.fixture(scope="session")
def unit_pot():
    return SingleIntegrator(1.0)


@pytest.fixture(scope="session")
def paper_solution(paper_density, unit_pot):
    from evasion.solver import solve_wedge

    return solve_wedge(paper_density.wedge, unit_pot, 1.0, 256, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
