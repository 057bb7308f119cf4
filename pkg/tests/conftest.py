import math

import numpy as np
import pytest

from src.models.families import PrecessionParams
from src.models.fields import Development, ScalarField
from src.models.geometry import Frame
from src.models.schemas import SolverConfig
from src.services.solver_service import natural_solver
from src.services.zoo_service import zoo_service

TWO_PI = 2 * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20251017)


@pytest.fixture(scope="session")
def circle_development():
    domain = (0.0, TWO_PI)
    return Development(ScalarField.constant(1.0, domain), ScalarField.constant(0.0, domain))


@pytest.fixture(scope="session")
def circle_run(circle_development):
    return natural_solver.solve_natural_equations(
        circle_development, Frame.identity(), (0.0, -1.0, 0.0), SolverConfig(step_count=10000)
    )


@pytest.fixture(scope="session")
def precession():
    """ω = 4, μ = 3: α = 5, closed with period 2π."""
    return zoo_service.constant_precession(PrecessionParams(4, 3))


@pytest.fixture(scope="session")
def precession_run(precession):
    return natural_solver.solve_natural_equations(
        precession.development, precession.initial_frame(), cfg=SolverConfig(step_count=10000)
    )


@pytest.fixture(scope="session")
def fine_precession_apparatus(precession):
    """Closed-form frames on a fine grid; the transforms differentiate tables.

    The step count keeps every inflection strictly between two nodes.
    """
    return precession.apparatus(steps=100002)
