import math
from fractions import Fraction

import numpy as np
import pytest

from src.core.exceptions import (
    DegenerateFit,
    DomainMismatch,
    EmptyDomain,
    GridTooSmall,
    InvalidSlope,
    NotClosed,
    ZeroSlopeParameter,
)
from src.models.families import HelixParams, PrecessionParams
from src.models.fields import Development, ScalarField, uniform_grid
from src.services.analysis_service import analysis_service
from src.services.zoo_service import zoo_service
from src.utils.quadrature import cumulative

TWO_PI = 2 * math.pi
CP_THETA = math.atan2(4, 3)


def _phi(rule, derivative, domain):
    return ScalarField.from_rule(rule, domain, derivative=derivative)


# --- plane curves and helices ---

def test_clothoid():
    kappa = ScalarField.from_rule(lambda s: s, (0.0, 2.0))
    app = zoo_service.plane_apparatus(kappa)
    s = app.s
    assert np.abs(app.tangent[:, 0] - np.cos(s**2 / 2)).max() < 1e-10
    assert np.abs(app.tangent[:, 1] - np.sin(s**2 / 2)).max() < 1e-10
    assert np.all(app.binormal == [0.0, 0.0, 1.0])
    assert not np.any(app.tau_values())


def test_helix_law_on_random_polynomials(rng):
    domain = (0.0, 1.0)
    grid = uniform_grid(domain, 200)
    for _ in range(100):
        poly = np.polynomial.Polynomial(rng.uniform(-3, 3, size=int(rng.integers(1, 6))))
        theta = float(rng.uniform(0.05, 1.5))
        app = zoo_service.helix_apparatus(HelixParams(theta, ScalarField.from_rule(poly, domain)), grid)
        assert np.all(app.tangent[:, 2] == math.cos(theta))
        assert not np.any(app.normal[:, 2])
        assert np.array_equal(app.tau_values(), app.kappa.scaled(1 / math.tan(theta))(grid))


def test_circular_helix_curvature_and_torsion():
    domain = (0.0, TWO_PI)
    app = zoo_service.helix_apparatus(HelixParams(math.pi / 6, ScalarField.constant(2.0, domain)))
    assert app.kappa(1.0) == pytest.approx(1.0)
    assert app.tau(1.0) == pytest.approx(math.sqrt(3))


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, -0.3, 2.0])
def test_slope_angle_must_lie_in_open_quarter_turn(theta):
    with pytest.raises(InvalidSlope):
        HelixParams(theta, ScalarField.constant(1.0, (0.0, 1.0)))
    with pytest.raises(InvalidSlope):
        zoo_service.slant_helix_tangent(ScalarField.constant(1.0, (0.0, 1.0)), theta, 0.5)


def test_helix_grid_must_span_domain():
    params = HelixParams(0.5, ScalarField.constant(1.0, (0.0, 1.0)))
    with pytest.raises(DomainMismatch):
        zoo_service.helix_apparatus(params, np.linspace(0.0, 0.9, 10))


# --- slant helices ---

def test_linear_angle_gives_constant_precession(precession):
    domain = precession.domain
    phi = _phi(lambda s: 3 * s, lambda s: np.full_like(s, 3.0), domain)
    dev = zoo_service.slant_helix_development(phi, 0.75)
    s = uniform_grid(domain, 500)
    assert np.allclose(dev.kappa(s), 4 * np.cos(3 * s), atol=1e-12)
    assert np.allclose(dev.tau(s), 4 * np.sin(3 * s), atol=1e-12)


def test_slant_development_from_table_angle(precession):
    domain = precession.domain
    phi = ScalarField.from_rule(lambda s: 3 * s, domain)
    dev = zoo_service.slant_helix_development(phi, 0.75)
    assert dev.kappa.is_table
    kappa, tau = precession.development.sample(dev.kappa.grid())
    assert np.abs(dev.kappa.values - kappa).max() < 1e-6
    assert np.abs(dev.tau.values - tau).max() < 1e-6


def test_slant_development_needs_nonzero_slope():
    with pytest.raises(ZeroSlopeParameter):
        zoo_service.slant_helix_development(ScalarField.constant(1.0, (0.0, 1.0)), 0)


def test_slant_tangent_of_linear_angle_is_precession_tangent(precession):
    s = uniform_grid(precession.domain, 2000)
    phi = ScalarField.from_rule(lambda s: 3 * s, precession.domain)
    tangent = zoo_service.slant_helix_tangent(phi, CP_THETA, s)
    assert np.abs(np.linalg.norm(tangent, axis=1) - 1.0).max() < 1e-14
    assert np.abs(tangent - precession.tangent(s)).max() < 1e-12


def test_slant_normal_keeps_constant_slope():
    domain = (0.0, 2.0)
    theta = 0.9
    phi = _phi(lambda s: s**2, lambda s: 2 * s, domain)
    app = zoo_service.slant_helix_apparatus(phi, theta, uniform_grid(domain, 20000))
    assert np.all(app.normal[:, 2] == math.cos(theta))
    assert app.frames.orthonormality_error().max() < 1e-14
    kappa_err, tau_err = app.consistency_error()
    assert kappa_err < 1e-5 and tau_err < 1e-5


def test_slant_tangent_matches_apparatus_frame():
    domain = (0.0, 2.0)
    phi = _phi(lambda s: np.sin(s), np.cos, domain)
    grid = uniform_grid(domain, 100)
    app = zoo_service.slant_helix_apparatus(phi, 0.6, grid)
    assert np.abs(app.tangent - zoo_service.slant_helix_tangent(phi, 0.6, grid)).max() < 1e-14


# --- slant invariant ---

def test_slant_invariant_of_precession(precession):
    profile = zoo_service.slant_invariant(precession.development)
    assert profile.excluded <= 2
    assert profile.constant_value() == pytest.approx(0.75, abs=1e-6)
    assert profile.spread() < 1e-6


@pytest.mark.parametrize("m, domain", [(0.5, (-1.9, 1.9)), (0.25, (-3.8, 3.8)), (0.5, None), (0.25, None)])
@pytest.mark.parametrize("steps", [None, 40000])
def test_slant_invariant_of_salkowski_curves(m, domain, steps):
    curve = zoo_service.salkowski_development(m, domain)
    profile = zoo_service.slant_invariant(curve.development, steps=steps)
    assert profile.excluded == 0
    assert np.abs(profile.values - m).max() < 1e-6
    assert analysis_service.classify(curve.development).family == "slant_helix"


def test_slant_invariant_from_differences_skips_the_ends():
    curve = zoo_service.salkowski_development(0.5, (-1.9, 1.9))
    tau = ScalarField.from_rule(curve.development.tau.rule, curve.development.domain)
    profile = zoo_service.slant_invariant(Development(curve.development.kappa, tau), steps=40000)
    assert not profile.valid[0] and not profile.valid[-1]
    assert profile.excluded == 2
    assert np.abs(profile.values[profile.valid] - 0.5).max() < 1e-6


def test_slant_invariant_of_quadratic_angle():
    dev = zoo_service.slant_helix_development(_phi(lambda s: s**2, lambda s: 2 * s, (0.1, 2.0)), 0.75)
    profile = zoo_service.slant_invariant(dev, steps=20000)
    assert np.abs(profile.values[profile.valid] - 0.75).max() < 1e-6


def test_slant_invariant_of_helix_vanishes():
    app = zoo_service.helix_apparatus(HelixParams(0.7, ScalarField.constant(1.0, (0.0, 3.0))))
    profile = zoo_service.slant_invariant(app.development(), steps=1000)
    assert np.abs(profile.values[profile.valid]).max() < 1e-10


def test_recover_slant_angle(precession):
    phi = zoo_service.recover_slant_angle(precession.development, 0.75)
    s = phi.grid()
    assert np.abs(phi.values - 3 * s).max() < 1e-8


# --- Salkowski curves ---

def test_torsion_from_unit_curvature_is_salkowski():
    curve = zoo_service.salkowski_development(0.5, (0.0, 1.9))
    profile = zoo_service.torsion_from_curvature(curve.development.kappa, 0.5)
    assert profile.domain == (0.0, 1.9)
    s = profile.tau.grid()
    assert np.abs(profile.tau.values - curve.development.tau(s)).max() < 1e-10


def test_torsion_from_curvature_stops_where_root_vanishes():
    profile = zoo_service.torsion_from_curvature(ScalarField.constant(1.0, (0.0, 3.0)), 0.5)
    assert 1.99 < profile.domain[1] < 2.0


def test_torsion_from_curvature_without_admissible_start():
    with pytest.raises(EmptyDomain):
        zoo_service.torsion_from_curvature(ScalarField.constant(1.0, (0.0, 1.0)), 1.0, total_curvature_at_start=1.0)
    with pytest.raises(ZeroSlopeParameter):
        zoo_service.torsion_from_curvature(ScalarField.constant(1.0, (0.0, 1.0)), 0.0)


def test_salkowski_development_values():
    curve = zoo_service.salkowski_development(0.5)
    assert curve.development.domain[1] == pytest.approx(2.0, rel=1e-5)
    assert curve.development.kappa(1.0) == 1.0
    assert curve.development.tau(1.0) == pytest.approx(0.57735, abs=1e-5)
    assert curve.helix.kappa(1.0) == pytest.approx(2 / math.sqrt(3))
    assert curve.helix.tau(1.0) == pytest.approx(1 / math.sqrt(3))
    assert curve.theta == pytest.approx(math.atan(2.0))


def test_salkowski_domain_checks():
    with pytest.raises(DomainMismatch):
        zoo_service.salkowski_development(0.5, (-2.5, 1.0))
    with pytest.raises(ZeroSlopeParameter):
        zoo_service.salkowski_development(0.0)


# --- constant precession ---

@pytest.mark.parametrize(
    "omega, mu, closed, ratio, period",
    [
        (4, 3, True, "3/5", TWO_PI),
        (12, 5, True, "5/13", TWO_PI),
        (Fraction(3, 2), 2, True, "4/5", 2 * TWO_PI),
        (1, 1, False, None, None),
    ],
)
def test_closure_verdicts(omega, mu, closed, ratio, period):
    curve = zoo_service.constant_precession(PrecessionParams(omega, mu))
    assert curve.closure.closed is closed
    assert curve.closure.ratio == ratio
    if period is None:
        assert curve.closure.period is None
        assert curve.domain == pytest.approx((0.0, TWO_PI / float(mu)))
    else:
        assert curve.closure.period == pytest.approx(period)
        assert curve.domain == pytest.approx((0.0, period))


def test_precession_parameters_are_checked():
    with pytest.raises(InvalidSlope):
        PrecessionParams(0, 1)
    with pytest.raises(ZeroSlopeParameter):
        PrecessionParams(1, 0)


def test_precession_frames_are_frenet_frames(fine_precession_apparatus):
    assert fine_precession_apparatus.frames.orthonormality_error().max() < 1e-14
    kappa_err, tau_err = fine_precession_apparatus.consistency_error()
    assert kappa_err < 1e-6 and tau_err < 1e-6


# --- quadric fit ---

def test_precession_lies_on_one_sheeted_hyperboloid(precession_run):
    fit = zoo_service.hyperboloid_residual(precession_run)
    assert fit.residual < 1e-4
    assert fit.signature == "(+,+,-)"
    assert fit.one_sheet


def test_sphere_fit(rng):
    v = rng.normal(size=(500, 3))
    points = 2.0 * v / np.linalg.norm(v, axis=1)[:, None] + [1.0, -1.0, 0.5]
    fit = zoo_service.hyperboloid_residual(points)
    assert fit.residual < 1e-10
    assert fit.signature == "(+,+,+)"
    assert not fit.one_sheet


def test_random_cloud_has_no_quadric(rng):
    assert zoo_service.hyperboloid_residual(rng.uniform(-1, 1, size=(500, 3))).residual > 1e-2


def test_quadratic_angle_slant_helix_is_not_on_a_quadric():
    grid = uniform_grid((0.0, 4.0), 20000)
    phi = ScalarField.from_rule(lambda s: s**2, (0.0, 4.0))
    tangent = zoo_service.slant_helix_tangent(phi, math.atan2(1, 0.75), grid)
    fit = zoo_service.hyperboloid_residual(cumulative(tangent, float(grid[1] - grid[0])))
    assert fit.residual > 1e-4


def test_planar_points_admit_many_quadrics(circle_run):
    with pytest.raises(DegenerateFit):
        zoo_service.hyperboloid_residual(circle_run)


def test_quadric_fit_needs_enough_points():
    with pytest.raises(GridTooSmall):
        zoo_service.hyperboloid_residual(np.zeros((50, 3)))


# --- total curvature balance ---

def test_precession_curvature_balance(precession, precession_run):
    balance = zoo_service.total_curvature_balance(precession_run, precession.closure)
    assert len(balance.arcs) == 6
    for arc in balance.arcs:
        assert arc.unsigned_curvature == pytest.approx(8 / 3, abs=1e-5)
        assert arc.tangent_image_length == pytest.approx(8 / 3, abs=1e-5)
    assert sum(arc.signed_curvature > 0 for arc in balance.arcs) == 3
    assert balance.balanced
    assert abs(balance.total_curvature) < 1e-6


def test_curvature_balance_needs_closed_run(precession_run):
    with pytest.raises(NotClosed):
        zoo_service.total_curvature_balance(precession_run, False)
