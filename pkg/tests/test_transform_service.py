import math

import numpy as np
import pytest

from src.core.exceptions import DomainMismatch, UnliftablePath, VanishingLancret
from src.models.families import HelixParams
from src.models.fields import ScalarField, uniform_grid
from src.services.frenet_service import frenet_service
from src.services.transform_service import transform_service
from src.services.zoo_service import zoo_service

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def circular_helix():
    """κ ≡ τ ≡ 1 on [0, 2π], closed-form frames."""
    domain = (0.0, TWO_PI)
    params = HelixParams(math.pi / 4, ScalarField.constant(math.sqrt(2), domain))
    return zoo_service.helix_apparatus(params, uniform_grid(domain, 20000))


def _wavy_kappa(domain=(0.0, TWO_PI)):
    return ScalarField.from_rule(lambda s: 1 + 0.5 * np.sin(s), domain, derivative=lambda s: 0.5 * np.cos(s))


# --- Bishop ---

def test_bishop_of_plane_curve_is_the_frenet_frame():
    plane = zoo_service.plane_apparatus(_wavy_kappa(), uniform_grid((0.0, TWO_PI), 2000))
    bishop = transform_service.bishop_transform(plane, 0.0)
    assert np.array_equal(bishop.frames.frames, plane.frames.frames)
    assert np.array_equal(bishop.k1_values(), plane.kappa_values())
    assert not np.any(bishop.k2_values())


def test_bishop_development_of_circular_helix_is_a_circle(circular_helix):
    s = circular_helix.s
    bishop = transform_service.bishop_transform(circular_helix, 0.0)
    k1, k2 = bishop.k1_values(), bishop.k2_values()
    assert np.abs(np.hypot(k1, k2) - 1.0).max() < 1e-10
    assert np.abs(k1 - np.cos(s)).max() < 1e-10
    assert np.abs(k2 - np.sin(s)).max() < 1e-10
    assert bishop.parallelism_error() < 1e-6


def test_bishop_family_differs_by_a_constant_rotation(circular_helix):
    b0 = transform_service.bishop_transform(circular_helix, 0.0)
    b1 = transform_service.bishop_transform(circular_helix, 0.3)
    turned = transform_service.rotate_bishop(b0, 0.3)
    assert np.abs(turned.frames.frames - b1.frames.frames).max() < 1e-12
    assert np.abs(turned.k1_values() - b1.k1_values()).max() < 1e-12
    assert np.abs(turned.k2_values() - b1.k2_values()).max() < 1e-12


# --- polar form ---

def test_polar_unwrap_lets_the_radius_change_sign():
    domain = (-1.0, 1.0)
    polar = transform_service.polar_unwrap(
        ScalarField.from_rule(lambda s: s, domain), ScalarField.constant(0.0, domain)
    )
    s = polar.omega.grid()
    assert np.allclose(polar.omega.values, -s, atol=1e-15)
    assert np.allclose(polar.phi.values, math.pi)


def test_polar_unwrap_starts_with_positive_radius():
    domain = (0.0, 1.0)
    polar = transform_service.polar_unwrap(ScalarField.constant(-1.0, domain), ScalarField.constant(0.0, domain))
    assert np.allclose(polar.omega.values, 1.0)
    k1, k2 = polar.reconstruct(np.linspace(0.0, 1.0, 5))
    assert np.allclose(k1, -1.0) and np.allclose(k2, 0.0, atol=1e-15)


def test_polar_unwrap_of_zero_development():
    zero = ScalarField.constant(0.0, (0.0, 1.0))
    polar = transform_service.polar_unwrap(zero, zero)
    assert not np.any(polar.omega.values)


def test_polar_unwrap_rejects_jumps_away_from_origin():
    angles = np.radians([0.0, 100.0, 200.0])
    domain = (0.0, 1.0)
    with pytest.raises(UnliftablePath):
        transform_service.polar_unwrap(
            ScalarField.from_table(domain, np.cos(angles)), ScalarField.from_table(domain, np.sin(angles))
        )


def test_polar_unwrap_checks_domains():
    with pytest.raises(DomainMismatch):
        transform_service.polar_unwrap(ScalarField.constant(1.0, (0.0, 1.0)), ScalarField.constant(1.0, (0.0, 2.0)))


# --- inverse Bishop ---

def test_inverse_bishop_recovers_frenet_apparatus(circular_helix):
    bishop = transform_service.bishop_transform(circular_helix, 0.7)
    back = transform_service.inverse_bishop(bishop)
    assert np.abs(back.frames.frames - circular_helix.frames.frames).max() < 1e-12
    assert np.abs(back.kappa_values() - circular_helix.kappa_values()).max() < 1e-12
    assert np.abs(back.tau_values() - circular_helix.tau_values()).max() < 1e-8


def test_bishop_round_trip_through_inflections(fine_precession_apparatus):
    bishop = transform_service.bishop_transform(fine_precession_apparatus, 0.4)
    back = transform_service.inverse_bishop(bishop)
    assert frenet_service.developments_equivalent(fine_precession_apparatus.development(), back.development(), tol=1e-7)
    assert np.abs(back.frames.frames - fine_precession_apparatus.frames.frames).max() < 1e-10


# --- successor and predecessor ---

def test_successor_normal_is_the_input_tangent(circular_helix):
    succ = transform_service.successor_transform(circular_helix, 0.2)
    assert np.array_equal(succ.normal, circular_helix.tangent)
    k1, t1 = succ.kappa_values(), succ.tau_values()
    assert np.allclose(k1**2 + t1**2, circular_helix.kappa_values() ** 2, atol=1e-12)
    assert succ.frames.orthonormality_error().max() < 1e-14


def test_successor_of_plane_curve_is_a_general_helix():
    theta = math.pi / 3
    grid = uniform_grid((0.0, TWO_PI), 2000)
    plane = zoo_service.plane_apparatus(_wavy_kappa(), grid)
    helix = zoo_service.helix_apparatus(HelixParams(theta, _wavy_kappa()), grid)
    succ = transform_service.successor_transform(plane, math.pi / 2 - theta)
    assert np.abs(succ.frames.frames - helix.frames.frames).max() < 1e-14
    assert np.abs(succ.kappa_values() - helix.kappa_values()).max() < 1e-14
    assert np.abs(succ.tau_values() - helix.tau_values()).max() < 1e-14


def test_successor_matches_bishop_rearrangement(circular_helix):
    succ = transform_service.successor_transform(circular_helix, 0.5)
    rearranged = frenet_service.rearrange(transform_service.bishop_transform(circular_helix, 0.5), "e")
    assert np.abs(succ.frames.frames - rearranged.frames.frames).max() < 1e-14
    assert np.array_equal(succ.kappa_values(), rearranged.kappa_values())


def test_successor_darboux_vector_is_curvature_times_binormal(circular_helix):
    succ = transform_service.successor_transform(circular_helix, 0.2)
    k1, t1 = succ.kappa_values(), succ.tau_values()
    kappa, binormal = circular_helix.kappa_values(), circular_helix.binormal
    for i in range(0, len(succ.s), 997):
        d1 = frenet_service.darboux_vector(succ.frames.frame_at(i), k1[i], t1[i])
        assert np.abs(d1 - kappa[i] * binormal[i]).max() < 1e-13


def test_successor_of_circular_helix_is_constant_precession():
    domain = (0.0, TWO_PI)
    grid = uniform_grid(domain, 20000)
    helix = zoo_service.helix_apparatus(HelixParams(math.atan2(4, 3), ScalarField.constant(5.0, domain)), grid)
    succ = transform_service.successor_transform(helix, 0.0)
    assert np.abs(succ.kappa_values() - 4 * np.cos(3 * grid)).max() < 1e-10
    assert np.abs(succ.tau_values() - 4 * np.sin(3 * grid)).max() < 1e-10


def test_successor_of_helix_matches_slant_helix_frames():
    theta, domain = 0.6, (0.0, 2.0)
    n = math.cos(theta)
    grid = uniform_grid(domain, 4000)
    phi = ScalarField.from_rule(lambda s: s + s**2 / 4, domain, derivative=lambda s: 1 + s / 2)
    kappa = ScalarField.from_rule(lambda s: (1 + s / 2) / n, domain)
    helix = zoo_service.helix_apparatus(HelixParams(theta, kappa), grid)
    succ = transform_service.successor_transform(helix, 0.0)

    slant = zoo_service.slant_helix_apparatus(phi, theta, grid, reflected=False)
    assert np.abs(succ.frames.frames - slant.frames.frames).max() < 1e-11
    assert np.abs(succ.kappa_values() - slant.kappa_values()).max() < 1e-11
    assert np.abs(succ.tau_values() - slant.tau_values()).max() < 1e-11

    # the reflected family is the same frame turned by π about the slope axis
    reflected = zoo_service.slant_helix_apparatus(phi, theta, grid)
    turned = succ.frames.rotated(np.diag([-1.0, -1.0, 1.0]))
    assert np.abs(turned.frames - reflected.frames.frames).max() < 1e-11


def test_second_successor_of_plane_curve_is_a_slant_helix():
    theta = math.pi / 3
    domain = (0.0, TWO_PI)
    plane = zoo_service.plane_apparatus(_wavy_kappa(domain), uniform_grid(domain, 20000))
    helix = transform_service.successor_transform(plane, math.pi / 2 - theta)
    slant = transform_service.successor_transform(helix, 0.4)
    profile = zoo_service.slant_invariant(slant.development())
    assert profile.constant_value() == pytest.approx(1 / math.tan(theta), abs=1e-6)
    assert profile.spread() < 1e-6


def test_predecessor_undoes_successor_on_helix(circular_helix):
    succ = transform_service.successor_transform(circular_helix, 0.3)
    pred = transform_service.predecessor_transform(succ)
    assert frenet_service.developments_equivalent(circular_helix.development(), pred.development(), tol=1e-7)
    assert np.abs(pred.frames.frames - circular_helix.frames.frames).max() < 1e-10


def test_predecessor_undoes_successor_through_inflections(fine_precession_apparatus):
    succ = transform_service.successor_transform(fine_precession_apparatus, 0.4)
    polar = transform_service.polar_unwrap(succ.kappa, succ.tau, grid=succ.s)
    pred = transform_service.predecessor_transform(succ, polar)
    assert frenet_service.developments_equivalent(fine_precession_apparatus.development(), pred.development(), tol=1e-7)


def test_predecessor_of_precession_is_a_circular_helix(fine_precession_apparatus):
    pred = transform_service.predecessor_transform(fine_precession_apparatus)
    assert np.abs(pred.kappa_values() - 4.0).max() < 1e-7
    assert np.abs(pred.tau_values() - 3.0).max() < 1e-7


def test_predecessor_of_salkowski_curve():
    curve = zoo_service.salkowski_development(0.5, (-1.9, 1.9))
    grid = uniform_grid(curve.development.domain, 100000)
    app = zoo_service.slant_helix_apparatus(curve.phi, curve.theta, grid)
    pred = transform_service.predecessor_transform(app)
    kappa_h, tau_h = curve.helix.sample(grid)
    assert np.abs(pred.kappa_values() - kappa_h).max() < 1e-6
    assert np.abs(pred.tau_values() - tau_h).max() < 1e-6


def test_predecessor_needs_polar_form_where_lancret_vanishes():
    kappa = ScalarField.from_table((0.0, 1.0), [1.0, 0.5, 0.0, 0.5, 1.0])
    app = zoo_service.plane_apparatus(kappa)
    with pytest.raises(VanishingLancret):
        transform_service.predecessor_transform(app)


def test_predecessor_checks_polar_domain(circular_helix):
    other = ScalarField.constant(1.0, (0.0, 1.0))
    polar = transform_service.polar_unwrap(other, other)
    with pytest.raises(DomainMismatch):
        transform_service.predecessor_transform(circular_helix, polar)
