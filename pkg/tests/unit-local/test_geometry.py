# tests/unit-local/test_geometry.py
import math

import numpy as np
import pytest
from pydantic import ValidationError

from model.geometry import (
    SurfaceCoord,
    TrackGeometry,
    bike_position,
    bike_velocity,
    link_direction,
    path_theta,
    path_theta_prime,
    position_jacobian,
    rider_position,
    rider_velocity,
    speed,
    surface_point,
)


# ----------------------------
# TrackGeometry
# ----------------------------

def test_defaults_and_lambda_alias():
    g = TrackGeometry()
    assert (g.R, g.r, g.lam) == (3.0, 1.0, 3.0)
    assert TrackGeometry(**{"lambda": 2.0}).lam == 2.0


@pytest.mark.parametrize(
    "kwargs, needle",
    [
        ({"R": 1.0, "r": 2.0}, "R > r > 0"),
        ({"R": 3.0, "r": 0.0}, "R > r > 0"),
        ({"lam": 0.5}, "lambda >= 1"),
    ],
)
def test_invalid_geometry_names_invariant(kwargs, needle):
    with pytest.raises(ValidationError) as exc:
        TrackGeometry(**kwargs)
    assert needle in str(exc.value)


# ----------------------------
# Riding line and positions
# ----------------------------

def test_path_theta_extremes():
    assert path_theta(0.0) == pytest.approx(math.pi / 2)
    assert path_theta(math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert path_theta(math.pi) == pytest.approx(math.pi / 2)


def test_path_theta_prime_matches_difference():
    h = 1e-6
    for phi in np.linspace(0.0, 2 * math.pi, 13):
        fd = (path_theta(phi + h) - path_theta(phi - h)) / (2 * h)
        assert path_theta_prime(phi) == pytest.approx(fd, abs=1e-8)


def test_bike_position_uses_surface_point():
    g = TrackGeometry()
    for phi in (0.0, 0.3, 1.2, 2.5, 4.0):
        np.testing.assert_array_equal(
            bike_position(g, phi), surface_point(g, SurfaceCoord(phi, path_theta(phi)))
        )


def test_surface_point_known_values():
    g = TrackGeometry()
    # straight: inner line, track bottom
    np.testing.assert_allclose(bike_position(g, 0.0), [3.0, 0.0, 0.0], atol=1e-12)
    # apex: outer line, top of the berm
    np.testing.assert_allclose(bike_position(g, math.pi / 2), [0.0, 10.0, 1.0], atol=1e-12)


def test_theta_reduced_modulo_two_pi():
    g = TrackGeometry()
    a = surface_point(g, SurfaceCoord(0.7, 0.4))
    b = surface_point(g, SurfaceCoord(0.7, 0.4 + 2 * math.pi))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_rider_sits_at_distance_l_along_link():
    g = TrackGeometry()
    rng = np.random.default_rng(1)
    for phi, l in zip(rng.uniform(0, 2 * math.pi, 20), rng.uniform(0.2, 0.7, 20)):
        d = rider_position(g, phi, l) - bike_position(g, phi)
        assert np.linalg.norm(d) == pytest.approx(l, rel=1e-12)
        np.testing.assert_allclose(d / l, link_direction(phi), atol=1e-12)


def test_array_inputs_broadcast():
    g = TrackGeometry()
    phi = np.linspace(0, 1, 5)
    assert bike_position(g, phi).shape == (5, 3)
    assert rider_position(g, phi, 0.4).shape == (5, 3)
    assert speed(bike_velocity(g, phi, 1.0)).shape == (5,)


# ----------------------------
# Velocities
# ----------------------------

def test_initial_speed_is_three_pi():
    g = TrackGeometry()
    vb = speed(bike_velocity(g, 0.0, math.pi / 3))
    vr = speed(rider_velocity(g, 0.0, math.pi / 3, 0.4368, 0.0))
    assert vb == pytest.approx(3 * math.pi, rel=1e-12)
    assert vr == pytest.approx(3 * math.pi, rel=1e-12)
    assert abs(vb - 9.43) < 0.01


@pytest.mark.parametrize("phi", [0.1, 0.8, 1.6, 2.9, 4.4, 5.9])
@pytest.mark.parametrize("l", [0.28, 0.45, 0.59])
def test_position_jacobian_matches_difference(phi, l):
    g = TrackGeometry()
    h = 1e-6
    fd = (rider_position(g, phi + h, l) - rider_position(g, phi - h, l)) / (2 * h)
    np.testing.assert_allclose(position_jacobian(g, phi, g.r - l), fd, atol=1e-6)


def test_rider_velocity_includes_link_rate():
    g = TrackGeometry()
    phi, l, phidot, ldot = 0.9, 0.4, 1.3, -0.7
    h = 1e-6
    fd = (
        rider_position(g, phi + h * phidot, l + h * ldot) - rider_position(g, phi - h * phidot, l - h * ldot)
    ) / (2 * h)
    np.testing.assert_allclose(rider_velocity(g, phi, phidot, l, ldot), fd, atol=1e-6)
