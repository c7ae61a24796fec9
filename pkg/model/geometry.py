# model/geometry.py
"""
Kinematics of the elliptic-torus track, the fixed riding line on it, and the
two point masses (bike on the line, rider at distance l along the link).

Every function accepts python floats or numpy arrays (broadcasting) and also
complex arrays, which the optimizer uses for complex-step Jacobians.
Vec3 results carry the three Cartesian components on the last axis.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

PI = math.pi
TWO_PI = 2.0 * math.pi


class TrackGeometry(BaseModel):
    """Torus shape constants: major radius R, tube radius r, stretch lambda."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    R: float = 3.0
    r: float = 1.0
    lam: float = Field(3.0, alias="lambda")

    @model_validator(mode="after")
    def _check(self) -> "TrackGeometry":
        if not (self.R > self.r > 0):
            raise ValueError(f"R > r > 0 violated (R={self.R}, r={self.r})")
        if not self.lam >= 1:
            raise ValueError(f"lambda >= 1 violated (lambda={self.lam})")
        return self


class SurfaceCoord(NamedTuple):
    phi: float
    theta: float

    def reduced(self) -> "SurfaceCoord":
        return SurfaceCoord(self.phi, self.theta % TWO_PI)


def sincos(x):
    """(sin x, cos x); plain floats take the math fast path."""
    if isinstance(x, float):
        return math.sin(x), math.cos(x)
    return np.sin(x), np.cos(x)


def _vec3(x1, x2, x3) -> np.ndarray:
    return np.stack(np.broadcast_arrays(x1, x2, x3), axis=-1)


# -------- riding line --------

def path_theta(phi):
    """b(phi) = pi/2 * cos^2(phi); inner line on the straights, outer at the apex."""
    _, c = sincos(phi)
    return 0.5 * PI * c * c


def path_theta_prime(phi):
    s, c = sincos(phi)
    return -PI * c * s


# -------- positions --------

def surface_point(geom: TrackGeometry, coord: SurfaceCoord) -> np.ndarray:
    phi, theta = coord.reduced()
    sp, cp = sincos(phi)
    st, ct = sincos(theta)
    return _vec3(
        (geom.R + geom.r * ct) * cp,
        (geom.lam * geom.R + geom.r * ct) * sp,
        geom.r * (1.0 - st),
    )


def bike_position(geom: TrackGeometry, phi) -> np.ndarray:
    return surface_point(geom, SurfaceCoord(phi, path_theta(phi)))


def rider_position(geom: TrackGeometry, phi, l) -> np.ndarray:
    """Rider CoM at distance l from the bike along the link direction."""
    sp, cp = sincos(phi)
    sb, cb = sincos(path_theta(phi))
    rho = geom.r - l
    return _vec3(
        (geom.R + rho * cb) * cp,
        (geom.lam * geom.R + rho * cb) * sp,
        geom.r * (1.0 - sb) + l * sb,
    )


def link_direction(phi) -> np.ndarray:
    """Unit vector from bike to rider, (-cos b cos phi, -cos b sin phi, sin b)."""
    sp, cp = sincos(phi)
    sb, cb = sincos(path_theta(phi))
    return _vec3(-cb * cp, -cb * sp, sb)


# -------- velocities --------

def position_jacobian(geom: TrackGeometry, phi, rho):
    """
    d/dphi of the point at signed offset rho = r - l from the torus tube centre
    line, chain rule through b(phi) included. rho = r gives the bike.
    Returns the three components as a tuple (no stacking, hot path).
    """
    sp, cp = sincos(phi)
    sb, cb = sincos(path_theta(phi))
    bp = -PI * cp * sp
    a = geom.R + rho * cb
    b = geom.lam * geom.R + rho * cb
    return (
        -rho * sb * bp * cp - a * sp,
        -rho * sb * bp * sp + b * cp,
        -rho * cb * bp,
    )


def bike_velocity(geom: TrackGeometry, phi, phidot) -> np.ndarray:
    j1, j2, j3 = position_jacobian(geom, phi, geom.r)
    return _vec3(j1 * phidot, j2 * phidot, j3 * phidot)


def rider_velocity(geom: TrackGeometry, phi, phidot, l, ldot) -> np.ndarray:
    j1, j2, j3 = position_jacobian(geom, phi, geom.r - l)
    sp, cp = sincos(phi)
    sb, cb = sincos(path_theta(phi))
    return _vec3(
        j1 * phidot - cb * cp * ldot,
        j2 * phidot - cb * sp * ldot,
        j3 * phidot + sb * ldot,
    )


def speed(v: np.ndarray) -> np.ndarray:
    return np.linalg.norm(v, axis=-1)
