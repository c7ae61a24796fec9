# model/dynamics.py
"""
Energies and equations of motion of the bike/rider two-mass model.

The phi-equation is the implicit ODE
    0 = M(phi,l) phi'' + F(phi,l) phi'^2 + Q(phi,l,l') phi' + P(phi,l,l',l'')
with l'' = u the pumping input. M, F, Q, P are the closed forms built from the
intermediate terms sigma_1..sigma_25 (see intermediate_terms); they are checked
against euler_lagrange_residual_numeric, which differentiates K - U numerically
and shares no algebra with them.
"""
from __future__ import annotations

import math
from typing import Dict, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from core.errors import SingularMassError
from model.geometry import (
    PI,
    TrackGeometry,
    bike_position,
    bike_velocity,
    path_theta,
    rider_position,
    rider_velocity,
    sincos,
)

SINGULAR_MASS_TOL = 1e-9


class SystemParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    m_b: float = 15.0
    m_r: float = 80.0
    g_grav: float = 9.8067

    @model_validator(mode="after")
    def _check(self) -> "SystemParams":
        for name in ("m_b", "m_r", "g_grav"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} > 0 violated ({name}={getattr(self, name)})")
        return self


class State(NamedTuple):
    phi: float
    phidot: float
    l: float
    ldot: float


class EomCoefficients(NamedTuple):
    M: float
    F: float
    Q: float
    P: float


# -------- energies --------

def kinetic_energy(geom: TrackGeometry, params: SystemParams, s: State):
    vb = bike_velocity(geom, s.phi, s.phidot)
    vr = rider_velocity(geom, s.phi, s.phidot, s.l, s.ldot)
    return 0.5 * (params.m_b * np.sum(vb * vb, axis=-1) + params.m_r * np.sum(vr * vr, axis=-1))


def potential_energy(geom: TrackGeometry, params: SystemParams, s: State):
    zb = bike_position(geom, s.phi)[..., 2]
    zr = rider_position(geom, s.phi, s.l)[..., 2]
    return params.g_grav * (params.m_b * zb + params.m_r * zr)


def lagrangian(geom: TrackGeometry, params: SystemParams, s: State):
    return kinetic_energy(geom, params, s) - potential_energy(geom, params, s)


# -------- closed-form terms --------

def intermediate_terms(geom: TrackGeometry, phi, l, ldot) -> Dict[str, object]:
    """Intermediate terms sigma_1..sigma_25, keyed 's1'..'s25'."""
    R, r, lam = geom.R, geom.r, geom.lam
    s, c = sincos(phi)
    s25 = path_theta(phi)
    ss, cs = sincos(s25)
    c2, s2 = c * c, s * s
    c3, s3 = c2 * c, s2 * s
    pi2, lr = PI * PI, l - r

    t: Dict[str, object] = {"s25": s25}
    t["s24"] = cs * lr
    t["s23"] = (
        PI * l * cs * c2 - PI * r * cs * c2 - PI * l * cs * s2 + PI * r * cs * s2
        + l * pi2 * ss * c2 * s2 - r * pi2 * ss * c2 * s2
    )
    t["s22"] = ldot * cs * s - PI * ldot * ss * c2 * s
    t["s21"] = PI * ldot * ss * c * s2 + ldot * cs * c
    t["s20"] = R + r * cs
    t["s19"] = r * cs + R * lam
    t["s18"] = c * (R - t["s24"])
    t["s17"] = s * (R * lam - t["s24"])
    t["s16"] = PI * ss * s2 * lr - PI * ss * c2 * lr + pi2 * cs * c2 * s2 * lr
    t["s15"] = 2.0 * ldot * ss * t["s23"]
    t["s14"] = 2.0 * PI * ldot * ldot * cs * ss * c * s
    t["s13"] = 2.0 * ldot * cs * c * t["s22"]
    t["s12"] = 2.0 * ldot * cs * s * t["s21"]
    t["s11"] = s * t["s20"] - PI * r * ss * c2 * s
    t["s10"] = PI * r * ss * c * s2 + c * t["s19"]
    t["s9"] = c * t["s20"] - PI * r * ss * c3 + r * pi2 * cs * c3 * s2 + 3.0 * PI * r * ss * c * s2
    t["s8"] = s * t["s19"] + PI * r * ss * s3 + r * pi2 * cs * c2 * s3 - 3.0 * PI * r * ss * c2 * s
    t["s7"] = t["s18"] + PI * ss * c3 * lr - pi2 * cs * c3 * s2 * lr - 3.0 * PI * ss * c * s2 * lr
    t["s6"] = t["s17"] - PI * ss * s3 * lr - pi2 * cs * c2 * s3 * lr + 3.0 * PI * ss * c2 * s * lr
    t["s5"] = -t["s18"] + c * t["s16"] + 2.0 * PI * ss * c * s2 * lr
    t["s4"] = t["s17"] - s * t["s16"] + 2.0 * PI * ss * c2 * s * lr
    t["s3"] = PI * l * cs * c * s - PI * r * cs * c * s
    t["s2"] = s * (R - t["s24"]) + PI * ss * c2 * s * lr
    t["s1"] = c * (R * lam - t["s24"]) - PI * ss * c * s2 * lr
    return t


def _finite(x) -> bool:
    if isinstance(x, float):
        return math.isfinite(x)
    # complex-step callers perturb the imaginary part only
    return bool(np.all(np.isfinite(np.real(x))))


def eom_coefficients(geom: TrackGeometry, params: SystemParams, phi, l, ldot, lddot) -> EomCoefficients:
    if not all(_finite(x) for x in (phi, l, ldot, lddot)):
        raise ValueError(f"non-finite input phi={phi}, l={l}, ldot={ldot}, lddot={lddot}")

    mb, mr, g, r = params.m_b, params.m_r, params.g_grav, geom.r
    t = intermediate_terms(geom, phi, l, ldot)
    s1, s2, s3, s4, s5, s6, s7 = (t[k] for k in ("s1", "s2", "s3", "s4", "s5", "s6", "s7"))
    s8, s9, s10, s11 = t["s8"], t["s9"], t["s10"], t["s11"]
    s12, s13, s14, s15 = t["s12"], t["s13"], t["s14"], t["s15"]
    s21, s22, s23 = t["s21"], t["s22"], t["s23"]

    s, c = sincos(phi)
    ss, cs = sincos(t["s25"])
    r2, pi2, pi3 = r * r, PI * PI, PI * PI * PI

    M = 0.5 * mb * (2.0 * s10 * s10 + 2.0 * s11 * s11 + 2.0 * r2 * pi2 * cs * cs * c * c * s * s) \
        + 0.5 * mr * (2.0 * s1 * s1 + 2.0 * s2 * s2 + 2.0 * s3 * s3)

    bike_f = (
        2.0 * s11 * s9 - 2.0 * s10 * s8
        - 2.0 * r2 * pi2 * cs * cs * c * s ** 3
        + 2.0 * r2 * pi2 * cs * cs * c ** 3 * s
        + 2.0 * r2 * pi3 * cs * ss * c ** 3 * s ** 3
    )
    F = 0.5 * (
        -mb * bike_f
        + mb * 2.0 * bike_f
        + mr * (2.0 * s1 * s4 - 2.0 * s3 * s23 + 2.0 * s2 * s5)
        - mr * (-2.0 * s2 * s7 + 2.0 * s1 * s4 - 4.0 * s3 * s23 + 2.0 * s2 * s5 + 2.0 * s1 * s6)
    )

    Q = 0.5 * (
        -mr * (
            2.0 * s1 * s21
            + 2.0 * s1 * (2.0 * ldot * PI * ss * c * s * s + 2.0 * ldot * cs * c)
            + 2.0 * s2 * s22
            + 2.0 * s2 * (2.0 * ldot * cs * s - 2.0 * PI * ldot * ss * c * c * s)
            + s15
            - 2.0 * ldot * cs * s * s6
            - 2.0 * ldot * cs * c * s7
            - 6.0 * PI * ldot * cs * c * s * s3
        )
        + mr * (
            2.0 * s1 * s21 + 2.0 * s2 * s22 + s15
            - 2.0 * ldot * cs * s * s4
            + 2.0 * ldot * cs * c * s5
            - 2.0 * PI * ldot * cs * c * s * s3
        )
    )

    P = (
        -g * (mr * s3 - PI * mb * r * cs * c * s)
        - 0.5 * mr * (
            2.0 * lddot * ss * s3 - 2.0 * lddot * cs * c * s2 - s12 + s13
            + 2.0 * lddot * cs * s * s1 + s14
        )
        + 0.5 * mr * (-s12 + s13 + s14)
    )
    return EomCoefficients(M, F, Q, P)


# -------- equations of motion --------

def implicit_residual(geom: TrackGeometry, params: SystemParams, sdot, s: State, u):
    """M*phi'' + F*phi'^2 + Q*phi' + P; sdot = (phi', phi'', l', l'')."""
    k = eom_coefficients(geom, params, s.phi, s.l, s.ldot, u)
    return k.M * sdot[1] + k.F * s.phidot ** 2 + k.Q * s.phidot + k.P


def _check_mass(M, phi, l) -> None:
    if isinstance(M, float):
        if abs(M) < SINGULAR_MASS_TOL:
            raise SingularMassError(phi, l, M)
        return
    bad = np.abs(np.real(M)) < SINGULAR_MASS_TOL
    if np.any(bad):
        i = np.flatnonzero(np.broadcast_to(bad, np.shape(M)))[0]
        pick = lambda a: float(np.real(np.broadcast_to(a, np.shape(M)).flat[i]))  # noqa: E731
        raise SingularMassError(pick(phi), pick(l), pick(M))


def phi_acceleration(geom: TrackGeometry, params: SystemParams, phi, phidot, l, ldot, u):
    k = eom_coefficients(geom, params, phi, l, ldot, u)
    _check_mass(k.M, phi, l)
    return -(k.F * phidot * phidot + k.Q * phidot + k.P) / k.M


def explicit_rhs(geom: TrackGeometry, params: SystemParams, s: State, u) -> np.ndarray:
    """State derivative (phi', phi'', l', u) of the integrator-chain form."""
    phi, phidot, l, ldot = s
    phiddot = phi_acceleration(geom, params, phi, phidot, l, ldot, u)
    return np.array([phidot, phiddot, ldot, u])


# -------- rider actuation --------

def link_force(geom: TrackGeometry, params: SystemParams, s: State, u):
    """
    Generalized force the rider applies along the link (l-equation of the
    Euler-Lagrange system). Positive pushes rider and bike apart.
    """
    phi, phidot, l, ldot = s
    mr, R, lam = params.m_r, geom.R, geom.lam
    sp, cp = sincos(phi)
    sb, cb = sincos(path_theta(phi))
    coupling = mr * (1.0 - lam) * R * cb * cp * sp
    coupling_phi = mr * (1.0 - lam) * R * (PI * sb * cp * cp * sp * sp + cb * (cp * cp - sp * sp))
    # Q is linear in l', so Q(l'=1) is dM/dl
    mass_l = eom_coefficients(geom, params, phi, l, 1.0, 0.0).Q
    phiddot = phi_acceleration(geom, params, phi, phidot, l, ldot, u)
    return (
        coupling * phiddot
        + coupling_phi * phidot * phidot
        + mr * u
        - 0.5 * mass_l * phidot * phidot
        + params.g_grav * mr * sb
    )


def link_power(geom: TrackGeometry, params: SystemParams, s: State, u):
    return link_force(geom, params, s, u) * s.ldot


# -------- numerical oracle --------

def euler_lagrange_residual_numeric(
    geom: TrackGeometry,
    params: SystemParams,
    s: State,
    phiddot,
    u,
    *,
    step: float = 1e-5,
    cross_step: float = 1e-4,
    velocity_step: float = 1e-2,
):
    """
    d/dt(dL/dphi') - dL/dphi with every partial of L = K - U taken by central
    differences of the energy functions:
        L_vv*phi'' + L_vphi*phi' + L_vl*l' + L_vw*u - L_phi
    (v = phi', w = l'). L_phi uses `step`. Second partials move phi' by
    `velocity_step` and the other coordinate by `cross_step`; L is quadratic
    in the velocities, so differences along phi' carry no truncation error.
    Works elementwise on array-valued states.
    """
    phi, phidot, l, ldot = (np.asarray(x, dtype=float) for x in s)

    def L(dphi=0.0, dv=0.0, dl=0.0, dw=0.0):
        return lagrangian(geom, params, State(phi + dphi, phidot + dv, l + dl, ldot + dw))

    h, a, b = step, velocity_step, cross_step
    L_phi = (L(dphi=h) - L(dphi=-h)) / (2.0 * h)
    L_vv = (L(dv=a) - 2.0 * L() + L(dv=-a)) / (a * a)

    def cross(name: str):
        plus, minus = {name: b}, {name: -b}
        return (L(dv=a, **plus) - L(dv=a, **minus) - L(dv=-a, **plus) + L(dv=-a, **minus)) / (4.0 * a * b)

    L_vphi = cross("dphi")
    L_vl = cross("dl")
    L_vw = cross("dw")
    return L_vv * phiddot + L_vphi * phidot + L_vl * ldot + L_vw * u - L_phi
